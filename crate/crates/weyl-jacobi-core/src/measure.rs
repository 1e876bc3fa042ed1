//! Discrete 2×2 matrix measures on the real line: the symmetric matrix
//! measure μ built from spectral data (ν, ψ), its moments and Stieltjes
//! transform, and the symmetry, nondegeneracy, and determinacy diagnostics
//! the inverse transform relies on.

use alloc::vec::Vec;

use num_complex::Complex64;
// Trait-based f64 math for builds without std; the test harness links
// std, whose inherent methods shadow these.
#[allow(unused_imports)]
use num_traits::Float;

use crate::direct::SpectralData;
use crate::error::{Error, Result, Tolerances};
use crate::matops::{hermitian_eig, DenseMatrix, Mat2};

/// One atom of a matrix measure: mass W (Hermitian PSD) at position x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureAtom {
    pub x: f64,
    pub w: Mat2,
}

/// Finitely supported 2×2 matrix measure with atoms sorted by position.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteMatrixMeasure {
    pub atoms: Vec<MeasureAtom>,
    /// Whether the total mass is declared (and checked) to be the identity.
    pub normalized: bool,
}

impl DiscreteMatrixMeasure {
    /// Check structural constraints: strictly increasing finite positions,
    /// Hermitian PSD weights (minimum eigenvalue ≥ −1e−12·trace), and total
    /// mass I to 1e−10 when the measure is declared normalized.
    pub fn validate(&self) -> Result<()> {
        let mut prev = f64::NEG_INFINITY;
        let mut total = Mat2::zero();
        for atom in &self.atoms {
            if !atom.x.is_finite() {
                return Err(Error::InvalidMeasure("atom positions must be finite"));
            }
            if atom.x <= prev {
                return Err(Error::InvalidMeasure("atom positions must be strictly increasing"));
            }
            prev = atom.x;
            if !atom.w.is_finite() {
                return Err(Error::InvalidMeasure("atom weights must be finite"));
            }
            let herm_defect = (atom.w - atom.w.adjoint()).frobenius();
            if herm_defect > 1e-12 * atom.w.frobenius().max(1.0) {
                return Err(Error::InvalidMeasure("atom weights must be Hermitian"));
            }
            let (min_eig, _) = atom.w.hermitian_eigenvalues();
            let trace = atom.w.trace().re;
            if min_eig < -1e-12 * trace.max(1.0) {
                return Err(Error::InvalidMeasure("atom weights must be positive semidefinite"));
            }
            total = total + atom.w;
        }
        if self.normalized && (total - Mat2::identity()).frobenius() > 1e-10 {
            return Err(Error::InvalidMeasure("total mass of a normalized measure must be the identity"));
        }
        Ok(())
    }
}

/// The symmetric matrix measure μ of spectral data (ν, ψ): an atom of ν at
/// s > 0 with phase ψ contributes mass (w/2)·[[1, ±ψ], [±conj(ψ), 1]] at
/// x = ±s, and an atom at s = 0 contributes w·I at x = 0.
pub fn to_matrix_measure(sd: &SpectralData) -> DiscreteMatrixMeasure {
    let mut atoms: Vec<MeasureAtom> = Vec::with_capacity(2 * sd.atoms.len());
    let signed = |a: &crate::direct::Atom, sign: f64| {
        let half = 0.5 * a.weight;
        let off = a.psi * sign * half;
        MeasureAtom {
            x: sign * a.s,
            w: Mat2::new([
                [Complex64::new(half, 0.0), off],
                [off.conj(), Complex64::new(half, 0.0)],
            ]),
        }
    };
    for a in sd.atoms.iter().rev().filter(|a| a.s > 0.0) {
        atoms.push(signed(a, -1.0));
    }
    for a in sd.atoms.iter().filter(|a| a.s == 0.0) {
        atoms.push(MeasureAtom {
            x: 0.0,
            w: Mat2::identity().scale(Complex64::new(a.weight, 0.0)),
        });
    }
    for a in sd.atoms.iter().filter(|a| a.s > 0.0) {
        atoms.push(signed(a, 1.0));
    }
    DiscreteMatrixMeasure { atoms, normalized: true }
}

/// k-th matrix moment Σ x^k·W.
pub fn moments(m: &DiscreteMatrixMeasure, k: usize) -> Mat2 {
    let mut acc = Mat2::zero();
    for atom in &m.atoms {
        acc = acc + atom.w.scale(Complex64::new(atom.x.powi(k as i32), 0.0));
    }
    acc
}

/// Stieltjes transform Σ W_j/(x_j − z). Fails with `PoleProximity` when z
/// is within the scaled pole tolerance of an atom.
pub fn stieltjes(m: &DiscreteMatrixMeasure, z: Complex64, tol: &Tolerances) -> Result<Mat2> {
    let threshold = tol.pole_threshold(z.norm());
    let mut acc = Mat2::zero();
    for atom in &m.atoms {
        let denom = Complex64::new(atom.x, 0.0) - z;
        let dist = denom.norm();
        if dist < threshold {
            return Err(Error::PoleProximity { distance: dist });
        }
        acc = acc + atom.w.scale(Complex64::ONE / denom);
    }
    Ok(acc)
}

/// Deviation of a matrix measure from the symmetry class of spectral-data
/// measures: diagonal entries even in x, off-diagonal entries odd in x,
/// equal diagonal entries atomwise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    /// Accumulated defect of the diagonal (even) parts across ±x pairs.
    pub even_defect: f64,
    /// Accumulated defect of the off-diagonal (odd) parts across ±x pairs.
    pub odd_defect: f64,
    /// Largest atomwise |W₀₀ − W₁₁|.
    pub diagonal_equality_defect: f64,
}

/// Measure the parity symmetry of μ by pairing atoms at x and −x
/// (tolerance 1e−12·(1 + |x|)); an unmatched atom contributes its full
/// mass to the corresponding defects.
pub fn symmetry_check(m: &DiscreteMatrixMeasure) -> SymmetryReport {
    let mut report = SymmetryReport {
        even_defect: 0.0,
        odd_defect: 0.0,
        diagonal_equality_defect: 0.0,
    };
    for atom in &m.atoms {
        report.diagonal_equality_defect = report
            .diagonal_equality_defect
            .max((atom.w.e[0][0] - atom.w.e[1][1]).norm());
    }
    let unmatched = |report: &mut SymmetryReport, w: &Mat2| {
        report.even_defect += w.e[0][0].norm() + w.e[1][1].norm();
        report.odd_defect += w.e[0][1].norm() + w.e[1][0].norm();
    };
    let atoms = &m.atoms;
    let mut i = 0;
    let mut j = atoms.len().wrapping_sub(1);
    while !atoms.is_empty() && i <= j {
        let pair_tol = 1e-12 * (1.0 + atoms[i].x.abs().max(atoms[j].x.abs()));
        if i == j {
            if atoms[i].x.abs() <= pair_tol {
                // A zero atom is its own even partner; oddness demands a
                // vanishing off-diagonal part.
                report.odd_defect += atoms[i].w.e[0][1].norm() + atoms[i].w.e[1][0].norm();
            } else {
                unmatched(&mut report, &atoms[i].w);
            }
            break;
        }
        if (atoms[i].x + atoms[j].x).abs() <= pair_tol {
            let wm = &atoms[i].w;
            let wp = &atoms[j].w;
            report.even_defect +=
                (wp.e[0][0] - wm.e[0][0]).norm() + (wp.e[1][1] - wm.e[1][1]).norm();
            report.odd_defect +=
                (wp.e[0][1] + wm.e[0][1]).norm() + (wp.e[1][0] + wm.e[1][0]).norm();
            i += 1;
            if j == 0 {
                break;
            }
            j -= 1;
        } else if atoms[i].x.abs() > atoms[j].x.abs() {
            unmatched(&mut report, &atoms[i].w);
            i += 1;
        } else {
            unmatched(&mut report, &atoms[j].w);
            if j == 0 {
                break;
            }
            j -= 1;
        }
    }
    report
}

/// Nondegeneracy of μ for polynomial degree d: minimum eigenvalue of the
/// Gram matrix of the 2(d+1) vector polynomials x^j·e_k in L²(μ). Returns
/// (min eigenvalue above the scaled rank cutoff, min eigenvalue).
pub fn nondegeneracy_rank(
    m: &DiscreteMatrixMeasure,
    d: usize,
    tol: &Tolerances,
) -> Result<(bool, f64)> {
    let dim = 2 * (d + 1);
    let gram = DenseMatrix::from_fn(dim, |r, c| {
        let (j1, k1) = (r / 2, r % 2);
        let (j2, k2) = (c / 2, c % 2);
        let mut acc = Complex64::ZERO;
        for atom in &m.atoms {
            acc += atom.w.e[k1][k2] * atom.x.powi((j1 + j2) as i32);
        }
        acc
    });
    let eig = hermitian_eig(&gram, tol)?;
    let min_eig = eig.eigenvalues[0];
    let trace: f64 = eig.eigenvalues.iter().sum();
    Ok((min_eig > tol.rank_tol * trace.max(0.0), min_eig))
}

/// Outcome of the determinacy sufficiency test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeterminacyReport {
    /// Finitely supported measures are always determinate.
    pub ok: bool,
    /// The exponential-moment witness Σ e^{eps·|x|}·tr W.
    pub value: f64,
    /// The witness overflowed f64 range; determinacy itself is unaffected.
    pub overflow: bool,
}

/// Exponential-moment witness for determinacy: finite Σ e^{eps·|x|}·tr W
/// is sufficient, and for a finitely supported measure it always holds
/// (the witness can still overflow f64, which is reported, not fatal).
pub fn determinacy_sufficient(m: &DiscreteMatrixMeasure, eps: f64) -> DeterminacyReport {
    let mut value = 0.0f64;
    for atom in &m.atoms {
        value += (eps * atom.x.abs()).exp() * atom.w.trace().re;
    }
    DeterminacyReport { ok: true, value, overflow: !value.is_finite() }
}
