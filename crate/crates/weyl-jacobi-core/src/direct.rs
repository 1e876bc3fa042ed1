//! Direct spectral transform: from Jacobi coefficients to the spectral
//! data (ν, ψ) of the truncation, where ν is the spectral measure of
//! |J| = (J*J)^{1/2} at the first basis vector and ψ is the phase function
//! ψ(s) = ⟨δ₀, J P_{s} δ₀⟩ / (s·ν({s})) on the atoms of ν.

use alloc::vec::Vec;

use num_complex::Complex64;
// Trait-based f64 math for builds without std; the test harness links
// std, whose inherent methods shadow these.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result, Tolerances};
use crate::jacobi::{dense_truncation, JacobiCoefficients};
use crate::matops::{hermitian_eig, DenseMatrix, Mat2};

/// One atom of the spectral data: ν({s}) = weight, ψ(s) = psi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub s: f64,
    pub weight: f64,
    pub psi: Complex64,
}

/// Spectral data (ν, ψ): a finitely supported probability measure ν on
/// [0, ∞) together with the phase ψ on its atoms, |ψ| ≤ 1 and ψ(0) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub atoms: Vec<Atom>,
}

impl SpectralData {
    /// Check the defining constraints: atoms sorted with strictly
    /// increasing s ≥ 0, positive finite weights summing to 1 within 1e−10,
    /// |ψ| ≤ 1 + 1e−10, and ψ exactly zero on a zero atom.
    pub fn validate(&self) -> Result<()> {
        let mut total = 0.0;
        let mut prev = -1.0f64;
        for atom in &self.atoms {
            if !atom.s.is_finite() || atom.s < 0.0 {
                return Err(Error::InvalidMeasure("atom positions must be finite and nonnegative"));
            }
            if atom.s <= prev {
                return Err(Error::InvalidMeasure("atom positions must be strictly increasing"));
            }
            prev = atom.s;
            if !atom.weight.is_finite() || atom.weight <= 0.0 {
                return Err(Error::InvalidMeasure("atom weights must be finite and positive"));
            }
            if !atom.psi.re.is_finite() || !atom.psi.im.is_finite() {
                return Err(Error::InvalidMeasure("phase values must be finite"));
            }
            if atom.psi.norm() > 1.0 + 1e-10 {
                return Err(Error::InvalidMeasure("phase values must lie in the closed unit disk"));
            }
            if atom.s == 0.0 && atom.psi != Complex64::ZERO {
                return Err(Error::InvalidMeasure("phase must vanish exactly on the zero atom"));
            }
            total += atom.weight;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidMeasure("atom weights must sum to one"));
        }
        Ok(())
    }
}

/// Bookkeeping from `direct_map_with_info`: how often numerical guards
/// engaged. All zero on well-conditioned input.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DirectMapInfo {
    /// Singular values snapped to exactly zero (with ψ forced to zero).
    pub zero_snap_count: usize,
    /// Total weight removed by the atom-weight cutoff before renormalizing.
    pub dropped_mass: f64,
    /// Phases clamped back to the unit circle.
    pub clamped_psi_count: usize,
    /// Largest |ψ| − 1 excess seen before clamping.
    pub max_psi_excess: f64,
}

/// Direct map at truncation size n: spectral data of the n×n truncation.
pub fn direct_map(c: &JacobiCoefficients, n: usize, tol: &Tolerances) -> Result<SpectralData> {
    direct_map_with_info(c, n, tol).map(|(sd, _)| sd)
}

/// Direct map returning the numerical-guard bookkeeping alongside the data.
pub fn direct_map_with_info(
    c: &JacobiCoefficients,
    n: usize,
    tol: &Tolerances,
) -> Result<(SpectralData, DirectMapInfo)> {
    let j = dense_truncation(c, n)?;
    let h = j.adjoint().mul(&j);
    let eig = hermitian_eig(&h, tol)?;
    let scale = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
    let gap_threshold = tol.cluster_tol * scale.max(1.0);
    let snap_threshold = tol.rank_tol * (1.0 + scale.sqrt());

    let mut info = DirectMapInfo::default();
    let mut atoms: Vec<Atom> = Vec::new();
    let mut lo = 0;
    while lo < n {
        let mut hi = lo + 1;
        while hi < n && eig.eigenvalues[hi] - eig.eigenvalues[hi - 1] <= gap_threshold {
            hi += 1;
        }
        let lambda = eig.eigenvalues[lo..hi].iter().sum::<f64>() / (hi - lo) as f64;
        let mut weight = 0.0;
        let mut num = Complex64::ZERO;
        for i in lo..hi {
            let v = eig.eigenvectors.column(i);
            weight += v[0].norm_sqr();
            num += j.apply(&v)[0] * v[0].conj();
        }
        lo = hi;
        if weight < tol.atom_tol {
            info.dropped_mass += weight;
            continue;
        }
        let mut s = lambda.max(0.0).sqrt();
        let psi = if s <= snap_threshold {
            if s != 0.0 {
                info.zero_snap_count += 1;
            }
            s = 0.0;
            Complex64::ZERO
        } else {
            let mut psi = num / (s * weight);
            let excess = psi.norm() - 1.0;
            if excess > 0.0 {
                info.clamped_psi_count += 1;
                info.max_psi_excess = info.max_psi_excess.max(excess);
                psi /= psi.norm();
            }
            psi
        };
        atoms.push(Atom { s, weight, psi });
    }

    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    if total <= 0.0 {
        return Err(Error::InvalidMeasure("all spectral weight fell below the atom cutoff"));
    }
    for atom in atoms.iter_mut() {
        atom.weight /= total;
    }
    let sd = SpectralData { atoms };
    sd.validate()?;
    Ok((sd, info))
}

/// Weyl matrix of the spectral data at z off [0, ∞):
/// M₀₀ = Σ w/(s²−z), M₀₁ = Σ sψw/(s²−z), M₁₀ = Σ s·conj(ψ)·w/(s²−z),
/// M₁₁ = Σ s²w/(s²−z). Fails with `PoleProximity` when z is within the
/// scaled pole tolerance of some s².
pub fn weyl_m(sd: &SpectralData, z: Complex64, tol: &Tolerances) -> Result<Mat2> {
    let threshold = tol.pole_threshold(z.norm());
    let mut m = Mat2::zero();
    for atom in &sd.atoms {
        let denom = Complex64::new(atom.s * atom.s, 0.0) - z;
        let dist = denom.norm();
        if dist < threshold {
            return Err(Error::PoleProximity { distance: dist });
        }
        let w = Complex64::new(atom.weight, 0.0) / denom;
        let spsi = atom.s * atom.psi;
        m.e[0][0] += w;
        m.e[0][1] += spsi * w;
        m.e[1][0] += spsi.conj() * w;
        m.e[1][1] += Complex64::new(atom.s * atom.s, 0.0) * w;
    }
    Ok(m)
}

/// Compare the k-th even and odd power moments of the spectral data with
/// the matrix entries they must reproduce:
/// ∫x^{2k} dν = ((J*J)^k)₀₀ and ∫x^{2k+1}ψ dν = (J(J*J)^k)₀₀.
///
/// Requires truncation size n ≥ 2k + 2 so both entries are unaffected by
/// the truncation boundary. Returns (even residual, odd residual).
pub fn moment_check(
    c: &JacobiCoefficients,
    sd: &SpectralData,
    k: usize,
    _tol: &Tolerances,
) -> Result<(f64, f64)> {
    let n = c.n();
    if n < 2 * k + 2 {
        return Err(Error::TruncationTooSmall { needed: 2 * k + 2, actual: n });
    }
    let j = dense_truncation(c, n)?;
    let mut v = alloc::vec![Complex64::ZERO; n];
    v[0] = Complex64::ONE;
    for _ in 0..k {
        v = j.adjoint().apply(&j.apply(&v));
    }
    let even_entry = v[0];
    let odd_entry = j.apply(&v)[0];

    let mut even_sum = 0.0;
    let mut odd_sum = Complex64::ZERO;
    for atom in &sd.atoms {
        let s2k = atom.s.powi(2 * k as i32);
        even_sum += s2k * atom.weight;
        odd_sum += Complex64::new(s2k * atom.s * atom.weight, 0.0) * atom.psi;
    }
    Ok(((Complex64::new(even_sum, 0.0) - even_entry).norm(), (odd_sum - odd_entry).norm()))
}

/// Spectral norm of J·f(|J|) − f(|J*|)·J restricted to the first n − deg(f)
/// columns of the n×n truncation (the columns the truncation boundary
/// cannot reach). Zero for the untruncated operator.
pub fn intertwining_check(
    c: &JacobiCoefficients,
    n: usize,
    f: &[f64],
    tol: &Tolerances,
) -> Result<f64> {
    let deg = f.len().saturating_sub(1);
    if n < 2 * deg + 2 {
        return Err(Error::TruncationTooSmall { needed: 2 * deg + 2, actual: n });
    }
    let j = dense_truncation(c, n)?;
    let eval = |x: f64| f.iter().rev().fold(0.0, |acc, &coef| acc * x + coef);
    let func_of = |g: &DenseMatrix| -> Result<DenseMatrix> {
        let eig = hermitian_eig(g, tol)?;
        let fvals: Vec<f64> = eig.eigenvalues.iter().map(|&l| eval(l.max(0.0).sqrt())).collect();
        let v = &eig.eigenvectors;
        Ok(DenseMatrix::from_fn(n, |i, kk| {
            let mut acc = Complex64::ZERO;
            for (m, fv) in fvals.iter().enumerate() {
                acc += v[(i, m)] * *fv * v[(kk, m)].conj();
            }
            acc
        }))
    };
    let f_abs_j = func_of(&j.adjoint().mul(&j))?;
    let f_abs_jstar = func_of(&j.mul(&j.adjoint()))?;
    let d = j.mul(&f_abs_j).sub(&f_abs_jstar.mul(&j));

    // Gram matrix of the first n − deg columns; norm = √λ_max.
    let cols = n - deg;
    let gram = DenseMatrix::from_fn(cols, |p, q| {
        let mut acc = Complex64::ZERO;
        for kk in 0..n {
            acc += d[(kk, p)].conj() * d[(kk, q)];
        }
        acc
    });
    let eig = hermitian_eig(&gram, tol)?;
    Ok(eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// Rank deficiency of the Krylov family {(J*J)^k δ₀, (J*J)^k J*δ₀ : k ≤ n}
/// inside ℂⁿ. Zero means δ₀ is cyclic for the pair (J*J, J*) at size n.
pub fn cyclicity_check(c: &JacobiCoefficients, n: usize, tol: &Tolerances) -> Result<usize> {
    let j = dense_truncation(c, n)?;
    let h = j.adjoint();
    let apply_h2 = |v: &[Complex64]| h.apply(&j.apply(v));

    let norm = |v: &[Complex64]| v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let normalize = |v: &mut [Complex64]| {
        let nm = norm(v);
        if nm > 0.0 {
            for x in v.iter_mut() {
                *x /= nm;
            }
        }
    };

    let mut e0 = alloc::vec![Complex64::ZERO; n];
    e0[0] = Complex64::ONE;
    let seed1 = h.apply(&e0);

    // Build the two Krylov chains, renormalizing to keep scale flat.
    let mut candidates: Vec<Vec<Complex64>> = Vec::with_capacity(2 * (n + 1));
    let mut u = e0;
    let mut w = seed1;
    normalize(&mut w);
    for _ in 0..=n {
        candidates.push(u.clone());
        candidates.push(w.clone());
        u = apply_h2(&u);
        normalize(&mut u);
        w = apply_h2(&w);
        normalize(&mut w);
    }

    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for mut cand in candidates {
        if norm(&cand) == 0.0 {
            continue;
        }
        normalize(&mut cand);
        // Two Gram-Schmidt passes for a reliable small residual.
        for _ in 0..2 {
            for b in &basis {
                let proj: Complex64 = b.iter().zip(&cand).map(|(x, y)| x.conj() * y).sum();
                for (ci, bi) in cand.iter_mut().zip(b) {
                    *ci -= proj * bi;
                }
            }
        }
        if norm(&cand) > tol.rank_tol {
            normalize(&mut cand);
            basis.push(cand);
            if basis.len() == n {
                break;
            }
        }
    }
    Ok(n - basis.len())
}
