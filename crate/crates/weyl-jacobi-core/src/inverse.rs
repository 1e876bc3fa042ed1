//! Inverse spectral transform: from the symmetric 2×2 matrix measure back
//! to Jacobi coefficients. Block Lanczos on the measure produces block
//! coefficients in an arbitrary gauge; the gauge fixing walk rotates them
//! into the canonical antidiagonal form, which is the scalar data (a, b).

use alloc::vec::Vec;

use num_complex::Complex64;
// Trait-based f64 math for builds without std; the test harness links
// std, whose inherent methods shadow these.
#[allow(unused_imports)]
use num_traits::Float;

use crate::direct::SpectralData;
use crate::error::{Error, Result, Tolerances};
use crate::jacobi::{BlockCoefficients, JacobiCoefficients};
use crate::matops::{spectral_norm_2x2, Mat2};
use crate::measure::{moments, stieltjes, to_matrix_measure, DiscreteMatrixMeasure};

/// How a block Lanczos run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LanczosTermination {
    /// Produced the full requested number of diagonal blocks.
    ReachedDepth,
    /// The residual Gram matrix lost rank while producing A at this step;
    /// the returned blocks stop there (finite-rank measure exhausted).
    TerminatedAtRank { step: usize },
}

/// Per-step diagnostics of the gauge fixing walk. `w[n]` is the unitary
/// applied at block n, with `w[0] = I` exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeTrace {
    pub w: Vec<Mat2>,
    /// ‖CC* − c²I‖_F at each off-diagonal step.
    pub scalar_polar_defects: Vec<f64>,
    /// |T₀₀| + |T₁₁| of each rotated diagonal block.
    pub antidiagonality_defects: Vec<f64>,
    /// |T₁₀ − conj(T₀₁)| of each rotated diagonal block.
    pub conjugacy_defects: Vec<f64>,
}

impl GaugeTrace {
    /// Largest defect of any kind across all steps.
    pub fn max_defect(&self) -> f64 {
        self.scalar_polar_defects
            .iter()
            .chain(&self.antidiagonality_defects)
            .chain(&self.conjugacy_defects)
            .fold(0.0f64, |acc, &d| acc.max(d))
    }
}

/// Result of the full inverse transform.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseResult {
    pub coefficients: JacobiCoefficients,
    pub trace: GaugeTrace,
    pub termination: LanczosTermination,
}

fn ip(p: &[Mat2], q: &[Mat2]) -> Mat2 {
    let mut acc = Mat2::zero();
    for (pj, qj) in p.iter().zip(q) {
        acc = acc + pj.adjoint() * *qj;
    }
    acc
}

/// Block Lanczos recurrence for the matrix measure, run in the √W-scaled
/// representation: layer n stores q_n(x_j) = √(W_j)·p_n(x_j) so that plain
/// sums Σ q† q realize the L²(μ) inner product and no per-atom weight
/// matrix has to be inverted.
///
/// Returns the block coefficients (B_0.., A_0..) and how the run ended.
/// Rank loss is not an error: the returned blocks always satisfy the
/// length convention.
pub fn block_lanczos(
    m: &DiscreteMatrixMeasure,
    depth: usize,
    tol: &Tolerances,
) -> Result<(BlockCoefficients, LanczosTermination)> {
    if depth == 0 {
        return Err(Error::DimensionTooLarge { requested: 0, available: m.atoms.len() });
    }
    let m0 = moments(m, 0);
    let m0_inv_sqrt = m0
        .psd_sqrt()
        .inverse()
        .ok_or(Error::InvalidMeasure("total mass must be invertible"))?;
    let sqw: Vec<Mat2> = m.atoms.iter().map(|a| a.w.psd_sqrt()).collect();
    let xs: Vec<f64> = m.atoms.iter().map(|a| a.x).collect();

    let scale_by_x = |layer: &[Mat2]| -> Vec<Mat2> {
        layer
            .iter()
            .zip(&xs)
            .map(|(q, &x)| q.scale(Complex64::new(x, 0.0)))
            .collect()
    };

    let mut layers: Vec<Vec<Mat2>> = Vec::with_capacity(depth);
    layers.push(sqw.iter().map(|s| *s * m0_inv_sqrt).collect());

    let mut a_blocks: Vec<Mat2> = Vec::new();
    let mut b_blocks: Vec<Mat2> = Vec::new();
    let mut termination = LanczosTermination::ReachedDepth;

    for n in 0..depth {
        let qn = &layers[n];
        let xqn = scale_by_x(qn);
        b_blocks.push(ip(qn, &xqn).hermitian_part());
        if n + 1 == depth {
            break;
        }
        let mut r = xqn;
        // Two full orthogonalization passes: in exact arithmetic only the
        // last two layers project nontrivially, the rest absorbs rounding.
        for _ in 0..2 {
            for layer in &layers {
                let proj = ip(layer, &r);
                for (rj, lj) in r.iter_mut().zip(layer) {
                    *rj = *rj - *lj * proj;
                }
            }
        }
        let gram = ip(&r, &r).hermitian_part();
        let (lo, hi) = gram.hermitian_eigenvalues();
        if lo < tol.rank_tol * (1.0 + hi.max(0.0)) {
            termination = LanczosTermination::TerminatedAtRank { step: n };
            break;
        }
        let a = gram.psd_sqrt();
        // a is invertible here: det(√G) = √(det G) > 0 past the rank check.
        let a_inv = a.inverse().ok_or(Error::SingularBlock { c: 0.0 })?;
        a_blocks.push(a);
        layers.push(r.iter().map(|rj| *rj * a_inv).collect());
    }

    Ok((BlockCoefficients { a_blocks, b_blocks }, termination))
}

/// Rotate block coefficients into the canonical antidiagonal gauge and read
/// off the scalar coefficients: at each step the rotated diagonal block
/// must be antidiagonal (b_n on the corner) and the rotated off-diagonal
/// block must be a scalar multiple of a unitary, which fixes a_n and the
/// next rotation.
///
/// A singular off-diagonal block ends the walk early with a consistent
/// truncated output; a non-scalar polar factor is a genuine failure and
/// propagates.
pub fn gauge_fix(bc: &BlockCoefficients, tol: &Tolerances) -> Result<(JacobiCoefficients, GaugeTrace)> {
    let mut trace = GaugeTrace {
        w: alloc::vec![Mat2::identity()],
        scalar_polar_defects: Vec::new(),
        antidiagonality_defects: Vec::new(),
        conjugacy_defects: Vec::new(),
    };
    let mut a: Vec<f64> = Vec::with_capacity(bc.a_blocks.len());
    let mut b: Vec<Complex64> = Vec::with_capacity(bc.b_blocks.len());

    for (n, b_block) in bc.b_blocks.iter().enumerate() {
        let w = trace.w[n];
        let t = w.adjoint() * *b_block * w;
        let bn = t.e[0][1];
        b.push(bn);
        trace.antidiagonality_defects.push(t.e[0][0].norm() + t.e[1][1].norm());
        trace.conjugacy_defects.push((t.e[1][0] - bn.conj()).norm());
        if n == bc.a_blocks.len() {
            break;
        }
        let c = w.adjoint() * bc.a_blocks[n];
        let cc = c * c.adjoint();
        let cval = cc.e[0][0].re.max(0.0).sqrt();
        trace
            .scalar_polar_defects
            .push((cc - Mat2::identity().scale(Complex64::new(cval * cval, 0.0))).frobenius());
        match crate::matops::polar_scalar_unitary(&c, tol) {
            Ok((an, u)) => {
                a.push(an);
                trace.w.push(u.adjoint() * Mat2::sigma1());
            }
            Err(Error::SingularBlock { .. }) => break,
            Err(e) => return Err(e),
        }
    }

    let coefficients = JacobiCoefficients::new(a, b)?;
    Ok((coefficients, trace))
}

/// Full inverse transform: spectral data → matrix measure → block Lanczos
/// → gauge fixing.
pub fn inverse_map(sd: &SpectralData, depth: usize, tol: &Tolerances) -> Result<InverseResult> {
    let m = to_matrix_measure(sd);
    let (bc, termination) = block_lanczos(&m, depth, tol)?;
    let (coefficients, trace) = gauge_fix(&bc, tol)?;
    Ok(InverseResult { coefficients, trace, termination })
}

/// Leading coefficients directly from the first two moments:
/// b₀ = (m₁)₀₁ and a₀ = √((m₂)₀₀ − |b₀|²). A radicand below −1e−10 means
/// the measure is not the spectral measure of any Jacobi matrix; small
/// negative values are rounding and clamp to zero.
pub fn leading_from_moments(m: &DiscreteMatrixMeasure, _tol: &Tolerances) -> Result<(Complex64, f64)> {
    let b0 = moments(m, 1).e[0][1];
    let radicand = moments(m, 2).e[0][0].re - b0.norm_sqr();
    if radicand < -1e-10 {
        return Err(Error::InvalidMeasure("second moment too small for the first moment"));
    }
    Ok((b0, radicand.max(0.0).sqrt()))
}

/// Weyl matrix 𝓡(z) of the matrix measure: the corner of the resolvent of
/// the embedded block operator, which is exactly the Stieltjes transform.
pub fn weyl_r(m: &DiscreteMatrixMeasure, z: Complex64, tol: &Tolerances) -> Result<Mat2> {
    stieltjes(m, z, tol)
}

/// One coefficient stripping step on a Weyl matrix value: given 𝓡(z) of
/// the operator with leading coefficients (b₀, a₀), produce 𝓡(z) of the
/// operator with the first row and column removed:
///
///   𝓡₁ = (−1/a₀²)·[[d𝓡₀₀ + z, −d𝓡₁₀ − conj(b₀)], [−d𝓡₀₁ − b₀, d𝓡₁₁ + z]],
///   d = 1/det 𝓡.
///
/// det 𝓡 decays like 1/z², so the singularity guard scales accordingly.
pub fn strip_weyl(
    r_value: &Mat2,
    z: Complex64,
    b0: Complex64,
    a0: f64,
    tol: &Tolerances,
) -> Result<Mat2> {
    if a0 <= tol.rank_tol {
        return Err(Error::SingularBlock { c: a0 });
    }
    let det = r_value.det();
    let zn = z.norm();
    if det.norm() <= tol.pole_tol / ((1.0 + zn) * (1.0 + zn)) {
        return Err(Error::SingularWeylValue { det_abs: det.norm() });
    }
    let d = Complex64::ONE / det;
    let factor = Complex64::new(-1.0 / (a0 * a0), 0.0);
    Ok(Mat2::new([
        [
            (d * r_value.e[0][0] + z) * factor,
            (-d * r_value.e[1][0] - b0.conj()) * factor,
        ],
        [
            (-d * r_value.e[0][1] - b0) * factor,
            (d * r_value.e[1][1] + z) * factor,
        ],
    ]))
}

/// Least-squares decay fit of the large-z expansion defect
/// E(z) = 𝓡(z) + I/z + B₀/z² + (a₀²I + B₀²)/z³ along a ray. For a true
/// spectral measure with leading coefficients (b₀, a₀) the defect decays
/// at least like |z|⁻⁴.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionFit {
    /// Fitted log-log slope of ‖E(z)‖ against |z|.
    pub slope: f64,
    pub intercept: f64,
    pub points_kept: usize,
    /// The kept points span fewer than two decades, so the slope estimate
    /// deserves little confidence.
    pub wide_confidence: bool,
}

/// Fit the decay order of the expansion defect at the given radii along
/// the ray of angle `ray_angle`. Points below the rounding floor of the
/// evaluated terms are discarded; fewer than two surviving points is a
/// degenerate fit.
pub fn expansion_check(
    m: &DiscreteMatrixMeasure,
    b0: Complex64,
    a0: f64,
    radii: &[f64],
    ray_angle: f64,
    tol: &Tolerances,
) -> Result<ExpansionFit> {
    let mut b0_block = Mat2::zero();
    b0_block.e[0][1] = b0;
    b0_block.e[1][0] = b0.conj();
    let third = Mat2::identity().scale(Complex64::new(a0 * a0, 0.0)) + b0_block * b0_block;

    let mut logs: Vec<(f64, f64)> = Vec::new();
    for &radius in radii {
        let z = Complex64::from_polar(radius, ray_angle);
        let r = weyl_r(m, z, tol)?;
        let zinv = Complex64::ONE / z;
        let e = r + Mat2::identity().scale(zinv)
            + b0_block.scale(zinv * zinv)
            + third.scale(zinv * zinv * zinv);
        let err = spectral_norm_2x2(&e);
        let floor = 100.0
            * f64::EPSILON
            * (spectral_norm_2x2(&r)
                + zinv.norm()
                + spectral_norm_2x2(&b0_block) * zinv.norm_sqr()
                + spectral_norm_2x2(&third) * zinv.norm_sqr() * zinv.norm());
        if err > floor {
            logs.push((radius.log10(), err.log10()));
        }
    }
    if logs.len() < 2 {
        return Err(Error::DegenerateFit);
    }
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::DegenerateFit);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let span = logs.last().unwrap().0 - logs[0].0;
    Ok(ExpansionFit {
        slope,
        intercept,
        points_kept: logs.len(),
        wide_confidence: span < 2.0,
    })
}
