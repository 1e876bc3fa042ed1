//! Spectral-data analysis: the two-sided decay comparison of Weyl matrices
//! that localizes the first coefficient disagreement of two operators,
//! coefficient-continuity diagnostics, and classification of spectral data.

use alloc::vec::Vec;

use num_complex::Complex64;
// Trait-based f64 math for builds without std; the test harness links
// std, whose inherent methods shadow these.
#[allow(unused_imports)]
use num_traits::Float;

use crate::direct::{direct_map, weyl_m, SpectralData};
use crate::error::{Error, Result, Tolerances};
use crate::jacobi::{dense_truncation, JacobiCoefficients};
use crate::matops::{quarter_power_scaling, spectral_norm_2x2};

/// Default ray for decay fits: straight up the negative real axis of the
/// squared-variable plane.
pub const DEFAULT_RAY_ANGLE: f64 = core::f64::consts::PI;

/// Logarithmically spaced radii from r0 to r1 inclusive.
pub fn log_spaced(r0: f64, r1: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return alloc::vec![r0];
    }
    let (l0, l1) = (r0.log10(), r1.log10());
    (0..count)
        .map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (count - 1) as f64))
        .collect()
}

/// Default radii for decay fits: 10¹..10⁵, nine points, log spaced.
pub fn default_radii() -> Vec<f64> {
    log_spaced(10.0, 1e5, 9)
}

/// Log-log decay fit of a Weyl-matrix difference along a ray.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    /// Fitted decay order; −∞ when the difference sat below the rounding
    /// floor at too many radii (numerically identical data).
    pub slope: f64,
    pub intercept: f64,
    /// Largest deviation of a kept point from the fitted line (log10).
    pub max_deviation: f64,
    pub ray_angle: f64,
    /// The radii that survived the rounding floor and entered the fit.
    pub radii: Vec<f64>,
}

/// Fit the decay order of D(w) = ‖Q(w)·(M(w) − M̃(w))·Q(w)‖ along the ray
/// of angle `ray_angle`, where Q is the quarter-power scaling and M, M̃ are
/// the Weyl matrices of the two spectral data sets. The decay order drops
/// by one for each leading coefficient the two operators share.
///
/// Requires at least four radii spanning at least two decades. Points
/// within a factor 100·ε of the scaled Weyl matrices themselves are
/// rounding noise and are dropped; if fewer than four points survive, the
/// data sets are numerically identical along the ray and the fit reports
/// slope −∞ instead of failing.
pub fn borg_marchenko_fit(
    sd1: &SpectralData,
    sd2: &SpectralData,
    ray_angle: f64,
    radii: &[f64],
    tol: &Tolerances,
) -> Result<DecayFit> {
    if radii.len() < 4
        || !radii.windows(2).all(|w| w[0] < w[1])
        || radii[0] <= 0.0
        || (radii[radii.len() - 1] / radii[0]).log10() < 2.0
    {
        return Err(Error::DegenerateFit);
    }
    let mut kept: Vec<(f64, f64, f64)> = Vec::new();
    for &radius in radii {
        let w = Complex64::from_polar(radius, ray_angle);
        let q = quarter_power_scaling(w, tol)?;
        let m1 = q * weyl_m(sd1, w, tol)? * q;
        let m2 = q * weyl_m(sd2, w, tol)? * q;
        let d = spectral_norm_2x2(&(m1 - m2));
        let floor = 100.0 * f64::EPSILON * spectral_norm_2x2(&m1).max(spectral_norm_2x2(&m2));
        if d > floor {
            kept.push((radius, radius.log10(), d.log10()));
        }
    }
    if kept.len() < 4 {
        return Ok(DecayFit {
            slope: f64::NEG_INFINITY,
            intercept: f64::NEG_INFINITY,
            max_deviation: 0.0,
            ray_angle,
            radii: kept.iter().map(|p| p.0).collect(),
        });
    }
    let n = kept.len() as f64;
    let sx: f64 = kept.iter().map(|p| p.1).sum();
    let sy: f64 = kept.iter().map(|p| p.2).sum();
    let sxx: f64 = kept.iter().map(|p| p.1 * p.1).sum();
    let sxy: f64 = kept.iter().map(|p| p.1 * p.2).sum();
    let denom = n * sxx - sx * sx;
    if denom <= 0.0 {
        return Err(Error::DegenerateFit);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let max_deviation = kept
        .iter()
        .map(|p| (p.2 - slope * p.1 - intercept).abs())
        .fold(0.0f64, f64::max);
    Ok(DecayFit {
        slope,
        intercept,
        max_deviation,
        ray_angle,
        radii: kept.iter().map(|p| p.0).collect(),
    })
}

/// Test functions for weak-convergence residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BankFunction {
    /// 1/(1 + (x − center)²).
    RationalBump { center: f64 },
    /// exp(−(x − center)²).
    Gaussian { center: f64 },
}

impl BankFunction {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BankFunction::RationalBump { center } => {
                let d = x - center;
                1.0 / (1.0 + d * d)
            }
            BankFunction::Gaussian { center } => {
                let d = x - center;
                (-d * d).exp()
            }
        }
    }
}

/// Six standard test functions: rational bumps and Gaussians centered at
/// 0, 1, 2.
pub fn standard_bank() -> Vec<BankFunction> {
    let mut bank = Vec::with_capacity(6);
    for c in 0..3 {
        bank.push(BankFunction::RationalBump { center: c as f64 });
    }
    for c in 0..3 {
        bank.push(BankFunction::Gaussian { center: c as f64 });
    }
    bank
}

/// Weak-convergence residuals of one sequence member against the limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityResidual {
    /// Σ over the bank of |∫f dν_N − ∫f dν|.
    pub nu_residual: f64,
    /// Σ over the bank of |∫f·ψ dν_N − ∫f·ψ dν|.
    pub psi_residual: f64,
    /// max_k ‖(J_N − J)δ_k‖ over columns k < n − 1 of the truncations:
    /// direct operator convergence, for comparison with the weak residuals.
    pub strong_surrogate: f64,
}

/// Evaluate the weak-convergence residuals of each sequence member against
/// the limit coefficients, at truncation size n, summed over the test bank.
pub fn continuity_check(
    sequence: &[JacobiCoefficients],
    limit: &JacobiCoefficients,
    bank: &[BankFunction],
    n: usize,
    tol: &Tolerances,
) -> Result<Vec<ContinuityResidual>> {
    let limit_sd = direct_map(limit, n, tol)?;
    let limit_j = dense_truncation(limit, n)?;
    let integrals = |sd: &SpectralData| -> Vec<(f64, Complex64)> {
        bank.iter()
            .map(|f| {
                let mut nu = 0.0;
                let mut psi = Complex64::ZERO;
                for atom in &sd.atoms {
                    let fv = f.eval(atom.s) * atom.weight;
                    nu += fv;
                    psi += atom.psi * fv;
                }
                (nu, psi)
            })
            .collect()
    };
    let limit_ints = integrals(&limit_sd);

    let mut out = Vec::with_capacity(sequence.len());
    for member in sequence {
        let sd = direct_map(member, n, tol)?;
        let ints = integrals(&sd);
        let mut nu_residual = 0.0;
        let mut psi_residual = 0.0;
        for ((nu, psi), (nu0, psi0)) in ints.iter().zip(&limit_ints) {
            nu_residual += (nu - nu0).abs();
            psi_residual += (psi - psi0).norm();
        }
        let j = dense_truncation(member, n)?;
        let mut strong_surrogate = 0.0f64;
        for k in 0..n.saturating_sub(1) {
            let mut col = 0.0;
            for i in 0..n {
                col += (j[(i, k)] - limit_j[(i, k)]).norm_sqr();
            }
            strong_surrogate = strong_surrogate.max(col.sqrt());
        }
        out.push(ContinuityResidual { nu_residual, psi_residual, strong_surrogate });
    }
    Ok(out)
}

/// Classification of spectral data by its phase function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification {
    /// ψ is real on every atom: the data belongs to a self-adjoint matrix.
    pub self_adjoint: bool,
    /// ψ vanishes on every atom: the data belongs to a zero diagonal
    /// (implies `self_adjoint`).
    pub free_diagonal: bool,
    pub max_im_psi: f64,
    /// Largest |ψ| over atoms at s > 0.
    pub max_abs_psi: f64,
}

/// Classify spectral data by its phase: real phase means self-adjoint,
/// vanishing phase means zero diagonal.
pub fn classify(sd: &SpectralData, tol: f64) -> Classification {
    let mut max_im_psi = 0.0f64;
    let mut max_abs_psi = 0.0f64;
    for atom in &sd.atoms {
        max_im_psi = max_im_psi.max(atom.psi.im.abs());
        if atom.s > 0.0 {
            max_abs_psi = max_abs_psi.max(atom.psi.norm());
        }
    }
    let self_adjoint = max_im_psi <= tol;
    Classification {
        self_adjoint,
        free_diagonal: self_adjoint && max_abs_psi <= tol,
        max_im_psi,
        max_abs_psi,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direct::Atom;
    use crate::inverse::weyl_r;
    use crate::measure::to_matrix_measure;
    use crate::testutil::SplitMix64;

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn coeffs(a: &[f64], b: &[Complex64]) -> JacobiCoefficients {
        JacobiCoefficients::new(a.to_vec(), b.to_vec()).unwrap()
    }

    fn sd_of(c: &JacobiCoefficients) -> SpectralData {
        direct_map(c, c.n(), &tol()).unwrap()
    }

    /// Two coefficient sets agreeing up to diagonal index k, differing at
    /// b_{k+1}.
    fn diagonal_pair(k: usize) -> (JacobiCoefficients, JacobiCoefficients) {
        let a = alloc::vec![1.0; k + 1];
        let shared = alloc::vec![c64(0.3, 0.2); k + 1];
        let mut b1 = shared.clone();
        b1.push(c64(0.5, 0.1));
        let mut b2 = shared;
        b2.push(c64(-0.4, 0.6));
        (
            JacobiCoefficients::new(a.clone(), b1).unwrap(),
            JacobiCoefficients::new(a, b2).unwrap(),
        )
    }

    // ---------- decay fits ----------

    #[test]
    fn decay_order_tracks_first_diagonal_disagreement() {
        // Operators differing first at b_m produce decay order −(m + 1).
        for k in 0..4usize {
            let (c1, c2) = diagonal_pair(k);
            let fit = borg_marchenko_fit(
                &sd_of(&c1),
                &sd_of(&c2),
                DEFAULT_RAY_ANGLE,
                &default_radii(),
                &tol(),
            )
            .unwrap();
            let want = -((k + 2) as f64);
            assert!(
                (fit.slope - want).abs() <= 0.2,
                "k={k}: slope {:.4}, want {want}",
                fit.slope
            );
            assert!(fit.radii.len() >= 4);
        }
    }

    #[test]
    fn decay_order_for_leading_disagreement() {
        let c1 = coeffs(&[1.0], &[c64(0.0, 1.0), Complex64::ZERO]);
        let c2 = coeffs(&[1.0], &[c64(0.0, 0.5), Complex64::ZERO]);
        let fit = borg_marchenko_fit(
            &sd_of(&c1),
            &sd_of(&c2),
            DEFAULT_RAY_ANGLE,
            &default_radii(),
            &tol(),
        )
        .unwrap();
        assert!((fit.slope + 1.0).abs() <= 0.2, "slope {:.4}", fit.slope);
    }

    #[test]
    fn decay_order_for_tail_diagonal_entry() {
        let c1 = coeffs(&[1.0, 1.0], &[c64(0.0, 1.0), Complex64::ZERO, Complex64::ZERO]);
        let c2 = coeffs(&[1.0, 1.0], &[c64(0.0, 1.0), Complex64::ZERO, Complex64::ONE]);
        let fit = borg_marchenko_fit(
            &sd_of(&c1),
            &sd_of(&c2),
            DEFAULT_RAY_ANGLE,
            &default_radii(),
            &tol(),
        )
        .unwrap();
        assert!((fit.slope + 3.0).abs() <= 0.2, "slope {:.4}", fit.slope);
    }

    #[test]
    fn decay_order_for_off_diagonal_disagreement() {
        // A first disagreement at a_m sits between the diagonal orders:
        // decay order −(m + 1.5).
        for k in 0..2usize {
            let b = alloc::vec![c64(0.3, 0.2); k + 3];
            let a1 = alloc::vec![1.0; k + 2];
            let mut a2 = alloc::vec![1.0; k + 1];
            a2.push(1.5);
            let c1 = JacobiCoefficients::new(a1, b.clone()).unwrap();
            let c2 = JacobiCoefficients::new(a2, b).unwrap();
            let fit = borg_marchenko_fit(
                &sd_of(&c1),
                &sd_of(&c2),
                DEFAULT_RAY_ANGLE,
                &default_radii(),
                &tol(),
            )
            .unwrap();
            let want = -((k + 1) as f64 + 1.5);
            assert!(
                (fit.slope - want).abs() <= 0.2,
                "k={k}: slope {:.4}, want {want}",
                fit.slope
            );
        }
    }

    #[test]
    fn refinement_steps_are_close_to_one() {
        let mut slopes = Vec::new();
        for k in 0..4usize {
            let (c1, c2) = diagonal_pair(k);
            let fit = borg_marchenko_fit(
                &sd_of(&c1),
                &sd_of(&c2),
                DEFAULT_RAY_ANGLE,
                &default_radii(),
                &tol(),
            )
            .unwrap();
            slopes.push(fit.slope);
        }
        for pair in slopes.windows(2) {
            let step = pair[0] - pair[1];
            assert!((step - 1.0).abs() <= 0.3, "refinement step {step:.3}");
        }
    }

    #[test]
    fn identical_data_reports_sentinel() {
        let c = coeffs(&[1.0], &[c64(0.0, 1.0), Complex64::ZERO]);
        let fit = borg_marchenko_fit(
            &sd_of(&c),
            &sd_of(&c),
            DEFAULT_RAY_ANGLE,
            &default_radii(),
            &tol(),
        )
        .unwrap();
        assert!(fit.slope.is_infinite() && fit.slope < 0.0);
        assert!(fit.radii.is_empty());
    }

    #[test]
    fn rejects_narrow_or_sparse_radii() {
        let c1 = coeffs(&[1.0], &[c64(0.0, 1.0), Complex64::ZERO]);
        let c2 = coeffs(&[1.0], &[Complex64::ZERO, Complex64::ZERO]);
        let narrow = log_spaced(10.0, 50.0, 5);
        assert!(matches!(
            borg_marchenko_fit(&sd_of(&c1), &sd_of(&c2), DEFAULT_RAY_ANGLE, &narrow, &tol()),
            Err(Error::DegenerateFit)
        ));
        let sparse = log_spaced(10.0, 1e5, 3);
        assert!(matches!(
            borg_marchenko_fit(&sd_of(&c1), &sd_of(&c2), DEFAULT_RAY_ANGLE, &sparse, &tol()),
            Err(Error::DegenerateFit)
        ));
    }

    #[test]
    fn scaled_difference_matches_measure_side_difference() {
        // ‖Q(M − M̃)Q‖ at w = z² equals ‖𝓡(z) − 𝓡̃(z)‖ exactly.
        let c1 = coeffs(&[1.0], &[c64(0.0, 1.0), Complex64::ZERO]);
        let c2 = coeffs(&[1.0], &[Complex64::ZERO, Complex64::ZERO]);
        let sd1 = sd_of(&c1);
        let sd2 = sd_of(&c2);
        let m1 = to_matrix_measure(&sd1);
        let m2 = to_matrix_measure(&sd2);
        let t = tol();
        let mut rng = SplitMix64(0x2b2b);
        for _ in 0..10 {
            let z = Complex64::from_polar(rng.range(0.5, 20.0), rng.range(0.1, 1.4));
            let w = z * z;
            let q = quarter_power_scaling(w, &t).unwrap();
            let lhs = spectral_norm_2x2(
                &(q * (weyl_m(&sd1, w, &t).unwrap() - weyl_m(&sd2, w, &t).unwrap()) * q),
            );
            let rhs = spectral_norm_2x2(
                &(weyl_r(&m1, z, &t).unwrap() - weyl_r(&m2, z, &t).unwrap()),
            );
            assert!(
                (lhs - rhs).abs() <= 1e-10 * rhs.max(1e-30),
                "lhs {lhs:.3e} vs rhs {rhs:.3e}"
            );
        }
    }

    // ---------- continuity ----------

    #[test]
    fn diagonal_perturbations_converge_weakly() {
        let a = alloc::vec![2.0; 5];
        let mut b = alloc::vec![Complex64::ZERO; 6];
        b[0] = c64(0.0, 1.0);
        let limit = JacobiCoefficients::new(a.clone(), b.clone()).unwrap();
        let ns = [1usize, 2, 3, 4, 5, 6, 8, 10, 16, 32, 64, 128, 256, 512, 1000];
        let sequence: Vec<JacobiCoefficients> = ns
            .iter()
            .map(|&n| {
                let mut bn = b.clone();
                bn[0] += Complex64::new(1.0 / n as f64, 0.0);
                JacobiCoefficients::new(a.clone(), bn).unwrap()
            })
            .collect();
        let res =
            continuity_check(&sequence, &limit, &standard_bank(), 6, &tol()).unwrap();
        for (i, (&n, r)) in ns.iter().zip(&res).enumerate() {
            assert!(
                (r.strong_surrogate - 1.0 / n as f64).abs() < 1e-12,
                "surrogate at N={n}"
            );
            if i > 0 {
                assert!(
                    r.nu_residual < res[i - 1].nu_residual,
                    "nu residual not decreasing at N={n}"
                );
                assert!(
                    r.psi_residual < res[i - 1].psi_residual,
                    "psi residual not decreasing at N={n}"
                );
            }
        }
        let last = res.last().unwrap();
        assert!(last.nu_residual < 1e-3, "nu residual {:.3e}", last.nu_residual);
        assert!(last.psi_residual < 1e-3, "psi residual {:.3e}", last.psi_residual);
    }

    // ---------- classification ----------

    #[test]
    fn classify_real_diagonal_as_self_adjoint() {
        let mut rng = SplitMix64(0x7ea1);
        for _ in 0..10 {
            let n = rng.int_range(1, 12);
            let a: Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.range(0.5, 2.0)).collect();
            let b: Vec<Complex64> = (0..n).map(|_| c64(rng.range(-2.0, 2.0), 0.0)).collect();
            let c = JacobiCoefficients::new(a, b).unwrap();
            let cls = classify(&sd_of(&c), 1e-10);
            assert!(cls.self_adjoint, "max_im_psi {:.3e}", cls.max_im_psi);
        }
    }

    #[test]
    fn classify_zero_diagonal_as_free() {
        let c = coeffs(&[1.3, 0.7, 1.9], &[Complex64::ZERO; 4]);
        let cls = classify(&sd_of(&c), 1e-10);
        assert!(cls.free_diagonal && cls.self_adjoint);
    }

    #[test]
    fn classify_golden_as_neither() {
        let c = coeffs(&[1.0], &[c64(0.0, 1.0), Complex64::ZERO]);
        let cls = classify(&sd_of(&c), 1e-10);
        assert!(!cls.self_adjoint && !cls.free_diagonal);
        assert!((cls.max_im_psi - 1.0).abs() < 1e-12);
        assert!((cls.max_abs_psi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn free_diagonal_implies_self_adjoint() {
        let sd = SpectralData {
            atoms: alloc::vec![Atom { s: 1.0, weight: 1.0, psi: c64(0.0, 0.5) }],
        };
        let cls = classify(&sd, 1e-10);
        assert!(!cls.self_adjoint && !cls.free_diagonal);
    }
}
