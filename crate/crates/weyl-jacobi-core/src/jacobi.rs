//! Half-line Jacobi matrices with positive off-diagonal and complex
//! diagonal: coefficient containers, dense truncations, the 2×2 block
//! embedding, Wronskians, and resolvent corners of the embedded operator.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result, Tolerances};
use crate::matops::{linear_solve, DenseMatrix, Mat2};

/// Coefficients (a, b) of a half-line Jacobi matrix J(a, b): both
/// off-diagonals carry a_n > 0 (no conjugation, so J is complex symmetric),
/// the diagonal carries b_n ∈ ℂ. Stores a finite prefix with the length
/// convention |b| = |a| + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiCoefficients {
    a: Vec<f64>,
    b: Vec<Complex64>,
}

impl JacobiCoefficients {
    pub fn new(a: Vec<f64>, b: Vec<Complex64>) -> Result<Self> {
        if b.len() != a.len() + 1 {
            return Err(Error::InvalidCoefficients(
                "need exactly one more diagonal entry than off-diagonal entries",
            ));
        }
        if !a.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(Error::InvalidCoefficients(
                "off-diagonal entries must be finite and strictly positive",
            ));
        }
        if !b.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::InvalidCoefficients("diagonal entries must be finite"));
        }
        Ok(JacobiCoefficients { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    /// Number of stored diagonal entries (largest valid truncation size).
    pub fn n(&self) -> usize {
        self.b.len()
    }
}

/// Coefficients of a block Jacobi matrix with 2×2 blocks: sub-diagonal
/// blocks A_n (invertible), diagonal blocks B_n (Hermitian), super-diagonal
/// blocks A_n*. Length convention |B| = |A| + 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockCoefficients {
    pub a_blocks: Vec<Mat2>,
    pub b_blocks: Vec<Mat2>,
}

impl BlockCoefficients {
    /// Check the structural constraints: length convention, |det A_n| above
    /// the rank cutoff, B_n Hermitian to `tol_herm` relative to its size.
    pub fn validate(&self, tol: &Tolerances) -> Result<()> {
        if self.b_blocks.len() != self.a_blocks.len() + 1 {
            return Err(Error::InvalidCoefficients(
                "need exactly one more diagonal block than off-diagonal blocks",
            ));
        }
        for a in &self.a_blocks {
            if !a.is_finite() {
                return Err(Error::InvalidCoefficients("off-diagonal block must be finite"));
            }
            if a.det().norm() <= tol.rank_tol {
                return Err(Error::InvalidCoefficients("off-diagonal block must be invertible"));
            }
        }
        for b in &self.b_blocks {
            if !b.is_finite() {
                return Err(Error::InvalidCoefficients("diagonal block must be finite"));
            }
            let defect = (*b - b.adjoint()).frobenius();
            if defect > tol.tol_herm * b.frobenius().max(1.0) {
                return Err(Error::InvalidCoefficients("diagonal block must be Hermitian"));
            }
        }
        Ok(())
    }
}

/// Block coefficients in the canonical gauge: every diagonal block is
/// antidiagonal [[0, b], [conj(b), 0]] and every off-diagonal block is a
/// positive multiple of σ₁, so the data is equivalent to scalar (a, b).
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalBlockCoefficients {
    pub blocks: BlockCoefficients,
}

impl CanonicalBlockCoefficients {
    /// Accept block coefficients whose diagonal blocks are antidiagonal and
    /// whose off-diagonal blocks are positive multiples of σ₁, both to
    /// `gauge_tol` relative to block size.
    pub fn from_blocks(blocks: BlockCoefficients, tol: &Tolerances) -> Result<Self> {
        blocks.validate(tol)?;
        for b in &blocks.b_blocks {
            let defect = b.e[0][0].norm() + b.e[1][1].norm();
            if defect > tol.gauge_tol * b.frobenius().max(1.0) {
                return Err(Error::InvalidCoefficients("diagonal block is not antidiagonal"));
            }
        }
        for a in &blocks.a_blocks {
            let scale = a.frobenius().max(1.0);
            let s = a.e[0][1];
            let defect = a.e[0][0].norm()
                + a.e[1][1].norm()
                + (a.e[1][0] - s).norm()
                + s.im.abs()
                + (-s.re).max(0.0);
            if defect > tol.gauge_tol * scale {
                return Err(Error::InvalidCoefficients(
                    "off-diagonal block is not a positive multiple of the antidiagonal involution",
                ));
            }
        }
        Ok(CanonicalBlockCoefficients { blocks })
    }

    /// Extract the scalar coefficients (a, b) this canonical form encodes.
    pub fn to_scalar(&self) -> Result<JacobiCoefficients> {
        let a: Vec<f64> = self.blocks.a_blocks.iter().map(|m| m.e[0][1].re).collect();
        let b: Vec<Complex64> = self.blocks.b_blocks.iter().map(|m| m.e[0][1]).collect();
        JacobiCoefficients::new(a, b)
    }
}

/// Dense n×n truncation of J(a, b). Fails with `DimensionTooLarge` when n
/// is zero or exceeds the stored diagonal length.
pub fn dense_truncation(c: &JacobiCoefficients, n: usize) -> Result<DenseMatrix> {
    if n == 0 || n > c.b.len() {
        return Err(Error::DimensionTooLarge { requested: n, available: c.b.len() });
    }
    let mut j = DenseMatrix::zeros(n);
    for i in 0..n {
        j[(i, i)] = c.b[i];
        if i + 1 < n {
            let a = Complex64::new(c.a[i], 0.0);
            j[(i, i + 1)] = a;
            j[(i + 1, i)] = a;
        }
    }
    Ok(j)
}

/// The 2×2 block embedding of scalar coefficients: A_j = a_j·σ₁ and
/// B_j = [[0, b_j], [conj(b_j), 0]], which is the canonical gauge.
pub fn block_embed(c: &JacobiCoefficients) -> BlockCoefficients {
    let a_blocks = c
        .a
        .iter()
        .map(|&a| Mat2::sigma1().scale(Complex64::new(a, 0.0)))
        .collect();
    let b_blocks = c
        .b
        .iter()
        .map(|&b| {
            let mut m = Mat2::zero();
            m.e[0][1] = b;
            m.e[1][0] = b.conj();
            m
        })
        .collect();
    BlockCoefficients { a_blocks, b_blocks }
}

/// Dense 2m×2m truncation of a block Jacobi matrix: block row i carries
/// A_{i−1}, B_i, A_i*.
pub fn dense_block_truncation(bc: &BlockCoefficients, m: usize) -> Result<DenseMatrix> {
    if m == 0 || m > bc.b_blocks.len() {
        return Err(Error::DimensionTooLarge { requested: m, available: bc.b_blocks.len() });
    }
    let mut j = DenseMatrix::zeros(2 * m);
    let mut put = |row: usize, col: usize, blk: &Mat2| {
        for i in 0..2 {
            for k in 0..2 {
                j[(2 * row + i, 2 * col + k)] = blk.e[i][k];
            }
        }
    };
    for i in 0..m {
        put(i, i, &bc.b_blocks[i]);
        if i > 0 {
            put(i, i - 1, &bc.a_blocks[i - 1]);
        }
        if i + 1 < m {
            put(i, i + 1, &bc.a_blocks[i].adjoint());
        }
    }
    Ok(j)
}

/// Wronskian W_n(u, v) = a_n·(u_{n+1}·v_n − u_n·v_{n+1}) of two sequences
/// with respect to J(a, b). Constant in n exactly when u, v both solve the
/// same three-term recurrence.
pub fn wronskian(u: &[Complex64], v: &[Complex64], c: &JacobiCoefficients, n: usize) -> Result<Complex64> {
    let len = u.len().min(v.len());
    if n + 1 >= len {
        return Err(Error::IndexOutOfRange { index: n + 1, len });
    }
    if n >= c.a.len() {
        return Err(Error::IndexOutOfRange { index: n, len: c.a.len() });
    }
    Ok(Complex64::new(c.a[n], 0.0) * (u[n + 1] * v[n] - u[n] * v[n + 1]))
}

/// Outcome of the properness sufficiency test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PropernessReport {
    /// A divergent Carleman sum Σ 1/a_n is certified.
    pub sufficient: bool,
    /// The certificate rests on the stored prefix alone and says nothing
    /// about the unseen tail.
    pub prefix_only: bool,
}

/// Sufficiency test for properness via the Carleman condition: a uniform
/// bound sup a_n ≤ s < ∞ forces Σ 1/a_n = ∞.
///
/// With `declared_sup_a = Some(s)` the bound is a promise about the full
/// sequence; it is checked against the stored prefix, and an inconsistent
/// promise certifies nothing. With `None` only the (always bounded) prefix
/// is available, so the report carries the `prefix_only` caveat.
pub fn properness_sufficient(c: &JacobiCoefficients, declared_sup_a: Option<f64>) -> PropernessReport {
    match declared_sup_a {
        Some(s) => {
            let consistent = s.is_finite() && s > 0.0 && c.a.iter().all(|&a| a <= s);
            PropernessReport { sufficient: consistent, prefix_only: false }
        }
        None => PropernessReport { sufficient: true, prefix_only: true },
    }
}

/// Top-left 2×2 corner of the resolvent (𝕁_{2m} − z)⁻¹ of the dense block
/// truncation, computed by direct linear solves.
pub fn block_resolvent_corner(bc: &BlockCoefficients, m: usize, z: Complex64) -> Result<Mat2> {
    let j = dense_block_truncation(bc, m)?;
    let dim = 2 * m;
    let shifted = DenseMatrix::from_fn(dim, |i, k| {
        if i == k {
            j[(i, k)] - z
        } else {
            j[(i, k)]
        }
    });
    let mut e0 = alloc::vec![Complex64::ZERO; dim];
    e0[0] = Complex64::ONE;
    let mut e1 = alloc::vec![Complex64::ZERO; dim];
    e1[1] = Complex64::ONE;
    let cols = linear_solve(&shifted, &[e0, e1])?;
    Ok(Mat2::new([
        [cols[0][0], cols[1][0]],
        [cols[0][1], cols[1][1]],
    ]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matops::hermitian_eig;
    use crate::testutil::{random_coefficients, SplitMix64};

    fn c64(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn coeffs(a: &[f64], b: &[Complex64]) -> JacobiCoefficients {
        JacobiCoefficients::new(a.to_vec(), b.to_vec()).unwrap()
    }

    // ---------- construction ----------

    #[test]
    fn rejects_bad_lengths_and_signs() {
        assert!(matches!(
            JacobiCoefficients::new(alloc::vec![1.0], alloc::vec![Complex64::ZERO]),
            Err(Error::InvalidCoefficients(_))
        ));
        assert!(matches!(
            JacobiCoefficients::new(alloc::vec![-1.0], alloc::vec![Complex64::ZERO; 2]),
            Err(Error::InvalidCoefficients(_))
        ));
        assert!(matches!(
            JacobiCoefficients::new(alloc::vec![0.0], alloc::vec![Complex64::ZERO; 2]),
            Err(Error::InvalidCoefficients(_))
        ));
        assert!(JacobiCoefficients::new(alloc::vec![], alloc::vec![Complex64::ZERO]).is_ok());
    }

    // ---------- dense truncation ----------

    #[test]
    fn dense_truncation_two_by_two() {
        let c = coeffs(&[1.0], &[c64(0.0, 1.0), Complex64::ZERO]);
        let j = dense_truncation(&c, 2).unwrap();
        assert_eq!(j[(0, 0)], c64(0.0, 1.0));
        assert_eq!(j[(0, 1)], c64(1.0, 0.0));
        assert_eq!(j[(1, 0)], c64(1.0, 0.0));
        assert_eq!(j[(1, 1)], Complex64::ZERO);
    }

    #[test]
    fn dense_truncation_bounds() {
        let c = coeffs(&[1.0], &[Complex64::ZERO; 2]);
        assert!(matches!(dense_truncation(&c, 0), Err(Error::DimensionTooLarge { .. })));
        assert!(matches!(dense_truncation(&c, 3), Err(Error::DimensionTooLarge { .. })));
        assert!(dense_truncation(&c, 1).is_ok());
    }

    #[test]
    fn complex_symmetric_adjoint_identity() {
        // Bilinear symmetry: <J(a, conj b)·conj(u), v> = <conj(u), J(a, b)·v>
        // in the sesquilinear pairing, for any finite truncation.
        let mut rng = SplitMix64(0xabc);
        for _ in 0..20 {
            let n = rng.int_range(1, 10);
            let (a, b) = random_coefficients(&mut rng, n);
            let c = JacobiCoefficients::new(a.clone(), b.clone()).unwrap();
            let cbar =
                JacobiCoefficients::new(a, b.iter().map(|v| v.conj()).collect()).unwrap();
            let j = dense_truncation(&c, n).unwrap();
            let jbar = dense_truncation(&cbar, n).unwrap();
            let u: alloc::vec::Vec<Complex64> = (0..n).map(|_| rng.complex_box(1.0)).collect();
            let v: alloc::vec::Vec<Complex64> = (0..n).map(|_| rng.complex_box(1.0)).collect();
            let ubar: alloc::vec::Vec<Complex64> = u.iter().map(|x| x.conj()).collect();
            let lhs: Complex64 = jbar
                .apply(&ubar)
                .iter()
                .zip(&v)
                .map(|(x, y)| x.conj() * y)
                .sum();
            let rhs: Complex64 = ubar
                .iter()
                .zip(j.apply(&v).iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
            assert!((lhs - rhs).norm() < 1e-12);
        }
    }

    // ---------- block embedding ----------

    #[test]
    fn block_embed_is_canonical() {
        let mut rng = SplitMix64(9);
        let (a, b) = random_coefficients(&mut rng, 5);
        let c = JacobiCoefficients::new(a, b).unwrap();
        let bc = block_embed(&c);
        let canonical = CanonicalBlockCoefficients::from_blocks(bc, &Tolerances::default()).unwrap();
        assert_eq!(canonical.to_scalar().unwrap(), c);
    }

    #[test]
    fn canonical_rejects_diagonal_block() {
        let blocks = BlockCoefficients {
            a_blocks: alloc::vec![],
            b_blocks: alloc::vec![Mat2::identity()],
        };
        assert!(CanonicalBlockCoefficients::from_blocks(blocks, &Tolerances::default()).is_err());
    }

    #[test]
    fn embedding_interleaves_doubled_operator() {
        // 𝕁 equals [[0, J], [J*, 0]] after the interleaving relabel
        // 2i ↦ i, 2i+1 ↦ n+i of indices.
        let mut rng = SplitMix64(0x77);
        let n = 6;
        let (a, b) = random_coefficients(&mut rng, n);
        let c = JacobiCoefficients::new(a, b).unwrap();
        let j = dense_truncation(&c, n).unwrap();
        let jj = dense_block_truncation(&block_embed(&c), n).unwrap();
        let sigma = |p: usize| if p % 2 == 0 { p / 2 } else { n + p / 2 };
        let doubled = DenseMatrix::from_fn(2 * n, |i, k| {
            if i < n && k >= n {
                j[(i, k - n)]
            } else if i >= n && k < n {
                j[(k, i - n)].conj()
            } else {
                Complex64::ZERO
            }
        });
        for p in 0..2 * n {
            for q in 0..2 * n {
                assert_eq!(jj[(p, q)], doubled[(sigma(p), sigma(q))], "entry ({p}, {q})");
            }
        }
    }

    #[test]
    fn embedded_spectrum_symmetric_for_zero_diagonal() {
        let mut rng = SplitMix64(0x5ca1e);
        let n = 7;
        let a: alloc::vec::Vec<f64> = (0..n - 1).map(|_| rng.range(0.5, 2.0)).collect();
        let b = alloc::vec![Complex64::ZERO; n];
        let c = JacobiCoefficients::new(a, b).unwrap();
        let jj = dense_block_truncation(&block_embed(&c), n).unwrap();
        let eig = hermitian_eig(&jj, &Tolerances::default()).unwrap();
        for k in 0..n {
            let lo = eig.eigenvalues[k];
            let hi = eig.eigenvalues[2 * n - 1 - k];
            assert!((lo + hi).abs() < 1e-10, "eigenvalues not paired: {lo} vs {hi}");
        }
    }

    // ---------- wronskian ----------

    #[test]
    fn wronskian_hand_value() {
        let c = coeffs(&[2.0], &[Complex64::ZERO; 2]);
        let u = [Complex64::ONE, Complex64::ONE, Complex64::ZERO];
        let v = [Complex64::ONE, Complex64::ZERO, Complex64::ZERO];
        let w = wronskian(&u, &v, &c, 0).unwrap();
        assert_eq!(w, c64(2.0, 0.0));
    }

    #[test]
    fn wronskian_bounds() {
        let c = coeffs(&[2.0], &[Complex64::ZERO; 2]);
        let u = [Complex64::ONE, Complex64::ONE];
        assert!(matches!(
            wronskian(&u, &u, &c, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        let long = [Complex64::ONE; 4];
        assert!(matches!(
            wronskian(&long, &long, &c, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn wronskian_constant_along_recurrence_solutions() {
        // u, v solving (J u)_n = z u_n for rows 1..n−1 have constant W_n.
        let mut rng = SplitMix64(0xfeed);
        let n = 8;
        let (a, b) = random_coefficients(&mut rng, n);
        let c = JacobiCoefficients::new(a.clone(), b.clone()).unwrap();
        let z = c64(0.3, 0.7);
        let solve = |u0: Complex64, u1: Complex64| {
            let mut u = alloc::vec![u0, u1];
            for k in 1..n - 1 {
                // a_k u_{k+1} = (z − b_k) u_k − a_{k−1} u_{k−1}
                let next = ((z - b[k]) * u[k] - a[k - 1] * u[k - 1]) / a[k];
                u.push(next);
            }
            u
        };
        let u = solve(Complex64::ONE, c64(0.2, 0.1));
        let v = solve(c64(0.0, 1.0), c64(-0.4, 0.9));
        let w0 = wronskian(&u, &v, &c, 0).unwrap();
        for k in 1..n - 1 {
            let wk = wronskian(&u, &v, &c, k).unwrap();
            assert!((wk - w0).norm() < 1e-10 * w0.norm().max(1.0));
        }
    }

    // ---------- properness ----------

    #[test]
    fn properness_reports() {
        let c = coeffs(&[1.0, 1.5], &[Complex64::ZERO; 3]);
        let r = properness_sufficient(&c, Some(2.0));
        assert!(r.sufficient && !r.prefix_only);
        let r = properness_sufficient(&c, Some(1.2));
        assert!(!r.sufficient, "declared bound below a stored entry certifies nothing");
        let r = properness_sufficient(&c, Some(f64::INFINITY));
        assert!(!r.sufficient, "an infinite bound is no bound");
        let r = properness_sufficient(&c, None);
        assert!(r.sufficient && r.prefix_only);
    }

    // ---------- resolvent corner ----------

    #[test]
    fn resolvent_corner_matches_inverse_of_small_block() {
        // Single block: corner of (B₀ − z)⁻¹ directly.
        let c = coeffs(&[], &[c64(0.0, 1.0)]);
        let z = c64(2.0, 2.0);
        let corner = block_resolvent_corner(&block_embed(&c), 1, z).unwrap();
        let b0 = block_embed(&c).b_blocks[0];
        let want = (b0 - Mat2::identity().scale(z)).inverse().unwrap();
        assert!((corner - want).frobenius() < 1e-14);
    }
}
