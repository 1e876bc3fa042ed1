//! Dense complex linear-algebra kernel: 2×2 matrix values, Hermitian
//! eigendecomposition by cyclic Jacobi rotations, branch-correct quarter
//! powers, and a small LU solver for dense resolvents.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;
// Trait-based f64 math for builds without std; the test harness links
// std, whose inherent methods shadow these.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result, Tolerances};

/// 2×2 complex matrix: the universal value type for recurrence blocks,
/// Weyl samples, matrix moments, and measure weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2 {
    pub e: [[Complex64; 2]; 2],
}

impl Mat2 {
    pub fn new(e: [[Complex64; 2]; 2]) -> Self {
        Mat2 { e }
    }

    pub fn zero() -> Self {
        Mat2 { e: [[Complex64::ZERO; 2]; 2] }
    }

    pub fn identity() -> Self {
        Mat2::diag(Complex64::ONE, Complex64::ONE)
    }

    /// The antidiagonal involution σ₁ = [[0, 1], [1, 0]].
    pub fn sigma1() -> Self {
        let mut m = Mat2::zero();
        m.e[0][1] = Complex64::ONE;
        m.e[1][0] = Complex64::ONE;
        m
    }

    pub fn diag(d0: Complex64, d1: Complex64) -> Self {
        let mut m = Mat2::zero();
        m.e[0][0] = d0;
        m.e[1][1] = d1;
        m
    }

    pub fn adjoint(&self) -> Self {
        Mat2 {
            e: [
                [self.e[0][0].conj(), self.e[1][0].conj()],
                [self.e[0][1].conj(), self.e[1][1].conj()],
            ],
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut m = *self;
        for row in m.e.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        m
    }

    pub fn det(&self) -> Complex64 {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn trace(&self) -> Complex64 {
        self.e[0][0] + self.e[1][1]
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for row in &self.e {
            for v in row {
                s += v.norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        let mut m = 0.0f64;
        for row in &self.e {
            for v in row {
                m = m.max(v.norm());
            }
        }
        m
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().flatten().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        let inv = Complex64::ONE / d;
        Some(Mat2 {
            e: [
                [self.e[1][1] * inv, -self.e[0][1] * inv],
                [-self.e[1][0] * inv, self.e[0][0] * inv],
            ],
        })
    }

    /// Hermitian part (M + M*)/2.
    pub fn hermitian_part(&self) -> Self {
        (*self + self.adjoint()).scale(Complex64::new(0.5, 0.0))
    }

    /// Imaginary part (M − M*)/(2i); Hermitian by construction.
    pub fn imaginary_part(&self) -> Self {
        (*self - self.adjoint()).scale(Complex64::new(0.0, -0.5))
    }

    /// Eigenvalues (ascending) of a Hermitian 2×2 matrix, in closed form.
    pub fn hermitian_eigenvalues(&self) -> (f64, f64) {
        let mean = 0.5 * (self.e[0][0].re + self.e[1][1].re);
        let half_gap = 0.5 * (self.e[0][0].re - self.e[1][1].re);
        let disc = (half_gap * half_gap + self.e[0][1].norm_sqr()).max(0.0).sqrt();
        (mean - disc, mean + disc)
    }

    /// Principal (Hermitian PSD) square root of a Hermitian PSD matrix,
    /// via the closed form (G + √det·I)/√(tr + 2√det).
    pub fn psd_sqrt(&self) -> Self {
        let d = self.det().re.max(0.0).sqrt();
        let t = self.trace().re + 2.0 * d;
        if t <= 0.0 {
            return Mat2::zero();
        }
        let denom = Complex64::new(t.sqrt(), 0.0);
        let mut m = *self;
        m.e[0][0] += Complex64::new(d, 0.0);
        m.e[1][1] += Complex64::new(d, 0.0);
        m.scale(Complex64::ONE / denom)
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] += rhs.e[i][j];
            }
        }
        m
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        let mut m = self;
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] -= rhs.e[i][j];
            }
        }
        m
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(-Complex64::ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let mut m = Mat2::zero();
        for i in 0..2 {
            for j in 0..2 {
                m.e[i][j] = self.e[i][0] * rhs.e[0][j] + self.e[i][1] * rhs.e[1][j];
            }
        }
        m
    }
}

/// Largest singular value of a 2×2 matrix, as √(λ_max(A*A)) in closed form.
pub fn spectral_norm_2x2(a: &Mat2) -> f64 {
    let g = a.adjoint() * *a;
    let (_, hi) = g.hermitian_eigenvalues();
    hi.max(0.0).sqrt()
}

/// Scalar polar decomposition C = c·U for 2×2 blocks with CC* = c²·I.
///
/// Returns (c, U) with c = √((CC*)₀₀) ≥ 0 and U unitary. Fails with
/// `SingularBlock` when c is numerically zero (recursion termination) and
/// with `NotScalarPolar` when CC* deviates from c²·I by more than
/// `gauge_tol·c²` (broken measure symmetry upstream).
pub fn polar_scalar_unitary(c: &Mat2, tol: &Tolerances) -> Result<(f64, Mat2)> {
    let cc = *c * c.adjoint();
    let cval = cc.e[0][0].re.max(0.0).sqrt();
    if cval < tol.rank_tol {
        return Err(Error::SingularBlock { c: cval });
    }
    let defect = (cc - Mat2::identity().scale(Complex64::new(cval * cval, 0.0))).frobenius();
    if defect > tol.gauge_tol * cval * cval {
        return Err(Error::NotScalarPolar { defect });
    }
    Ok((cval, c.scale(Complex64::new(1.0 / cval, 0.0))))
}

/// diag(w^{1/4}, w^{−1/4}) with the branch arg(w^{1/4}) = arg(w)/4 ∈ (0, π/2),
/// cut along [0, +∞). Fails with `OnCut` when w is real and ≥ 0 within
/// tolerance.
pub fn quarter_power_scaling(w: Complex64, tol: &Tolerances) -> Result<Mat2> {
    let r = w.norm();
    if r == 0.0 || (w.im.abs() <= tol.pole_threshold(r) && w.re >= 0.0) {
        return Err(Error::OnCut);
    }
    let mut theta = w.arg();
    if theta < 0.0 {
        theta += 2.0 * core::f64::consts::PI;
    }
    let q = Complex64::from_polar(r.powf(0.25), theta / 4.0);
    let qinv = Complex64::from_polar(r.powf(-0.25), -theta / 4.0);
    Ok(Mat2::diag(q, qinv))
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    e: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        DenseMatrix { n, e: vec![Complex64::ZERO; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn adjoint(&self) -> Self {
        DenseMatrix::from_fn(self.n, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * rhs[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &DenseMatrix) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        DenseMatrix::from_fn(self.n, |i, j| self[(i, j)] - rhs[(i, j)])
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(self.n, v.len());
        let mut out = vec![Complex64::ZERO; self.n];
        for i in 0..self.n {
            let mut acc = Complex64::ZERO;
            for j in 0..self.n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        out
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }

    pub fn frobenius(&self) -> f64 {
        self.e.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// max |H_ij − conj(H_ji)| over all entries.
    pub fn hermitian_defect(&self) -> f64 {
        let mut d = 0.0f64;
        for i in 0..self.n {
            for j in i..self.n {
                d = d.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        d
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.e[i * self.n + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.e[i * self.n + j]
    }
}

/// Hermitian eigendecomposition H = V·diag(λ)·V*, eigenvalues ascending,
/// eigenvector columns orthonormal.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

const JACOBI_SWEEP_BUDGET: usize = 64;
const JACOBI_OFF_FACTOR: f64 = 1e-14;

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Deterministic, high relative accuracy at desk scale (n up to a few
/// hundred). Fails with `NotHermitian` when max |H_ij − conj(H_ji)| exceeds
/// `tol_herm·‖H‖` and with `NoConvergence` past the sweep budget.
pub fn hermitian_eig(h: &DenseMatrix, tol: &Tolerances) -> Result<HermitianEig> {
    let n = h.dim();
    let hnorm = h.frobenius();
    let defect = h.hermitian_defect();
    if defect > tol.tol_herm * hnorm.max(1e-300) {
        return Err(Error::NotHermitian { defect });
    }
    // Work on the exactly Hermitian average; the defect is within tolerance.
    let mut a = DenseMatrix::from_fn(n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let mut v = DenseMatrix::identity(n);
    let target = JACOBI_OFF_FACTOR * hnorm;

    let mut converged = hnorm == 0.0 || n == 1;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_SWEEP_BUDGET {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let gamma = a[(p, q)];
                let gn = gamma.norm();
                if gn <= 1e-300 {
                    continue;
                }
                // Unitary plane rotation zeroing the (p, q) entry:
                // U[p][p] = c, U[p][q] = s·e^{iφ}, U[q][p] = −s·e^{−iφ},
                // U[q][q] = c with φ = arg(H_pq) and the classical real
                // Jacobi angle on (|H_pq|, H_pp, H_qq).
                let phase = Complex64::from_polar(1.0, gamma.arg());
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * gn);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let sp = s * phase;
                let spc = s * phase.conj();
                // Columns p, q of A and of the accumulated V.
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = akp * c - akq * spc;
                    a[(k, q)] = akp * sp + akq * c;
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * c - vkq * spc;
                    v[(k, q)] = vkp * sp + vkq * c;
                }
                // Rows p, q of A.
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = apk * c - aqk * sp;
                    a[(q, k)] = apk * spc + aqk * c;
                }
                a[(p, q)] = Complex64::ZERO;
                a[(q, p)] = Complex64::ZERO;
            }
        }
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[(i, j)].norm_sqr();
            }
        }
        converged = off.sqrt() <= target;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = DenseMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

/// Solve A·X = B for several right-hand sides by LU with partial pivoting.
///
/// Fails with `PoleProximity` carrying the offending pivot magnitude when a
/// pivot is numerically zero (for resolvent use: shift too close to the
/// spectrum).
pub fn linear_solve(a: &DenseMatrix, rhs: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    let n = a.dim();
    let mut lu = a.clone();
    let mut xs: Vec<Vec<Complex64>> = rhs.iter().cloned().collect();
    let scale = a.frobenius().max(1e-300);
    for col in 0..n {
        let mut piv = col;
        let mut best = lu[(col, col)].norm();
        for r in (col + 1)..n {
            let m = lu[(r, col)].norm();
            if m > best {
                best = m;
                piv = r;
            }
        }
        if best <= 1e-14 * scale {
            return Err(Error::PoleProximity { distance: best });
        }
        if piv != col {
            for j in 0..n {
                let t = lu[(col, j)];
                lu[(col, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for x in xs.iter_mut() {
                x.swap(col, piv);
            }
        }
        let d = lu[(col, col)];
        for r in (col + 1)..n {
            let f = lu[(r, col)] / d;
            if f == Complex64::ZERO {
                continue;
            }
            lu[(r, col)] = Complex64::ZERO;
            for j in (col + 1)..n {
                let v = lu[(col, j)];
                lu[(r, j)] -= f * v;
            }
            for x in xs.iter_mut() {
                let v = x[col];
                x[r] -= f * v;
            }
        }
    }
    for x in xs.iter_mut() {
        for col in (0..n).rev() {
            let mut acc = x[col];
            for j in (col + 1)..n {
                acc -= lu[(col, j)] * x[j];
            }
            x[col] = acc / lu[(col, col)];
        }
    }
    Ok(xs)
}
