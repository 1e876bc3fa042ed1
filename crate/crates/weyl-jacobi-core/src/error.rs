//! Error type and the shared tolerance configuration.

use core::fmt;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numerical kernels and transform pipelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// Input to a Hermitian eigensolve deviates from H = H* beyond tolerance.
    NotHermitian { defect: f64 },
    /// Iterative eigensolve exceeded its sweep budget.
    NoConvergence { sweeps: usize },
    /// CC* is not a scalar multiple of the identity; the upstream measure
    /// has broken symmetry.
    NotScalarPolar { defect: f64 },
    /// Scalar polar factor is numerically zero; the block recursion has
    /// terminated.
    SingularBlock { c: f64 },
    /// Argument lies on the branch cut [0, +inf).
    OnCut,
    /// Requested dense truncation exceeds the stored coefficient prefix.
    DimensionTooLarge { requested: usize, available: usize },
    /// Vector or coefficient index out of range.
    IndexOutOfRange { index: usize, len: usize },
    /// Truncation dimension too small for the requested moment or
    /// polynomial degree to be truncation-independent.
    TruncationTooSmall { needed: usize, actual: usize },
    /// Evaluation point too close to an atom of the measure.
    PoleProximity { distance: f64 },
    /// Measure violates a structural requirement (mass, positivity,
    /// Cauchy-Schwarz).
    InvalidMeasure(&'static str),
    /// Coefficient data violates the length or positivity invariants.
    InvalidCoefficients(&'static str),
    /// Weyl-matrix value is numerically singular; stripping undefined.
    SingularWeylValue { det_abs: f64 },
    /// Too few usable points above the noise floor to fit a decay exponent.
    DegenerateFit,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian { defect } => {
                write!(f, "matrix is not Hermitian (defect {defect:.3e})")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "eigensolve did not converge within {sweeps} sweeps")
            }
            Error::NotScalarPolar { defect } => {
                write!(f, "CC* is not scalar (defect {defect:.3e})")
            }
            Error::SingularBlock { c } => {
                write!(f, "scalar polar factor {c:.3e} is numerically zero")
            }
            Error::OnCut => write!(f, "argument lies on the cut [0, +inf)"),
            Error::DimensionTooLarge { requested, available } => {
                write!(f, "truncation {requested} exceeds stored length {available}")
            }
            Error::IndexOutOfRange { index, len } => {
                write!(f, "index {index} out of range for length {len}")
            }
            Error::TruncationTooSmall { needed, actual } => {
                write!(f, "truncation {actual} too small (need at least {needed})")
            }
            Error::PoleProximity { distance } => {
                write!(f, "evaluation point within {distance:.3e} of an atom")
            }
            Error::InvalidMeasure(why) => write!(f, "invalid measure: {why}"),
            Error::InvalidCoefficients(why) => write!(f, "invalid coefficients: {why}"),
            Error::SingularWeylValue { det_abs } => {
                write!(f, "Weyl value singular (|det| = {det_abs:.3e})")
            }
            Error::DegenerateFit => write!(f, "too few points above noise floor for a fit"),
        }
    }
}

/// Relative tolerances shared across the kernels. All fields are
/// user-overridable; `Tolerances::default()` gives the documented defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity defect bound, relative to the matrix norm.
    pub tol_herm: f64,
    /// Eigendecomposition residual bound, relative.
    pub eig_tol: f64,
    /// Gauge defect bound for scalar-polar and antidiagonality checks.
    pub gauge_tol: f64,
    /// Numerical rank threshold for Gram matrices and recursion termination.
    pub rank_tol: f64,
    /// Eigenvalue clustering gap, relative to the spectral scale.
    pub cluster_tol: f64,
    /// Spectral atoms below this weight are dropped and mass renormalized.
    pub atom_tol: f64,
    /// Base pole-proximity threshold; scaled by (1 + |z|) at use sites.
    pub pole_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tol_herm: 1e-12,
            eig_tol: 1e-10,
            gauge_tol: 1e-8,
            rank_tol: 1e-10,
            cluster_tol: 1e-9,
            atom_tol: 1e-13,
            pole_tol: 1e-8,
        }
    }
}

impl Tolerances {
    /// Pole-proximity threshold at evaluation point z.
    pub fn pole_threshold(&self, z_abs: f64) -> f64 {
        self.pole_tol * (1.0 + z_abs)
    }
}
