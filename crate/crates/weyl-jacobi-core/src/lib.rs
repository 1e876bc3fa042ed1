//! Spectral transforms for non-self-adjoint half-line Jacobi matrices.
//!
//! A truncated Jacobi matrix J(a, b) has positive off-diagonals a_n (equal on
//! both sides, not conjugated) and complex diagonal entries b_n. Such an
//! operator is encoded by a pair (ν, ψ): ν is the spectral measure of
//! |J| = √(J*J) at the cyclic vector δ₀ and ψ is a phase function with
//! |ψ| ≤ 1 and ψ(0) = 0. This crate computes the direct map (a, b) ↦ (ν, ψ)
//! on finite truncations, the inverse map via block Lanczos on the associated
//! 2×2 matrix measure followed by unitary gauge fixing, pointwise Weyl-matrix
//! evaluation with coefficient stripping, and decay-exponent comparators for
//! the local uniqueness asymptotics.
//!
//! The crate is `no_std` (requires `alloc`); all operations are pure
//! functions over immutable values and are safe to call concurrently.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod direct;
pub mod error;
pub mod inverse;
pub mod jacobi;
pub mod matops;
pub mod measure;

pub use error::{Error, Result, Tolerances};

#[cfg(test)]
pub(crate) mod testutil {
    //! Deterministic pseudo-random helpers for seeded test loops.
    use num_complex::Complex64;

    /// SplitMix64: tiny deterministic generator for reproducible tests.
    pub struct SplitMix64(pub u64);

    impl SplitMix64 {
        pub fn next_u64(&mut self) -> u64 {
            self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = self.0;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^ (z >> 31)
        }

        /// Uniform in [0, 1).
        pub fn uniform(&mut self) -> f64 {
            (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
        }

        /// Uniform in [lo, hi).
        pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
            lo + (hi - lo) * self.uniform()
        }

        /// Complex with Re and Im uniform in [-m, m).
        pub fn complex_box(&mut self, m: f64) -> Complex64 {
            Complex64::new(self.range(-m, m), self.range(-m, m))
        }

        /// Uniform integer in [lo, hi].
        pub fn int_range(&mut self, lo: usize, hi: usize) -> usize {
            lo + (self.next_u64() % (hi - lo + 1) as u64) as usize
        }
    }

    /// Random coefficient pair (a, b) with a in [0.5, 2), |Re b|, |Im b| < 2.
    pub fn random_coefficients(
        rng: &mut SplitMix64,
        n: usize,
    ) -> (alloc::vec::Vec<f64>, alloc::vec::Vec<Complex64>) {
        let a: alloc::vec::Vec<f64> = (0..n.saturating_sub(1)).map(|_| rng.range(0.5, 2.0)).collect();
        let b: alloc::vec::Vec<Complex64> = (0..n).map(|_| rng.complex_box(2.0)).collect();
        (a, b)
    }
}
