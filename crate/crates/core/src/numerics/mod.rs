//! Small dense complex linear algebra, the rank-one generalized eigensolver,
//! and the special functions behind the RVQ loss bounds.

mod eigen;
mod linalg;
pub mod quadrature;
mod rvq;
mod special;

pub use eigen::{rank1_gen_eigvec, rayleigh_quotient, GenEigen};
pub use linalg::{CMat, CVec, MAX_ANTENNAS, MIN_ANTENNAS};
pub use num_complex::Complex64;
pub use num_rational::BigRational;
pub use rvq::{
    alternating_harmonic_sum, expected_log2_cos2, expected_log2_cos2_exact,
    expected_log2_cos2_quadrature, expected_sin2_min, EXACT_MAX_BITS,
};
pub use special::{beta_fn, ln_beta};
