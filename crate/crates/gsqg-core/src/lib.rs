//! Pseudo-spectral core for the dissipative generalized SQG equation on the
//! periodic 2D torus, together with a Littlewood-Paley toolkit and empirical
//! samplers for the commutator and trilinear estimates that drive the
//! critical-space regularity theory.
//!
//! Conventions, fixed crate-wide:
//! - `coeffs[idx(ix, iy)]` is the coefficient of `exp(i k . x)` with
//!   `k = (2 pi / period) m`, `m` in `{-n/2, ..., n/2 - 1}` per axis;
//! - `||f||_{L^2}^2 = period^2 sum |coeff|^2` (Parseval on the torus);
//! - the mean mode is carried as zero everywhere; operators skip it.

// Negated comparisons like `!(x > 0.0)` are load-bearing: they reject NaN,
// which `x <= 0.0` would accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod frac;
pub mod grid;
pub mod harness;
pub mod init;
pub mod lp;
pub mod model;
pub mod stepper;
pub mod transform;

pub use error::{Error, Result};
pub use field::SpectralField;
pub use frac::{
    check_interpolation, fractional_laplacian, heat_semigroup, sobolev_norm, split_frequencies,
    SobolevIndex,
};
pub use grid::GridSpec;
pub use harness::{
    sample_commutator_estimate, sample_trilinear_bound, CommutatorParams, DecayReport, RatioStats,
    RunRecord,
};
pub use lp::{BernsteinCheck, LpProjector};
pub use model::{
    check_scaling_covariance, commutator_form, gradient, nonlinear_term, pointwise_product, rhs,
    scale_lattice, velocity, GsqgParams, Regime, Structure,
};
pub use stepper::{duhamel_residual, integrate, step_etdrk2, StepControl, StepInfo};
pub use transform::{apply_multiplier, apply_real_multiplier, dealias, to_physical, to_spectral};
