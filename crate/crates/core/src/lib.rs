//! Reproducing-kernel positivity testing, Douglas-lemma factorization with
//! norm certificates, and exact verification of shift-operator identities on
//! weighted monomial models.
//!
//! The crate is organized around five concerns:
//!
//! - [`kernel`]: symbolic kernels, Gram matrices, projection-compressed Gram
//!   matrices, reciprocal power series.
//! - [`pick`]: the Schur-complement positivity test deciding the complete
//!   Pick property at finite point-set resolution, with an independent
//!   diagonal-coefficient oracle and seeded witness search.
//! - [`douglas`]: finite-dimensional majorization checks, the minimal-norm
//!   solver through the SVD pseudo-inverse, and the kernel-compressed
//!   majorization check for matrices of polynomial multipliers.
//! - [`shift`]: exact-rational truncated models of coordinate multiplication
//!   on weighted monomial bases, with zero-residual identity verification.
//! - [`counterexample`]: the first-row equation instances whose minimal
//!   factorization norms grow like `√(N+1)`, certified exactly.
//!
//! Everything algebraic runs over arbitrary-precision rationals and converts
//! to floating point only at the eigenvalue/SVD boundary, so the acceptance
//! checks on exact quantities tolerate no epsilon at all.

pub mod counterexample;
pub mod douglas;
pub mod error;
pub mod kernel;
pub mod number;
pub mod pick;
pub mod polynomial;
pub mod shift;

pub use counterexample::{
    build_counterexample, forced_coefficient_check, growth_report, growth_report_csv,
    minimal_norm_solve, norm_lower_bound, CounterexampleInstance, GrowthRow, NormCertificate,
};
pub use douglas::{
    corona_block_matrix, corona_condition_check, douglas_solve, majorization_check, operator_norm,
    FactorizationResult,
};
pub use error::{CoreError, Result};
pub use kernel::{
    compress_gram, gram, kernel_eval, reciprocal_series, HermitianMatrix, KernelSpec, PointSet,
    ReciprocalSeries,
};
pub use pick::{
    diagonal_np_oracle, np_search, np_test, psd_check, NpReport, OracleReport, PsdVerdict,
};
pub use polynomial::{MultiPoly, PolynomialMatrix};
pub use shift::{
    build_shift, poly_identity_check, verify_ball_identity, verify_bergman_identity,
    verify_bidisk_identity, verify_identity, IdentityReport, LemmaId, OperatorModel, Space,
    Variable,
};
