//! Randomized Kaczmarz (SGD for least squares) with exact one-step
//! diagnostics.
//!
//! The iteration projects `x_k` onto the hyperplane of one equation of
//! `A x = b`, chosen with probability `‖a_i‖² / ‖A‖_F²`. Besides the solver
//! the crate evaluates, exactly, what a single step does in expectation:
//! the decay of `‖A(x_k - x)‖²` and `‖A^ℓ(x_k - x)‖²`, the decay of each
//! singular-vector component of the error, and the bounds those satisfy.
//!
//! Modules:
//! - [`linalg`], [`svd`]: dense matrices and a one-sided Jacobi SVD
//! - [`sampling`]: seeded randomness and the row law
//! - [`kernel`]: the update, the run driver and traces
//! - [`diagnostics`]: the expectation oracle, bound reports, spectral
//!   coefficients, seminorms
//! - [`problems`], [`io`]: instance generators and text matrix files
//! - [`experiments`]: configs, CSV output and the four experiment commands

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod io;
pub mod kernel;
pub mod linalg;
pub mod problems;
pub mod sampling;
pub mod svd;

pub use diagnostics::{
    alpha, alpha_ell, expected_next, sobolev_seminorm_sq, spectral_coeffs, sv_rate, theorem1_report,
    theorem2_report, BoundChecker, BoundReport, Diagnostic, Functional, SobolevOrder, SpectralCoeffs,
};
pub use error::{Error, ParseErrorKind, Result};
pub use kernel::{kaczmarz_step, residual, run, KaczmarzSolver, ProblemInstance, Trace, TraceRow};
pub use linalg::DenseMatrix;
pub use problems::{build_problem, ProblemKind, ProblemSpec, RhsKind, X0Kind};
pub use sampling::{Rng, RowSampler};
pub use svd::{svd, SvdResult};
