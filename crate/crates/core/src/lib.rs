//! Sparse approximation of multivariate functions from few pointwise samples.
//!
//! Functions on `(-1, 1)^d` are expanded in tensorized orthonormal Legendre or
//! Chebyshev polynomials over a hyperbolic cross. Coefficients are recovered
//! from `m ≪ N` random samples with weighted orthogonal matching pursuit
//! ([`womp`]), which greedily trades data fit against a weighted sparsity
//! penalty, or with a weighted LASSO baseline ([`lasso`]).
//!
//! ```no_run
//! use womp_core::prelude::*;
//!
//! let set = hyperbolic_cross(10, 10)?;
//! let kind = BasisKind::Legendre;
//! let points = sample_measure(kind, 10, 80, 7);
//! let f = target_log_sum(10);
//! let sys = build_system(&points, &f, kind, &set)?.normalize_columns()?;
//! let w = WeightVector::for_set(kind, &set);
//! let trace = womp_solve(&sys, &w, &WompConfig::with_lambda(1e-4, 25))?;
//! let coefficients = sys.denormalize_solution(&trace.final_coefficients())?;
//! # Ok::<(), womp_core::Error>(())
//! ```

pub mod assembly;
pub mod basis;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod index_sets;
pub mod lasso;
pub mod lstsq;
pub mod quadrature;
pub mod verify;
pub mod womp;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::assembly::{build_system, LinearSystem, TargetFunction};
    pub use crate::basis::{eval_1d, eval_tensor, sample_measure, weight, BasisKind, SamplePoint, WeightVector};
    pub use crate::experiments::{relative_error, run_sweep, target_log_sum, ExperimentConfig, ExperimentReport};
    pub use crate::index_sets::{hyperbolic_cross, MultiIndex, MultiIndexSet};
    pub use crate::lasso::{lasso_solve, LassoConfig};
    pub use crate::womp::{womp_solve, SolveTrace, StopReason, WompConfig};
}
