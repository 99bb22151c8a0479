//! The hierarchical vector field.
//!
//! The superstructure block `X` follows a simplex system realizing the
//! superstructure digraph. Each substructure block `x^j` follows its own
//! simplex system, gated by a bump of the distance from `X` to `e_j`:
//!
//! ```text
//! X_j'   = phi * X_j (1 - |X|^2 + sum_k a_jk X_k^2)
//! x^j_i' = x^j_i ( psi * (1 - |x^j|^2 + sum_k alpha^j_ik (x^j_k)^2) * b_j(X)
//!                - omega * (1 - b_j(X)) * g )
//! ```
//!
//! with `g = 1` ([`Variant::Standard`]) or `g = 1 - x^j_i`
//! ([`Variant::HeteroclinicBounded`]).

mod bump;
mod coefficients;
mod equilibria;
mod field;
mod jacobian;
mod state;

use thiserror::Error;

pub use bump::{bump, bump_derivative, bump_j};
pub use coefficients::{
    build_coefficients, coefficients_from_pair_matrices, CoefficientError, CoefficientOverride,
    CoefficientSet, Level, Orientation,
};
pub use equilibria::{designed_equilibria, equilibrium_state, Equilibrium, EquilibriumLabel};
pub use field::{
    eval_field, eval_field_log, from_log_chart, to_log_chart, FieldParams, Timescales, Variant,
    ZeroMask,
};
pub use jacobian::jacobian;
pub use state::{Coord, HierState, Layout};

pub(crate) use field::LOG_FLOOR;
pub(crate) use state::sup_distance;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("DimensionMismatch: expected a state of dimension {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("NonFiniteInput: coordinate {coordinate} is not finite")]
    NonFiniteInput { coordinate: String },
    #[error("IndexOutOfRange: index {index} for a vector of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("epsilon = {epsilon} violates 0 < epsilon < sqrt(2)/2")]
    EpsilonOutOfRange { epsilon: f64 },
    #[error("timescale {name} = {value} must be positive and finite")]
    NonPositiveTimescale { name: &'static str, value: f64 },
    #[error("coefficient matrices do not match the hierarchy")]
    CoefficientShape,
}
