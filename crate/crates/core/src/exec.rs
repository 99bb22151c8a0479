//! Fan-out over independent jobs.
//!
//! With the `parallel` feature (default) [`Execution::Parallel`] runs jobs on
//! the rayon pool; without it every mode runs sequentially.

use crate::integrator::{integrate, IntegrationError, IntegratorConfig, Trajectory};
use crate::vectorfield::{eval_field, FieldError, FieldParams, HierState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build actually runs [`Execution::Parallel`] on several threads.
    pub fn parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

/// Order-preserving map over `items`.
pub fn map<T, R, F>(exec: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        Execution::Parallel => par_map(items, f),
    }
}

#[cfg(feature = "parallel")]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Evaluates the field at every state.
pub fn eval_batch(states: &[HierState], p: &FieldParams, exec: Execution) -> Result<Vec<HierState>, FieldError> {
    map(exec, states, |s| eval_field(s, p)).into_iter().collect()
}

/// Integrates every initial state with the same parameters and settings.
pub fn simulate_batch(
    initial: &[HierState],
    p: &FieldParams,
    cfg: &IntegratorConfig,
    exec: Execution,
) -> Vec<Result<Trajectory, IntegrationError>> {
    map(exec, initial, |s| integrate(s, p, cfg))
}
