//! Adaptive integration of the hierarchical field.
//!
//! The default chart is logarithmic: every positive coordinate `v` is
//! integrated as `u = ln v`, whose derivative is the bare growth rate. This
//! keeps coordinates that approach zero (by hundreds of orders of magnitude
//! near a heteroclinic cycle) representable. Coordinates that start at
//! exactly zero are never handed to the solver and stay bitwise zero.

mod dopri;

use thiserror::Error;

use crate::vectorfield::{Coord, FieldParams, HierState, ZeroMask, LOG_FLOOR};
use dopri::{sample_grid, solve, Outcome, Rhs, Settings};

/// Divergence bound on coordinate magnitude (original chart).
pub const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    /// Integrates the time-reversed field; trajectory times are elapsed
    /// backward time.
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub t_end: f64,
    pub max_step: Option<f64>,
    pub sample_dt: f64,
    pub direction: Direction,
    pub initial_step: f64,
    pub max_steps: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-12,
            atol: 1e-12,
            t_end: 2000.0,
            max_step: None,
            sample_dt: 0.1,
            direction: Direction::Forward,
            initial_step: 1e-4,
            max_steps: 200_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn with_t_end(self, t_end: f64) -> Self {
        IntegratorConfig { t_end, ..self }
    }

    pub fn backward(self) -> Self {
        IntegratorConfig { direction: Direction::Backward, ..self }
    }

    pub fn validate(&self) -> Result<(), IntegrationError> {
        let bad = |what: &'static str, value: f64| Err(IntegrationError::InvalidConfig { what, value });
        if !(self.rtol > 0.0) {
            return bad("rtol", self.rtol);
        }
        if !(self.atol > 0.0) {
            return bad("atol", self.atol);
        }
        // t_end = 0 is accepted and yields the initial sample alone
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return bad("t_end", self.t_end);
        }
        if !(self.sample_dt > 0.0) {
            return bad("sample_dt", self.sample_dt);
        }
        if let Some(m) = self.max_step {
            if !(m > 0.0) {
                return bad("max_step", m);
            }
        }
        if !(self.initial_step > 0.0) {
            return bad("initial_step", self.initial_step);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    /// A coordinate crossed [`DIVERGENCE_BOUND`] at elapsed time `time`.
    Diverged { time: f64, coordinate: Coord },
    StepFailure { time: f64, step: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepStats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
    pub final_step: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<HierState>,
    pub stats: StepStats,
    pub termination: Termination,
    pub direction: Direction,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntegrationError {
    #[error("invalid integrator setting {what} = {value}")]
    InvalidConfig { what: &'static str, value: f64 },
    #[error("initial state: {0}")]
    InvalidInitialState(String),
    #[error("Diverged: {coordinate} left the bound {bound:e} at t = {time}")]
    Diverged { time: f64, coordinate: Coord, bound: f64 },
    #[error("StepFailure: step size {step:e} underflowed at t = {time}")]
    StepFailure { time: f64, step: f64 },
    #[error("OutOfRange: t = {t} outside [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },
}

impl Trajectory {
    pub fn last(&self) -> &HierState {
        self.states.last().expect("trajectory has at least one sample")
    }

    pub fn t_last(&self) -> f64 {
        *self.times.last().expect("trajectory has at least one sample")
    }

    pub fn is_completed(&self) -> bool {
        self.termination == Termination::Completed
    }

    /// Converts an abnormal termination into an error.
    pub fn ensure_completed(&self) -> Result<(), IntegrationError> {
        match self.termination {
            Termination::Completed => Ok(()),
            Termination::Diverged { time, coordinate } => Err(IntegrationError::Diverged {
                time,
                coordinate,
                bound: DIVERGENCE_BOUND,
            }),
            Termination::StepFailure { time, step } => Err(IntegrationError::StepFailure { time, step }),
        }
    }
}

/// Linear interpolation between the samples bracketing `t`.
pub fn sample_at(traj: &Trajectory, t: f64) -> Result<HierState, IntegrationError> {
    let t_max = traj.t_last();
    if !(t >= 0.0 && t <= t_max) {
        return Err(IntegrationError::OutOfRange { t, t_max });
    }
    let hi = traj.times.partition_point(|&s| s < t);
    if traj.times[hi] == t {
        return Ok(traj.states[hi].clone());
    }
    let lo = hi - 1;
    let (t0, t1) = (traj.times[lo], traj.times[hi]);
    let w = (t - t0) / (t1 - t0);
    let (a, b) = (traj.states[lo].values(), traj.states[hi].values());
    let v = a.iter().zip(b).map(|(x, y)| x + w * (y - x)).collect();
    Ok(HierState::from_flat(traj.states[lo].layout().clone(), v))
}

struct LogChart<'a> {
    p: &'a FieldParams,
    mask: &'a [bool],
    active: &'a [usize],
    sign: f64,
    full_u: Vec<f64>,
    full_rate: Vec<f64>,
    scratch: Vec<f64>,
}

impl Rhs for LogChart<'_> {
    fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        for (&k, &v) in self.active.iter().zip(y) {
            self.full_u[k] = v;
        }
        self.p.log_rates_into(&self.full_u, self.mask, &mut self.scratch, &mut self.full_rate);
        for (d, &k) in dy.iter_mut().zip(self.active) {
            *d = self.sign * self.full_rate[k];
        }
    }

    fn diverged(&self, y: &[f64]) -> Option<usize> {
        let bound = DIVERGENCE_BOUND.ln();
        y.iter().position(|&u| !(u <= bound)).map(|i| self.active[i])
    }
}

struct OriginalChart<'a> {
    p: &'a FieldParams,
    sign: f64,
}

impl Rhs for OriginalChart<'_> {
    fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        self.p.derivative_into(y, dy);
        if self.sign < 0.0 {
            dy.iter_mut().for_each(|d| *d = -*d);
        }
    }

    fn diverged(&self, y: &[f64]) -> Option<usize> {
        y.iter().position(|&v| !(v.abs() <= DIVERGENCE_BOUND))
    }
}

fn settings(cfg: &IntegratorConfig) -> Settings {
    Settings {
        rtol: cfg.rtol,
        atol: cfg.atol,
        t_end: cfg.t_end,
        h0: cfg.initial_step,
        max_step: cfg.max_step.unwrap_or(f64::INFINITY),
        max_steps: cfg.max_steps,
    }
}

fn sign(d: Direction) -> f64 {
    match d {
        Direction::Forward => 1.0,
        Direction::Backward => -1.0,
    }
}

fn finish(
    p: &FieldParams,
    times: Vec<f64>,
    states: Vec<HierState>,
    outcome: Outcome,
    counters: dopri::Counters,
    direction: Direction,
) -> Trajectory {
    let termination = match outcome {
        Outcome::Completed => Termination::Completed,
        Outcome::Diverged { time, index } => {
            Termination::Diverged { time, coordinate: p.layout().coord(index) }
        }
        Outcome::StepFailure { time, step } => Termination::StepFailure { time, step },
    };
    Trajectory {
        times,
        states,
        stats: StepStats {
            accepted: counters.accepted,
            rejected: counters.rejected,
            evaluations: counters.evaluations,
            final_step: counters.last_step,
        },
        termination,
        direction,
    }
}

/// Integrates in the log chart and samples on the uniform output grid.
///
/// The initial state must be nonnegative; its exact zeros form the mask.
pub fn integrate(s0: &HierState, p: &FieldParams, cfg: &IntegratorConfig) -> Result<Trajectory, IntegrationError> {
    cfg.validate()?;
    p.check_state(s0).map_err(|e| IntegrationError::InvalidInitialState(e.to_string()))?;
    if let Some(k) = s0.values().iter().position(|&v| v < 0.0) {
        return Err(IntegrationError::InvalidInitialState(format!(
            "coordinate {} is negative; the log chart needs nonnegative states",
            p.layout().coord(k)
        )));
    }
    let mask = ZeroMask::of(s0);
    let flags = mask.flags();
    let active: Vec<usize> = (0..s0.dim()).filter(|&k| !flags[k]).collect();
    let u0: Vec<f64> = active.iter().map(|&k| s0.values()[k].ln()).collect();
    if let Some(i) = u0.iter().position(|u| !u.is_finite() || *u < LOG_FLOOR) {
        return Err(IntegrationError::InvalidInitialState(format!(
            "coordinate {} is below the log-chart floor",
            p.layout().coord(active[i])
        )));
    }

    let dim = s0.dim();
    let mut rhs = LogChart {
        p,
        mask: flags,
        active: &active,
        sign: sign(cfg.direction),
        full_u: vec![0.0; dim],
        full_rate: vec![0.0; dim],
        scratch: vec![0.0; dim],
    };
    let grid = sample_grid(cfg.t_end, cfg.sample_dt);
    let mut times = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let layout = p.layout().clone();
    let (outcome, counters) = solve(&mut rhs, &u0, &settings(cfg), &grid, |t, u| {
        let mut v = vec![0.0; dim];
        for (&k, &x) in active.iter().zip(u) {
            v[k] = x.exp();
        }
        times.push(t);
        states.push(HierState::from_flat(layout.clone(), v));
    });
    // the initial sample is reproduced exactly rather than through exp(ln(.))
    if let Some(first) = states.first_mut() {
        *first = s0.clone();
    }
    Ok(finish(p, times, states, outcome, counters, cfg.direction))
}

/// Same contract as [`integrate`], in the original coordinates. Used to
/// cross-check the log chart.
pub fn integrate_original_chart(
    s0: &HierState,
    p: &FieldParams,
    cfg: &IntegratorConfig,
) -> Result<Trajectory, IntegrationError> {
    cfg.validate()?;
    p.check_state(s0).map_err(|e| IntegrationError::InvalidInitialState(e.to_string()))?;
    let mut rhs = OriginalChart { p, sign: sign(cfg.direction) };
    let grid = sample_grid(cfg.t_end, cfg.sample_dt);
    let mut times = Vec::with_capacity(grid.len());
    let mut states = Vec::with_capacity(grid.len());
    let layout = p.layout().clone();
    let (outcome, counters) = solve(&mut rhs, s0.values(), &settings(cfg), &grid, |t, y| {
        times.push(t);
        states.push(HierState::from_flat(layout.clone(), y.to_vec()));
    });
    Ok(finish(p, times, states, outcome, counters, cfg.direction))
}

#[cfg(test)]
mod tests;
