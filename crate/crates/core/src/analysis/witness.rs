use std::fmt;

use super::AnalysisError;
use crate::exec::{self, Execution};
use crate::integrator::{integrate, IntegratorConfig, Termination};
use crate::vectorfield::{equilibrium_state, Coord, EquilibriumLabel, FieldParams, HierState, Variant, ZeroMask};

/// Excitable-connection witness along the superstructure edge `j -> k` (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessSpec {
    pub j: usize,
    pub k: usize,
    pub delta: f64,
}

impl WitnessSpec {
    pub fn new(j: usize, k: usize, delta: f64) -> Self {
        WitnessSpec { j, k, delta }
    }

    /// Offset used for `1 - X_j`, `X_k` and `x^k_1`.
    pub fn eta(&self) -> f64 {
        self.delta / 2.0
    }
}

impl fmt::Display for WitnessSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} (delta {:e})", self.j + 1, self.k + 1, self.delta)
    }
}

/// Witness start: inside the `(j, k)` invariant subspace, within `delta` of `Sub(j, 1)`.
pub fn witness_initial_condition(w: &WitnessSpec, p: &FieldParams) -> Result<HierState, AnalysisError> {
    let n = p.layout().n_super();
    for v in [w.j, w.k] {
        if v >= n {
            return Err(AnalysisError::VertexOutOfRange { vertex: v + 1, n });
        }
    }
    if !p.hierarchy().superstructure().has_edge(w.j, w.k) {
        return Err(AnalysisError::NotAnEdge { j: w.j, k: w.k });
    }
    if !(w.delta > 0.0 && w.delta < 1.0) {
        return Err(AnalysisError::BadDelta(w.delta));
    }
    let eta = w.eta();
    let mut s = HierState::zeros(p.layout().clone());
    s.set(Coord::Super(w.j), 1.0 - eta);
    s.set(Coord::Super(w.k), eta);
    s.set(Coord::Sub(w.j, 0), 1.0);
    s.set(Coord::Sub(w.k, 0), eta);
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessConfig {
    /// First forward horizon; doubled until convergence or `t_max`.
    pub t_end: f64,
    pub t_max: f64,
    /// Convergence radius around `Sub(k, 1)`.
    pub tol: f64,
    pub backward_t_end: f64,
    /// Radius around 1 for the bounded variant's backward limit.
    pub bounded_tol: f64,
    pub rtol: f64,
    pub atol: f64,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig {
            t_end: 100.0,
            t_max: 12_800.0,
            tol: 1e-6,
            backward_t_end: 200.0,
            bounded_tol: 1e-3,
            rtol: 1e-12,
            atol: 1e-12,
        }
    }
}

impl WitnessConfig {
    fn integrator(&self, t_end: f64) -> IntegratorConfig {
        IntegratorConfig {
            rtol: self.rtol,
            atol: self.atol,
            t_end,
            sample_dt: (t_end / 100.0).max(1e-3),
            ..IntegratorConfig::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BackwardOutcome {
    pub termination: Termination,
    /// Elapsed backward time covered.
    pub t_reached: f64,
    /// For a divergence: whether the diverging coordinate lies in a
    /// substructure block whose bump vanished at the last sample.
    pub in_inactive_substructure: bool,
    /// Largest `|x - 1|` over nonzero coordinates of inactive blocks at the end.
    pub inactive_gap_to_one: f64,
    /// Empty-alpha-limit evidence for the field variant in use.
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessResult {
    pub spec: WitnessSpec,
    pub forward_distance: f64,
    pub forward_t_end: f64,
    pub forward_termination: Termination,
    pub converged: bool,
    pub backward: BackwardOutcome,
}

impl fmt::Display for WitnessResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: |x(T) - Sub({},1)| = {:.3e} at T = {} {}; backward ",
            self.spec,
            self.spec.k + 1,
            self.forward_distance,
            self.forward_t_end,
            if self.converged { "converged" } else { "NOT converged" }
        )?;
        match self.backward.termination {
            Termination::Diverged { time, coordinate } => write!(f, "diverged in {coordinate} at t = -{time:.3}")?,
            Termination::Completed => write!(
                f,
                "bounded to t = -{}, max |x - 1| = {:.2e}",
                self.backward.t_reached, self.backward.inactive_gap_to_one
            )?,
            Termination::StepFailure { time, .. } => write!(f, "step failure at t = -{time:.3}")?,
        }
        write!(f, " {}", if self.backward.pass { "ok" } else { "FAIL" })
    }
}

fn backward_run(s0: &HierState, p: &FieldParams, cfg: &WitnessConfig) -> Result<BackwardOutcome, AnalysisError> {
    let icfg = IntegratorConfig { sample_dt: 0.1, ..cfg.integrator(cfg.backward_t_end) }.backward();
    let traj = integrate(s0, p, &icfg)?;
    let last = traj.last();
    let layout = p.layout();
    let mask = ZeroMask::of(s0);
    let inactive: Vec<bool> = (0..layout.n_blocks()).map(|b| p.bump_of(last.super_block(), b) == 0.0).collect();
    let mut gap: f64 = 0.0;
    for (b, &off) in inactive.iter().enumerate() {
        if !off {
            continue;
        }
        for idx in layout.sub_range(b) {
            if !mask.is_masked(idx) {
                gap = gap.max((last.values()[idx] - 1.0).abs());
            }
        }
    }
    let in_inactive_substructure = match traj.termination {
        Termination::Diverged { coordinate: Coord::Sub(b, _), .. } => inactive[b],
        _ => false,
    };
    let pass = match p.variant() {
        Variant::Standard => in_inactive_substructure,
        Variant::HeteroclinicBounded => traj.is_completed() && gap <= cfg.bounded_tol,
    };
    Ok(BackwardOutcome {
        termination: traj.termination,
        t_reached: traj.t_last(),
        in_inactive_substructure,
        inactive_gap_to_one: gap,
        pass,
    })
}

/// Forward convergence to `Sub(k, 1)` with an adaptively doubled horizon, plus
/// a backward run from the same start.
pub fn run_witness(w: &WitnessSpec, p: &FieldParams, cfg: &WitnessConfig) -> Result<WitnessResult, AnalysisError> {
    let s0 = witness_initial_condition(w, p)?;
    let target = equilibrium_state(p, EquilibriumLabel::Sub(w.k, 0));
    let mut t_end = cfg.t_end;
    let (distance, termination) = loop {
        let traj = integrate(&s0, p, &cfg.integrator(t_end))?;
        let d = traj.last().sup_distance(&target);
        if d <= cfg.tol || !traj.is_completed() || t_end * 2.0 > cfg.t_max {
            break (d, traj.termination);
        }
        t_end *= 2.0;
    };
    let converged = distance <= cfg.tol && termination == Termination::Completed;
    Ok(WitnessResult {
        spec: *w,
        forward_distance: distance,
        forward_t_end: t_end,
        forward_termination: termination,
        converged,
        backward: backward_run(&s0, p, cfg)?,
    })
}

/// Witnesses for every superstructure edge and every `delta`.
pub fn run_witnesses(
    p: &FieldParams,
    deltas: &[f64],
    cfg: &WitnessConfig,
    exec: Execution,
) -> Result<Vec<WitnessResult>, AnalysisError> {
    let specs: Vec<WitnessSpec> = p
        .hierarchy()
        .superstructure()
        .edges()
        .flat_map(|(j, k)| deltas.iter().map(move |&d| WitnessSpec::new(j, k, d)))
        .collect();
    exec::map(exec, &specs, |w| run_witness(w, p, cfg)).into_iter().collect()
}
