use std::fmt;

use super::eigen::{check_edge_eigen_correspondence, EigenCheck};
use super::itinerary::{check_itinerary_against, extract_itinerary, ItineraryCheck, ItineraryConfig, ItineraryReport};
use super::residuals::{verify_equilibria, ResidualReport};
use super::witness::{run_witnesses, WitnessConfig, WitnessResult};
use super::AnalysisError;
use crate::exec::{self, Execution};
use crate::integrator::{integrate, IntegratorConfig, Termination, Trajectory};
use crate::vectorfield::{FieldParams, HierState, Level, Timescales};

/// One simulation whose itineraries are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRun {
    pub initial: HierState,
    pub cfg: IntegratorConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationOptions {
    pub residual_tol: f64,
    pub itinerary: ItineraryConfig,
    pub witness_deltas: Vec<f64>,
    pub witness: WitnessConfig,
    /// Timescales for witness runs.
    pub witness_timescales: Timescales,
    pub execution: Execution,
}

impl Default for RealizationOptions {
    fn default() -> Self {
        RealizationOptions {
            residual_tol: 1e-12,
            itinerary: ItineraryConfig::default(),
            witness_deltas: vec![1e-1, 1e-2, 1e-3],
            witness: WitnessConfig::default(),
            witness_timescales: Timescales::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioItineraries {
    pub termination: Termination,
    pub reports: Vec<ItineraryReport>,
    pub checks: Vec<ItineraryCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub name: &'static str,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealizationReport {
    pub equilibria: ResidualReport,
    pub eigen: EigenCheck,
    pub itineraries: Vec<ScenarioItineraries>,
    pub witnesses: Vec<WitnessResult>,
    pub verdicts: Vec<Criterion>,
    pub pass: bool,
}

/// All levels of one trajectory, checked against their digraphs.
pub fn itineraries_of(traj: &Trajectory, p: &FieldParams, cfg: &ItineraryConfig) -> ScenarioItineraries {
    let h = p.hierarchy();
    let mut levels = vec![Level::Super];
    levels.extend((0..h.n_super()).map(Level::Sub));
    let reports: Vec<ItineraryReport> = levels.iter().map(|&l| extract_itinerary(traj, p, l, cfg)).collect();
    let checks = reports
        .iter()
        .map(|r| {
            let d = match r.level {
                Level::Super => h.superstructure(),
                Level::Sub(j) => h.substructure(j),
            };
            check_itinerary_against(r, d)
        })
        .collect();
    ScenarioItineraries { termination: traj.termination, reports, checks }
}

/// Aggregates equilibrium residuals, the eigenvalue/edge correspondence,
/// itinerary checks over `scenarios` and witnesses over all superstructure edges.
pub fn verify_realization(
    p: &FieldParams,
    scenarios: &[ScenarioRun],
    opts: &RealizationOptions,
) -> Result<RealizationReport, AnalysisError> {
    let equilibria = verify_equilibria(p, opts.residual_tol);
    let eigen = check_edge_eigen_correspondence(p)?;

    let runs = exec::map(opts.execution, scenarios, |s| integrate(&s.initial, p, &opts.itinerary.sampling(&s.cfg)));
    let mut itineraries = Vec::with_capacity(runs.len());
    for run in runs {
        let traj = run?;
        traj.ensure_completed()?;
        itineraries.push(itineraries_of(&traj, p, &opts.itinerary));
    }

    let wp = p.with_timescales(opts.witness_timescales)?;
    let witnesses = run_witnesses(&wp, &opts.witness_deltas, &opts.witness, opts.execution)?;

    let verdicts = vec![
        Criterion { name: "equilibrium residuals", pass: equilibria.pass },
        Criterion { name: "eigenvalue/edge correspondence", pass: eigen.pass },
        Criterion { name: "itineraries follow the digraphs", pass: itineraries.iter().flat_map(|s| &s.checks).all(|c| c.pass) },
        Criterion { name: "witnesses converge", pass: witnesses.iter().all(|w| w.converged) },
        Criterion { name: "backward-time evidence", pass: witnesses.iter().all(|w| w.backward.pass) },
    ];
    let pass = verdicts.iter().all(|c| c.pass);
    Ok(RealizationReport { equilibria, eigen, itineraries, witnesses, verdicts, pass })
}

impl fmt::Display for RealizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "verdict: {}", if self.pass { "PASS" } else { "FAIL" })?;
        for c in &self.verdicts {
            writeln!(f, "  [{}] {}", if c.pass { "pass" } else { "FAIL" }, c.name)?;
        }

        writeln!(f, "\nequilibrium residuals (tol {:e})", self.equilibria.tol)?;
        for (label, r) in &self.equilibria.residuals {
            writeln!(f, "  {:<10} {r:.3e}", label.to_string())?;
        }
        writeln!(f, "  max {:.3e}", self.equilibria.max_residual)?;

        writeln!(f, "\npositive transverse eigendirections vs out-neighbours")?;
        for v in &self.eigen.vertices {
            writeln!(f, "  {v}")?;
        }

        for (i, s) in self.itineraries.iter().enumerate() {
            writeln!(f, "\nscenario {} itineraries", i + 1)?;
            for (r, c) in s.reports.iter().zip(&s.checks) {
                let seq: Vec<String> = r.sequence().iter().map(|v| v.to_string()).collect();
                writeln!(f, "  {c}")?;
                writeln!(f, "    {}", seq.join(" "))?;
            }
        }

        writeln!(f, "\nwitnesses")?;
        for w in &self.witnesses {
            writeln!(f, "  {w}")?;
        }
        Ok(())
    }
}
