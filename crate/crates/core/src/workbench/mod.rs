//! Scenario files, command pipelines and result persistence.

mod output;
mod scenario;
mod svg;

use std::path::{Path, PathBuf};

use thiserror::Error;

pub use output::{
    csv_header, format_value, render_itineraries, render_report, render_witnesses, termination_line, write_text,
    write_timeseries, write_timeseries_to,
};
pub use scenario::{
    load_scenario, write_scenario, AnalysisSettings, CoefficientSource, Scenario, DEFAULT_C_MINUS, DEFAULT_C_PLUS,
};
pub use svg::{render_panels, write_panels, PlotOptions};

use crate::analysis::{
    itineraries_of, run_witness, run_witnesses, verify_realization, AnalysisError, RealizationReport,
    ScenarioItineraries, ScenarioRun, WitnessConfig, WitnessResult, WitnessSpec,
};
use crate::exec::{self, Execution};
use crate::hierarchy::Violation;
use crate::integrator::{integrate, IntegrationError, Trajectory};
use crate::vectorfield::Timescales;

/// Process exit codes shared by every command.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const VERIFICATION_FAILURE: u8 = 1;
    pub const INPUT_ERROR: u8 = 2;
    pub const INTEGRATION_FAILURE: u8 = 3;
}

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("ParseError: {0}")]
    Parse(String),
    #[error("SchemaError at {path}: {message}")]
    Schema { path: String, message: String },
    #[error("ValidationError at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("ValidationError at hierarchy: {}", list(.0))]
    Hierarchy(Vec<Violation>),
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error(transparent)]
    Integration(#[from] IntegrationError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

fn list(vs: &[Violation]) -> String {
    vs.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

impl WorkbenchError {
    pub fn exit_code(&self) -> u8 {
        match self {
            WorkbenchError::Integration(_) | WorkbenchError::Analysis(_) => exit::INTEGRATION_FAILURE,
            _ => exit::INPUT_ERROR,
        }
    }

    /// True for a readable document whose content breaks an invariant.
    pub fn is_violation(&self) -> bool {
        matches!(self, WorkbenchError::Validation { .. } | WorkbenchError::Hierarchy(_))
    }
}

fn ensure_dir(dir: &Path) -> Result<(), WorkbenchError> {
    std::fs::create_dir_all(dir).map_err(|source| WorkbenchError::Io { path: dir.to_path_buf(), source })
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub trajectory: Trajectory,
    pub itineraries: ScenarioItineraries,
    pub files: Vec<PathBuf>,
}

/// Integrates the scenario and writes `timeseries.csv`, `itinerary.txt` and,
/// when requested, SVG panels. An abnormal termination is reported in the
/// returned trajectory; the files cover the samples reached.
pub fn simulate(s: &Scenario, out: &Path, plots: Option<PlotOptions>) -> Result<SimulateOutput, WorkbenchError> {
    ensure_dir(out)?;
    let trajectory = integrate(&s.initial_state, &s.params, &s.integrator)?;
    let mut files = Vec::new();
    let csv = out.join("timeseries.csv");
    write_timeseries(&trajectory, &csv)?;
    files.push(csv);

    let it_cfg = s.analysis.itinerary();
    let grid = it_cfg.sampling(&s.integrator);
    let itineraries = if grid == s.integrator {
        itineraries_of(&trajectory, &s.params, &it_cfg)
    } else {
        itineraries_of(&integrate(&s.initial_state, &s.params, &grid)?, &s.params, &it_cfg)
    };
    let it_path = out.join("itinerary.txt");
    write_text(&it_path, &render_itineraries(&itineraries))?;
    files.push(it_path);

    if let Some(opts) = plots {
        files.extend(write_panels(&trajectory, &s.params, &opts, out)?);
    }
    Ok(SimulateOutput { trajectory, itineraries, files })
}

/// Runs the full realization check and writes `report.txt`.
pub fn verify(s: &Scenario, out: &Path, execution: Execution) -> Result<RealizationReport, WorkbenchError> {
    ensure_dir(out)?;
    let runs = [ScenarioRun { initial: s.initial_state.clone(), cfg: s.integrator }];
    let report = verify_realization(&s.params, &runs, &s.analysis.realization_options(execution))?;
    let title = s.name.as_deref().unwrap_or("scenario");
    write_text(out.join("report.txt"), &render_report(title, &report))?;
    Ok(report)
}

/// Witness runs at unit timescales, for one superstructure edge (0-based) or
/// for all of them. Writes `witness.txt`.
pub fn witnesses(
    s: &Scenario,
    edge: Option<(usize, usize)>,
    deltas: &[f64],
    out: &Path,
    execution: Execution,
) -> Result<Vec<WitnessResult>, WorkbenchError> {
    ensure_dir(out)?;
    let p = s.params.with_timescales(Timescales::default()).map_err(AnalysisError::from)?;
    let cfg = WitnessConfig::default();
    let results = match edge {
        None => run_witnesses(&p, deltas, &cfg, execution)?,
        Some((j, k)) => {
            let specs: Vec<_> = deltas.iter().map(|&d| WitnessSpec::new(j, k, d)).collect();
            exec::map(execution, &specs, |w| run_witness(w, &p, &cfg)).into_iter().collect::<Result<_, _>>()?
        }
    };
    write_text(out.join("witness.txt"), &render_witnesses(&results))?;
    Ok(results)
}
