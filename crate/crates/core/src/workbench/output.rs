//! Result files: timeseries CSV and text reports.

use std::fmt::Write as _;
use std::path::Path;

use super::WorkbenchError;
use crate::analysis::{RealizationReport, ScenarioItineraries, WitnessResult};
use crate::integrator::{Termination, Trajectory};
use crate::vectorfield::Layout;

/// Full-precision rendering; exact zeros print as `0`.
pub fn format_value(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// CSV header: `t`, `X1..XN`, then `x{j}_{i}` block by block.
pub fn csv_header(layout: &Layout) -> Vec<String> {
    std::iter::once("t".to_string()).chain(layout.labels()).collect()
}

pub fn write_timeseries_to<W: std::io::Write>(traj: &Trajectory, out: W) -> Result<(), csv::Error> {
    let layout = traj.states.first().expect("trajectory has at least one sample").layout();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(layout))?;
    let mut row = Vec::with_capacity(layout.dim() + 1);
    for (t, s) in traj.times.iter().zip(&traj.states) {
        row.clear();
        row.push(format_value(*t));
        row.extend(s.values().iter().map(|&v| format_value(v)));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_timeseries(traj: &Trajectory, path: impl AsRef<Path>) -> Result<(), WorkbenchError> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| WorkbenchError::Io { path: path.to_path_buf(), source })?;
    write_timeseries_to(traj, std::io::BufWriter::new(file)).map_err(|e| WorkbenchError::Csv {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn termination_line(t: &Termination) -> String {
    match t {
        Termination::Completed => "completed".to_string(),
        Termination::Diverged { time, coordinate } => {
            format!("Diverged: {coordinate} left the divergence bound at t = {time}")
        }
        Termination::StepFailure { time, step } => format!("StepFailure: step {step:e} at t = {time}"),
    }
}

pub fn render_itineraries(its: &ScenarioItineraries) -> String {
    let mut s = String::new();
    writeln!(s, "termination: {}", termination_line(&its.termination)).unwrap();
    for (r, c) in its.reports.iter().zip(&its.checks) {
        writeln!(s).unwrap();
        write!(s, "{r}").unwrap();
        writeln!(s, "check: {c}").unwrap();
    }
    s
}

pub fn render_witnesses(ws: &[WitnessResult]) -> String {
    let mut s = String::new();
    for w in ws {
        writeln!(s, "{w}").unwrap();
    }
    s
}

pub fn render_report(title: &str, report: &RealizationReport) -> String {
    format!("realization report: {title}\n\n{report}")
}

pub fn write_text(path: impl AsRef<Path>, text: &str) -> Result<(), WorkbenchError> {
    let path = path.as_ref();
    std::fs::write(path, text).map_err(|source| WorkbenchError::Io { path: path.to_path_buf(), source })
}
