//! Minimal SVG timeseries panels: one for the superstructure, one per
//! substructure with its active windows shaded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::WorkbenchError;
use crate::integrator::Trajectory;
use crate::vectorfield::FieldParams;

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 220.0;
const LEFT: f64 = 56.0;
const RIGHT: f64 = 12.0;
const TOP: f64 = 24.0;
const BOTTOM: f64 = 28.0;
const MAX_POINTS: usize = 2000;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlotOptions {
    /// Plot `log10` of each coordinate, clipped at `log_floor`.
    pub log_scale: bool,
    pub log_floor: f64,
}

impl Default for PlotOptions {
    fn default() -> Self {
        PlotOptions { log_scale: false, log_floor: -16.0 }
    }
}

/// Time spans where the bump of substructure `j` is positive.
fn active_spans(traj: &Trajectory, p: &FieldParams, j: usize) -> Vec<(f64, f64)> {
    let mut spans = Vec::new();
    let mut start = None;
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let on = p.bump_of(s.super_block(), j) > 0.0;
        match (on, start) {
            (true, None) => start = Some(*t),
            (false, Some(a)) => {
                spans.push((a, *t));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(a) = start {
        spans.push((a, traj.t_last()));
    }
    spans
}

fn panel(
    title: &str,
    traj: &Trajectory,
    series: &[(String, Vec<f64>)],
    shade: &[(f64, f64)],
    opts: &PlotOptions,
) -> String {
    let t0 = traj.times[0];
    let t1 = traj.t_last().max(t0 + f64::MIN_POSITIVE);
    let tr = |v: f64| if opts.log_scale { v.max(10f64.powf(opts.log_floor)).log10() } else { v };
    let (ymin, ymax) = if opts.log_scale {
        (opts.log_floor, 0.5)
    } else {
        let hi = series.iter().flat_map(|(_, v)| v.iter().copied()).fold(1.0, f64::max);
        (0.0, hi * 1.05)
    };
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let xs = |t: f64| LEFT + (t - t0) / (t1 - t0) * pw;
    let ys = |y: f64| TOP + (1.0 - (y - ymin) / (ymax - ymin)) * ph;

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="11">"#).unwrap();
    writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#).unwrap();
    for &(a, b) in shade {
        writeln!(
            s,
            r##"<rect x="{:.2}" y="{TOP}" width="{:.2}" height="{ph}" fill="#000000" fill-opacity="0.08"/>"##,
            xs(a),
            (xs(b) - xs(a)).max(0.5)
        )
        .unwrap();
    }
    writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#).unwrap();
    writeln!(s, r#"<text x="{LEFT}" y="16">{title}</text>"#).unwrap();
    for k in 0..=4 {
        let t = t0 + (t1 - t0) * k as f64 / 4.0;
        let y = ymin + (ymax - ymin) * k as f64 / 4.0;
        writeln!(s, r#"<text x="{:.2}" y="{}" text-anchor="middle">{t:.0}</text>"#, xs(t), HEIGHT - 10.0).unwrap();
        let label = if opts.log_scale { format!("1e{y:.0}") } else { format!("{y:.2}") };
        writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 4.0, ys(y) + 4.0).unwrap();
    }

    let stride = traj.times.len().div_ceil(MAX_POINTS).max(1);
    for (c, (name, values)) in series.iter().enumerate() {
        let color = PALETTE[c % PALETTE.len()];
        let mut pts = String::new();
        for k in (0..values.len()).step_by(stride).chain(std::iter::once(values.len() - 1)) {
            write!(pts, "{:.2},{:.2} ", xs(traj.times[k]), ys(tr(values[k]).clamp(ymin, ymax))).unwrap();
        }
        writeln!(s, r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#, pts.trim_end()).unwrap();
        writeln!(
            s,
            r#"<text x="{:.2}" y="16" fill="{color}">{name}</text>"#,
            WIDTH - RIGHT - 60.0 * (series.len() - c) as f64
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

/// `(file name, svg)` for the superstructure panel and every substructure panel.
pub fn render_panels(traj: &Trajectory, p: &FieldParams, opts: &PlotOptions) -> Vec<(String, String)> {
    let layout = p.layout();
    let labels = layout.labels();
    let column = |idx: usize| traj.states.iter().map(|s| s.values()[idx]).collect::<Vec<f64>>();
    let suffix = if opts.log_scale { "_log" } else { "" };
    let mut out = Vec::new();
    let sup: Vec<_> = layout.super_range().map(|i| (labels[i].clone(), column(i))).collect();
    out.push((format!("panel_X{suffix}.svg"), panel("X", traj, &sup, &[], opts)));
    for j in 0..layout.n_blocks() {
        let series: Vec<_> = layout.sub_range(j).map(|i| (labels[i].clone(), column(i))).collect();
        let shade = active_spans(traj, p, j);
        out.push((format!("panel_x{}{suffix}.svg", j + 1), panel(&format!("x{}", j + 1), traj, &series, &shade, opts)));
    }
    out
}

pub fn write_panels(
    traj: &Trajectory,
    p: &FieldParams,
    opts: &PlotOptions,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>, WorkbenchError> {
    let mut written = Vec::new();
    for (name, svg) in render_panels(traj, p, opts) {
        let path = dir.as_ref().join(name);
        std::fs::write(&path, svg).map_err(|source| WorkbenchError::Io { path: path.clone(), source })?;
        written.push(path);
    }
    Ok(written)
}
