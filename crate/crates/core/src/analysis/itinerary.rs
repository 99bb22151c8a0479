use std::fmt;

use crate::hierarchy::Digraph;
use crate::integrator::{IntegratorConfig, Trajectory};
use crate::vectorfield::{sup_distance, FieldParams, Level, Timescales};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VisitKind {
    /// The block was within `near_tol` of the unit vector.
    Near,
    /// Coded by the dominant coordinate in a stretch without near visits:
    /// a window's lead-in or a gap between two near visits.
    Dominant,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visit {
    /// 0-based vertex.
    pub vertex: usize,
    pub enter: f64,
    pub exit: f64,
    /// Index into [`ItineraryReport::active_windows`].
    pub window: usize,
    pub kind: VisitKind,
}

impl Visit {
    pub fn dwell(&self) -> f64 {
        self.exit - self.enter
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItineraryConfig {
    pub near_tol: f64,
    /// Minimum dwell in superstructure time; see [`ItineraryConfig::min_dwell_at`].
    pub min_dwell: f64,
    /// Code lead-ins and gaps between near visits by the dominant coordinate.
    pub dominant_fill: bool,
    /// Coarsest sampling step for trajectories produced for extraction.
    pub sample_dt: f64,
}

impl Default for ItineraryConfig {
    fn default() -> Self {
        ItineraryConfig { near_tol: 0.1, min_dwell: 1.0, dominant_fill: true, sample_dt: 0.01 }
    }
}

impl ItineraryConfig {
    /// Minimum dwell applied at `level`. Substructures run faster by `psi / phi`,
    /// so their threshold is shrunk by that factor.
    pub fn min_dwell_at(&self, level: Level, ts: Timescales) -> f64 {
        match level {
            Level::Super => self.min_dwell,
            Level::Sub(_) => self.min_dwell * ts.phi / ts.psi,
        }
    }

    /// `cfg` with its sampling step refined to at most [`ItineraryConfig::sample_dt`].
    pub fn sampling(&self, cfg: &IntegratorConfig) -> IntegratorConfig {
        IntegratorConfig { sample_dt: cfg.sample_dt.min(self.sample_dt), ..*cfg }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItineraryReport {
    pub level: Level,
    pub visits: Vec<Visit>,
    /// Sample-time intervals considered. A single window spanning the whole
    /// trajectory at the superstructure level, the maximal runs with
    /// `bump_j(X) > 0` for a substructure.
    pub active_windows: Vec<(f64, f64)>,
}

impl ItineraryReport {
    /// 1-based vertex labels of all visits.
    pub fn sequence(&self) -> Vec<usize> {
        self.visits.iter().map(|v| v.vertex + 1).collect()
    }

    /// 1-based vertex labels of the visits inside window `w`.
    pub fn window_sequence(&self, w: usize) -> Vec<usize> {
        self.visits.iter().filter(|v| v.window == w).map(|v| v.vertex + 1).collect()
    }

    pub fn visits_in(&self, w: usize) -> impl Iterator<Item = &Visit> {
        self.visits.iter().filter(move |v| v.window == w)
    }
}

impl fmt::Display for ItineraryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "level {}: {} visits in {} windows", self.level, self.visits.len(), self.active_windows.len())?;
        for (w, &(a, b)) in self.active_windows.iter().enumerate() {
            let seq: Vec<String> = self.window_sequence(w).iter().map(|v| v.to_string()).collect();
            writeln!(f, "  window {} [{a:.2}, {b:.2}]: {}", w + 1, seq.join(" "))?;
            for v in self.visits_in(w) {
                let tag = match v.kind {
                    VisitKind::Near => "",
                    VisitKind::Dominant => " (dominant)",
                };
                writeln!(f, "    {} {:.2} .. {:.2}{tag}", v.vertex + 1, v.enter, v.exit)?;
            }
        }
        Ok(())
    }
}

fn near_vertex(block: &[f64], tol: f64, unit: &mut [f64]) -> Option<usize> {
    (0..block.len()).find(|&i| {
        unit.iter_mut().enumerate().for_each(|(k, u)| *u = if k == i { 1.0 } else { 0.0 });
        sup_distance(block, unit) < tol
    })
}

fn dominant_vertex(block: &[f64]) -> Option<usize> {
    let (mut best, mut arg, mut tie) = (0.0, None, false);
    for (i, &v) in block.iter().enumerate() {
        if v > best {
            (best, arg, tie) = (v, Some(i), false);
        } else if v == best && v > 0.0 {
            tie = true;
        }
    }
    if tie {
        None
    } else {
        arg
    }
}

/// Runs of equal `Some` labels over sample indices `lo..hi`, as
/// `(vertex, first, last)`.
fn runs(labels: &[Option<usize>], lo: usize, hi: usize) -> Vec<(usize, usize, usize)> {
    let mut out: Vec<(usize, usize, usize)> = Vec::new();
    for k in lo..hi {
        let Some(v) = labels[k] else { continue };
        match out.last_mut() {
            Some(r) if r.0 == v && r.2 + 1 == k => r.2 = k,
            _ => out.push((v, k, k)),
        }
    }
    out
}

/// Symbolic itinerary of one level.
///
/// A visit to vertex `i` lasts while the block is within `near_tol`
/// (sup-norm) of `e_i`. Visit boundaries sit halfway between the last sample
/// outside and the first sample inside, so a single-sample visit lasts one
/// sampling step. With `cfg.dominant_fill`, stretches of a window before or
/// between near visits are coded by the dominant coordinate, which catches
/// shallow passes that never get within `near_tol`. Visits
/// shorter than [`ItineraryConfig::min_dwell_at`] are dropped and neighbours
/// that then repeat a vertex are merged.
pub fn extract_itinerary(traj: &Trajectory, p: &FieldParams, level: Level, cfg: &ItineraryConfig) -> ItineraryReport {
    let t = &traj.times;
    let n = t.len();
    let block = |k: usize| match level {
        Level::Super => traj.states[k].super_block(),
        Level::Sub(j) => traj.states[k].sub_block(j),
    };

    let mut windows: Vec<(usize, usize)> = Vec::new();
    match level {
        Level::Super if n > 0 => windows.push((0, n - 1)),
        Level::Super => {}
        Level::Sub(j) => {
            let mut open: Option<usize> = None;
            for k in 0..n {
                let active = p.bump_of(traj.states[k].super_block(), j) > 0.0;
                match (active, open) {
                    (true, None) => open = Some(k),
                    (false, Some(a)) => {
                        windows.push((a, k - 1));
                        open = None;
                    }
                    _ => {}
                }
            }
            if let Some(a) = open {
                windows.push((a, n - 1));
            }
        }
    }

    let size = match level {
        Level::Super => traj.states.first().map_or(0, |s| s.layout().n_super()),
        Level::Sub(j) => traj.states.first().map_or(0, |s| s.layout().sub_size(j)),
    };
    let mut unit = vec![0.0; size];
    let min_dwell = cfg.min_dwell_at(level, p.timescales());
    let mut visits = Vec::new();

    for (w, &(ws, we)) in windows.iter().enumerate() {
        let edge_in = |k: usize| if k > ws { 0.5 * (t[k - 1] + t[k]) } else { t[k] };
        let edge_out = |k: usize| if k < we { 0.5 * (t[k] + t[k + 1]) } else { t[k] };
        let near: Vec<Option<usize>> = (0..n)
            .map(|k| if k >= ws && k <= we { near_vertex(block(k), cfg.near_tol, &mut unit) } else { None })
            .collect();
        // short near visits are dropped before the gaps around them are filled
        let near_runs: Vec<_> = runs(&near, ws, we + 1)
            .into_iter()
            .filter(|&(_, a, b)| edge_out(b) - edge_in(a) >= min_dwell)
            .collect();
        let mut raw: Vec<Visit> = Vec::new();
        let visit = |(v, a, b): (usize, usize, usize), kind| Visit {
            vertex: v,
            enter: edge_in(a),
            exit: edge_out(b),
            window: w,
            kind,
        };
        let mut prev: Option<(usize, usize)> = None;
        for &(v, a, b) in &near_runs {
            if cfg.dominant_fill {
                // lead-in or gap before this near visit
                let from = prev.map_or(ws, |(_, end)| end + 1);
                let dom: Vec<Option<usize>> =
                    (0..n).map(|k| if k >= from && k < a { dominant_vertex(block(k)) } else { None }).collect();
                let mut fill = runs(&dom, from, a);
                if fill.last().is_some_and(|r| r.0 == v) {
                    fill.pop();
                }
                if let (Some((pv, _)), Some(r)) = (prev, fill.first()) {
                    if r.0 == pv {
                        fill.remove(0);
                    }
                }
                raw.extend(fill.into_iter().map(|r| visit(r, VisitKind::Dominant)));
            }
            raw.push(visit((v, a, b), VisitKind::Near));
            prev = Some((v, b));
        }

        let mut kept: Vec<Visit> = Vec::new();
        for v in raw.into_iter().filter(|v| v.dwell() >= min_dwell) {
            match kept.last_mut() {
                Some(prev) if prev.vertex == v.vertex => {
                    prev.exit = v.exit;
                    if v.kind == VisitKind::Near {
                        prev.kind = VisitKind::Near;
                    }
                }
                _ => kept.push(v),
            }
        }
        visits.extend(kept);
    }

    ItineraryReport {
        level,
        visits,
        active_windows: windows.iter().map(|&(a, b)| (t[a], t[b])).collect(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItineraryCheck {
    pub level: Level,
    /// Consecutive visits (0-based) that are not edges of the digraph.
    pub violations: Vec<(usize, usize)>,
    pub pass: bool,
}

impl fmt::Display for ItineraryCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pass {
            return write!(f, "{}: ok", self.level);
        }
        let v: Vec<String> = self.violations.iter().map(|(a, b)| format!("({},{})", a + 1, b + 1)).collect();
        write!(f, "{}: violations {}", self.level, v.join(" "))
    }
}

/// Every pair of consecutive visits within one window must be an edge of `d`.
pub fn check_itinerary_against(report: &ItineraryReport, d: &Digraph) -> ItineraryCheck {
    let violations: Vec<(usize, usize)> = report
        .visits
        .windows(2)
        .filter(|w| w[0].window == w[1].window)
        .map(|w| (w[0].vertex, w[1].vertex))
        .filter(|&(a, b)| !d.has_edge(a, b))
        .collect();
    ItineraryCheck { level: report.level, pass: violations.is_empty(), violations }
}
