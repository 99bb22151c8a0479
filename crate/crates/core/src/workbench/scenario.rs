//! Scenario documents (TOML).
//!
//! Top-level tables: `hierarchy`, `coefficients`, `field`, `initial_state`,
//! `integrator`, `analysis`. Vertex numbers in the file are 1-based.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::WorkbenchError;
use crate::analysis::{ItineraryConfig, RealizationOptions};
use crate::exec::Execution;
use crate::hierarchy::{validate_hierarchy, Digraph, HierarchySpec, RawDigraph};
use crate::integrator::IntegratorConfig;
use crate::vectorfield::{
    build_coefficients, coefficients_from_pair_matrices, CoefficientError, CoefficientOverride, FieldError,
    FieldParams, HierState, Level, Orientation, Timescales, Variant,
};

pub const DEFAULT_C_PLUS: f64 = 1.0;
pub const DEFAULT_C_MINUS: f64 = -1.5;

/// How the coefficient matrices were given.
#[derive(Debug, Clone, PartialEq)]
pub enum CoefficientSource {
    /// `c_plus` on edges, `c_minus` on non-edges, then overrides (0-based pairs).
    Uniform { c_plus: f64, c_minus: f64, overrides: Vec<CoefficientOverride> },
    /// Pair-indexed matrices, row = source vertex.
    Matrices { superstructure: DMatrix<f64>, substructures: Vec<DMatrix<f64>> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisSettings {
    pub near_tol: f64,
    pub min_dwell: f64,
    pub sample_dt: f64,
    pub dominant_fill: bool,
    pub witness_deltas: Vec<f64>,
}

impl Default for AnalysisSettings {
    fn default() -> Self {
        let it = ItineraryConfig::default();
        AnalysisSettings {
            near_tol: it.near_tol,
            min_dwell: it.min_dwell,
            sample_dt: it.sample_dt,
            dominant_fill: it.dominant_fill,
            witness_deltas: RealizationOptions::default().witness_deltas,
        }
    }
}

impl AnalysisSettings {
    pub fn itinerary(&self) -> ItineraryConfig {
        ItineraryConfig {
            near_tol: self.near_tol,
            min_dwell: self.min_dwell,
            dominant_fill: self.dominant_fill,
            sample_dt: self.sample_dt,
        }
    }

    pub fn realization_options(&self, execution: Execution) -> RealizationOptions {
        RealizationOptions {
            itinerary: self.itinerary(),
            witness_deltas: self.witness_deltas.clone(),
            execution,
            ..RealizationOptions::default()
        }
    }
}

/// A fully resolved and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: Option<String>,
    pub coefficients: CoefficientSource,
    pub params: FieldParams,
    pub initial_state: HierState,
    pub integrator: IntegratorConfig,
    pub analysis: AnalysisSettings,
}

impl Scenario {
    pub fn hierarchy(&self) -> &HierarchySpec {
        self.params.hierarchy()
    }

    pub fn set_orientation(&mut self, orientation: Orientation) {
        self.params = self.params.with_orientation(orientation);
    }

    pub fn set_variant(&mut self, variant: Variant) {
        self.params = self.params.with_variant(variant);
    }

    /// Parses and validates a scenario document.
    pub fn from_toml_str(text: &str) -> Result<Scenario, WorkbenchError> {
        let de = toml::Deserializer::parse(text).map_err(|e| WorkbenchError::Parse(e.message().to_string()))?;
        let doc: Doc = serde_path_to_error::deserialize(de).map_err(|e| WorkbenchError::Schema {
            path: e.path().to_string(),
            message: e.inner().message().to_string(),
        })?;
        doc.resolve()
    }

    /// Renders the scenario with every value explicit.
    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(&Doc::from_scenario(self)).expect("scenario documents always serialize")
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario, WorkbenchError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| WorkbenchError::Io { path: path.to_path_buf(), source })?;
    Scenario::from_toml_str(&text)
}

pub fn write_scenario(s: &Scenario, path: impl AsRef<Path>) -> Result<(), WorkbenchError> {
    let path = path.as_ref();
    std::fs::write(path, s.to_toml_string()).map_err(|source| WorkbenchError::Io { path: path.to_path_buf(), source })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    hierarchy: HierarchyDoc,
    #[serde(default)]
    coefficients: CoefficientsDoc,
    field: FieldDoc,
    initial_state: InitialDoc,
    #[serde(default)]
    integrator: IntegratorDoc,
    #[serde(default)]
    analysis: AnalysisDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HierarchyDoc {
    superstructure: GraphDoc,
    substructures: Vec<GraphDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    vertices: usize,
    edges: Vec<[usize; 2]>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientsDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    orientation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    c_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    overrides: Vec<OverrideDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    superstructure: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    substructures: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OverrideDoc {
    /// 0 for the superstructure, j for substructure j.
    level: usize,
    from: usize,
    to: usize,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldDoc {
    epsilon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    psi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    variant: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialDoc {
    superstructure: Vec<f64>,
    substructures: Vec<Vec<f64>>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct IntegratorDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rtol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    atol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sample_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    initial_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_steps: Option<u64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalysisDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    near_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min_dwell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sample_dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dominant_fill: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness_deltas: Option<Vec<f64>>,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> WorkbenchError {
    WorkbenchError::Validation { path: path.into(), message: message.into() }
}

fn raw(g: &GraphDoc) -> RawDigraph {
    RawDigraph { n_vertices: g.vertices, edges: g.edges.iter().map(|e| (e[0], e[1])).collect() }
}

fn graph_doc(d: &Digraph) -> GraphDoc {
    GraphDoc { vertices: d.n_vertices(), edges: d.edges().map(|(i, k)| [i + 1, k + 1]).collect() }
}

fn matrix(rows: &[Vec<f64>], n: usize, path: &str) -> Result<DMatrix<f64>, WorkbenchError> {
    if rows.len() != n {
        return Err(invalid(path, format!("expected {n} rows, got {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(invalid(format!("{path}[{i}]"), format!("expected {n} entries, got {}", r.len())));
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, k| rows[i][k]))
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| m[(i, k)]).collect()).collect()
}

fn coefficient_path(e: &CoefficientError, verbatim: bool) -> String {
    let level = match e {
        CoefficientError::SignViolationInOverride { level, .. }
        | CoefficientError::BadOverridePair { level, .. }
        | CoefficientError::MatrixShape { level, .. } => Some(*level),
        _ => None,
    };
    match (verbatim, level) {
        (true, Some(Level::Super)) => "coefficients.superstructure".into(),
        (true, Some(Level::Sub(j))) => format!("coefficients.substructures[{j}]"),
        (true, None) => "coefficients.substructures".into(),
        (false, Some(_)) => "coefficients.overrides".into(),
        (false, None) => "coefficients.c_plus".into(),
    }
}

fn check_nonnegative(values: &[f64], path: &str) -> Result<(), WorkbenchError> {
    match values.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(i) => Err(invalid(format!("{path}[{i}]"), format!("must be finite and nonnegative, got {}", values[i]))),
        None => Ok(()),
    }
}

impl Doc {
    fn resolve(self) -> Result<Scenario, WorkbenchError> {
        let subs: Vec<RawDigraph> = self.hierarchy.substructures.iter().map(raw).collect();
        let hierarchy = validate_hierarchy(&raw(&self.hierarchy.superstructure), &subs).map_err(WorkbenchError::Hierarchy)?;
        let n = hierarchy.n_super();

        let c = &self.coefficients;
        let orientation: Orientation = match &c.orientation {
            Some(s) => s.parse().map_err(|m: String| invalid("coefficients.orientation", m))?,
            None => Orientation::default(),
        };
        let verbatim = c.superstructure.is_some() || c.substructures.is_some();
        let source = if verbatim {
            let (Some(sup), Some(subs)) = (&c.superstructure, &c.substructures) else {
                let missing = if c.superstructure.is_none() { "superstructure" } else { "substructures" };
                return Err(invalid(
                    format!("coefficients.{missing}"),
                    "verbatim matrices must be given for every level",
                ));
            };
            if c.c_plus.is_some() || c.c_minus.is_some() || !c.overrides.is_empty() {
                return Err(invalid("coefficients", "c_plus, c_minus and overrides cannot be combined with verbatim matrices"));
            }
            if subs.len() != n {
                return Err(invalid(
                    "coefficients.substructures",
                    format!("expected {n} matrices, got {}", subs.len()),
                ));
            }
            let superstructure = matrix(sup, n, "coefficients.superstructure")?;
            let substructures = subs
                .iter()
                .enumerate()
                .map(|(j, m)| {
                    matrix(m, hierarchy.substructure(j).n_vertices(), &format!("coefficients.substructures[{j}]"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            CoefficientSource::Matrices { superstructure, substructures }
        } else {
            let overrides = c
                .overrides
                .iter()
                .enumerate()
                .map(|(i, o)| {
                    let level = match o.level {
                        0 => Level::Super,
                        j if j <= n => Level::Sub(j - 1),
                        j => return Err(invalid(format!("coefficients.overrides[{i}].level"), format!("no substructure {j}"))),
                    };
                    if o.from == 0 || o.to == 0 {
                        return Err(invalid(format!("coefficients.overrides[{i}]"), "vertices are numbered from 1"));
                    }
                    Ok(CoefficientOverride { level, from: o.from - 1, to: o.to - 1, value: o.value })
                })
                .collect::<Result<Vec<_>, _>>()?;
            CoefficientSource::Uniform {
                c_plus: c.c_plus.unwrap_or(DEFAULT_C_PLUS),
                c_minus: c.c_minus.unwrap_or(DEFAULT_C_MINUS),
                overrides,
            }
        };
        let coeffs = match &source {
            CoefficientSource::Uniform { c_plus, c_minus, overrides } => {
                build_coefficients(&hierarchy, *c_plus, *c_minus, overrides, orientation)
            }
            CoefficientSource::Matrices { superstructure, substructures } => {
                coefficients_from_pair_matrices(&hierarchy, superstructure, substructures, orientation)
            }
        }
        .map_err(|e| invalid(coefficient_path(&e, verbatim), e.to_string()))?;

        let f = &self.field;
        let defaults = Timescales::default();
        let timescales = Timescales {
            phi: f.phi.unwrap_or(defaults.phi),
            psi: f.psi.unwrap_or(defaults.psi),
            omega: f.omega.unwrap_or(defaults.omega),
        };
        let variant: Variant = match &f.variant {
            Some(s) => s.parse().map_err(|m: String| invalid("field.variant", m))?,
            None => Variant::default(),
        };
        let params = FieldParams::new(hierarchy, coeffs, f.epsilon, timescales, variant).map_err(|e| {
            let path = match &e {
                FieldError::EpsilonOutOfRange { .. } => "field.epsilon".to_string(),
                FieldError::NonPositiveTimescale { name, .. } => format!("field.{name}"),
                _ => "coefficients".to_string(),
            };
            invalid(path, e.to_string())
        })?;

        let init = &self.initial_state;
        let layout = params.layout().clone();
        if init.superstructure.len() != n {
            return Err(invalid(
                "initial_state.superstructure",
                format!("expected {n} values, got {}", init.superstructure.len()),
            ));
        }
        check_nonnegative(&init.superstructure, "initial_state.superstructure")?;
        if init.substructures.len() != n {
            return Err(invalid(
                "initial_state.substructures",
                format!("expected {n} blocks, got {}", init.substructures.len()),
            ));
        }
        for (j, block) in init.substructures.iter().enumerate() {
            let path = format!("initial_state.substructures[{j}]");
            let m = layout.sub_size(j);
            if block.len() != m {
                return Err(invalid(path, format!("expected {m} values, got {}", block.len())));
            }
            check_nonnegative(block, &path)?;
        }
        let initial_state = HierState::from_blocks(layout, &init.superstructure, &init.substructures)
            .expect("block sizes were checked");

        let d = IntegratorConfig::default();
        let g = &self.integrator;
        let integrator = IntegratorConfig {
            rtol: g.rtol.unwrap_or(d.rtol),
            atol: g.atol.unwrap_or(d.atol),
            t_end: g.t_end.unwrap_or(d.t_end),
            sample_dt: g.sample_dt.unwrap_or(d.sample_dt),
            max_step: g.max_step,
            initial_step: g.initial_step.unwrap_or(d.initial_step),
            max_steps: g.max_steps.unwrap_or(d.max_steps),
            direction: d.direction,
        };
        integrator.validate().map_err(|e| {
            let what = match e {
                crate::integrator::IntegrationError::InvalidConfig { what, .. } => what,
                _ => "t_end",
            };
            invalid(format!("integrator.{what}"), e.to_string())
        })?;

        let d = AnalysisSettings::default();
        let a = &self.analysis;
        let analysis = AnalysisSettings {
            near_tol: a.near_tol.unwrap_or(d.near_tol),
            min_dwell: a.min_dwell.unwrap_or(d.min_dwell),
            sample_dt: a.sample_dt.unwrap_or(d.sample_dt),
            dominant_fill: a.dominant_fill.unwrap_or(d.dominant_fill),
            witness_deltas: a.witness_deltas.clone().unwrap_or(d.witness_deltas),
        };
        if !(analysis.near_tol > 0.0 && analysis.near_tol < 0.5) {
            return Err(invalid("analysis.near_tol", format!("must lie in (0, 0.5), got {}", analysis.near_tol)));
        }
        if !(analysis.min_dwell >= 0.0 && analysis.min_dwell.is_finite()) {
            return Err(invalid("analysis.min_dwell", format!("must be nonnegative, got {}", analysis.min_dwell)));
        }
        if !(analysis.sample_dt > 0.0 && analysis.sample_dt.is_finite()) {
            return Err(invalid("analysis.sample_dt", format!("must be positive, got {}", analysis.sample_dt)));
        }
        if let Some(i) = analysis.witness_deltas.iter().position(|&x| !(x > 0.0 && x < 1.0)) {
            return Err(invalid(
                format!("analysis.witness_deltas[{i}]"),
                format!("must lie in (0, 1), got {}", analysis.witness_deltas[i]),
            ));
        }

        Ok(Scenario { name: self.name, coefficients: source, params, initial_state, integrator, analysis })
    }

    fn from_scenario(s: &Scenario) -> Doc {
        let h = s.hierarchy();
        let p = &s.params;
        let ts = p.timescales();
        let coefficients = match &s.coefficients {
            CoefficientSource::Uniform { c_plus, c_minus, overrides } => CoefficientsDoc {
                orientation: Some(p.orientation().as_str().into()),
                c_plus: Some(*c_plus),
                c_minus: Some(*c_minus),
                overrides: overrides
                    .iter()
                    .map(|o| OverrideDoc {
                        level: match o.level {
                            Level::Super => 0,
                            Level::Sub(j) => j + 1,
                        },
                        from: o.from + 1,
                        to: o.to + 1,
                        value: o.value,
                    })
                    .collect(),
                superstructure: None,
                substructures: None,
            },
            CoefficientSource::Matrices { superstructure, substructures } => CoefficientsDoc {
                orientation: Some(p.orientation().as_str().into()),
                c_plus: None,
                c_minus: None,
                overrides: Vec::new(),
                superstructure: Some(rows_of(superstructure)),
                substructures: Some(substructures.iter().map(rows_of).collect()),
            },
        };
        let g = &s.integrator;
        let a = &s.analysis;
        Doc {
            name: s.name.clone(),
            hierarchy: HierarchyDoc {
                superstructure: graph_doc(h.superstructure()),
                substructures: h.substructures().iter().map(graph_doc).collect(),
            },
            coefficients,
            field: FieldDoc {
                epsilon: p.epsilon(),
                phi: Some(ts.phi),
                psi: Some(ts.psi),
                omega: Some(ts.omega),
                variant: Some(p.variant().as_str().into()),
            },
            initial_state: InitialDoc {
                superstructure: s.initial_state.super_block().to_vec(),
                substructures: (0..h.n_super()).map(|j| s.initial_state.sub_block(j).to_vec()).collect(),
            },
            integrator: IntegratorDoc {
                rtol: Some(g.rtol),
                atol: Some(g.atol),
                t_end: Some(g.t_end),
                sample_dt: Some(g.sample_dt),
                max_step: g.max_step,
                initial_step: Some(g.initial_step),
                max_steps: Some(g.max_steps),
            },
            analysis: AnalysisDoc {
                near_tol: Some(a.near_tol),
                min_dwell: Some(a.min_dwell),
                sample_dt: Some(a.sample_dt),
                dominant_fill: Some(a.dominant_fill),
                witness_deltas: Some(a.witness_deltas.clone()),
            },
        }
    }
}
