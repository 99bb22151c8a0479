use crate::vectorfield::{designed_equilibria, eval_field, EquilibriumLabel, FieldParams, HierState};

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    /// `|f|_inf` at every designed equilibrium.
    pub residuals: Vec<(EquilibriumLabel, f64)>,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn worst(&self) -> Option<EquilibriumLabel> {
        self.residuals
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|r| r.0)
    }
}

fn residual(s: &HierState, p: &FieldParams) -> f64 {
    match eval_field(s, p) {
        Ok(f) => f.sup_norm(),
        Err(_) => f64::INFINITY,
    }
}

/// Evaluates the field at every designed equilibrium.
pub fn verify_equilibria(p: &FieldParams, tol: f64) -> ResidualReport {
    let residuals: Vec<_> = designed_equilibria(p)
        .into_iter()
        .map(|e| (e.label, residual(&e.state, p)))
        .collect();
    let max_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
    ResidualReport { residuals, max_residual, tol, pass: max_residual <= tol }
}
