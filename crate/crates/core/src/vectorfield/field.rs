use std::sync::Arc;

use super::bump::{bump, sq_dist_to_unit};
use super::coefficients::{CoefficientSet, Level, Orientation};
use super::state::{HierState, Layout};
use super::FieldError;
use crate::hierarchy::HierarchySpec;

/// Below this, `exp(u)` is treated as zero in norm accumulations.
pub(crate) const LOG_FLOOR: f64 = -690.775_527_898_213_7; // ln(1e-300)

/// Speed factors for the superstructure (phi), active substructures (psi)
/// and the decay of inactive substructures (omega).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timescales {
    pub phi: f64,
    pub psi: f64,
    pub omega: f64,
}

impl Default for Timescales {
    fn default() -> Self {
        Timescales { phi: 1.0, psi: 1.0, omega: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Inactive substructures decay like `x' = -omega x`.
    #[default]
    Standard,
    /// Inactive substructures decay like `x' = -omega x (1 - x)`, which keeps
    /// `[0, 1]` invariant and sends them to 1 in backward time.
    HeteroclinicBounded,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Standard => "standard",
            Variant::HeteroclinicBounded => "bounded",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Variant::Standard),
            "bounded" => Ok(Variant::HeteroclinicBounded),
            other => Err(format!("unknown variant '{other}' (expected standard|bounded)")),
        }
    }
}

/// Everything that defines the vector field. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldParams {
    hierarchy: HierarchySpec,
    layout: Arc<Layout>,
    coeffs: CoefficientSet,
    epsilon: f64,
    timescales: Timescales,
    variant: Variant,
}

impl FieldParams {
    pub fn new(
        hierarchy: HierarchySpec,
        coeffs: CoefficientSet,
        epsilon: f64,
        timescales: Timescales,
        variant: Variant,
    ) -> Result<Self, FieldError> {
        let max_eps = std::f64::consts::SQRT_2 / 2.0;
        if !(epsilon > 0.0 && epsilon < max_eps) {
            return Err(FieldError::EpsilonOutOfRange { epsilon });
        }
        for (name, v) in [("phi", timescales.phi), ("psi", timescales.psi), ("omega", timescales.omega)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(FieldError::NonPositiveTimescale { name, value: v });
            }
        }
        let n = hierarchy.n_super();
        let shapes_ok = coeffs.field_super().nrows() == n
            && (0..n).all(|j| coeffs.field_sub(j).nrows() == hierarchy.substructure(j).n_vertices());
        if !shapes_ok {
            return Err(FieldError::CoefficientShape);
        }
        let layout = Arc::new(Layout::for_hierarchy(&hierarchy));
        Ok(FieldParams { hierarchy, layout, coeffs, epsilon, timescales, variant })
    }

    pub fn hierarchy(&self) -> &HierarchySpec {
        &self.hierarchy
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn coeffs(&self) -> &CoefficientSet {
        &self.coeffs
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn timescales(&self) -> Timescales {
        self.timescales
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn orientation(&self) -> Orientation {
        self.coeffs.orientation()
    }

    pub fn with_timescales(&self, timescales: Timescales) -> Result<Self, FieldError> {
        Self::new(self.hierarchy.clone(), self.coeffs.clone(), self.epsilon, timescales, self.variant)
    }

    pub fn with_variant(&self, variant: Variant) -> Self {
        FieldParams { variant, ..self.clone() }
    }

    pub fn with_orientation(&self, orientation: Orientation) -> Self {
        FieldParams { coeffs: self.coeffs.reoriented(orientation), ..self.clone() }
    }

    /// Non-fatal concerns about the parameters.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.epsilon >= 0.5 {
            w.push(format!(
                "epsilon = {} >= 1/2: bump supports around neighbouring unit vectors may overlap",
                self.epsilon
            ));
        }
        w
    }

    /// Bump value of block `j` at superstructure state `x`.
    pub fn bump_of(&self, x: &[f64], j: usize) -> f64 {
        bump(sq_dist_to_unit(x, j), self.epsilon)
    }

    /// Original-chart right-hand side; no dimension or finiteness checks.
    pub(crate) fn derivative_into(&self, y: &[f64], out: &mut [f64]) {
        let l = &*self.layout;
        let n = l.n_super();
        let Timescales { phi, psi, omega } = self.timescales;
        let xs = &y[..n];
        let a = self.coeffs.field_super();
        let norm2: f64 = xs.iter().map(|v| v * v).sum();
        for j in 0..n {
            let mut g = 1.0 - norm2;
            for (k, &xk) in xs.iter().enumerate() {
                g += a[(j, k)] * xk * xk;
            }
            out[j] = phi * xs[j] * g;
        }
        for b in 0..l.n_blocks() {
            let gate = self.bump_of(xs, b);
            let r = l.sub_range(b);
            let x = &y[r.clone()];
            let alpha = self.coeffs.field_sub(b);
            let nx2: f64 = x.iter().map(|v| v * v).sum();
            for (i, &xi) in x.iter().enumerate() {
                let mut h = 1.0 - nx2;
                for (k, &xk) in x.iter().enumerate() {
                    h += alpha[(i, k)] * xk * xk;
                }
                let decay = match self.variant {
                    Variant::Standard => 1.0,
                    Variant::HeteroclinicBounded => 1.0 - xi,
                };
                out[r.start + i] = xi * (psi * h * gate - omega * (1.0 - gate) * decay);
            }
        }
    }

    /// Log-chart right-hand side: per-coordinate growth rates `v'/v` at
    /// `v = exp(u)`. Masked coordinates are exactly zero and get rate 0.
    /// `scratch` must have length `dim`.
    pub(crate) fn log_rates_into(&self, u: &[f64], mask: &[bool], scratch: &mut [f64], out: &mut [f64]) {
        let l = &*self.layout;
        let n = l.n_super();
        let Timescales { phi, psi, omega } = self.timescales;
        let v = scratch;
        for k in 0..u.len() {
            v[k] = if mask[k] || u[k] < LOG_FLOOR { 0.0 } else { u[k].exp() };
        }
        // one minus the squared norm of a block, with the dominant term taken
        // through expm1 so that states near a unit vector keep full precision
        let one_minus_norm2 = |range: std::ops::Range<usize>, v: &[f64]| -> f64 {
            let mut best: Option<usize> = None;
            for k in range.clone() {
                if !mask[k] && best.map_or(true, |b| u[k] > u[b]) {
                    best = Some(k);
                }
            }
            match best {
                None => 1.0,
                Some(m) => {
                    let rest: f64 = range.filter(|&k| k != m).map(|k| v[k] * v[k]).sum();
                    -(2.0 * u[m]).exp_m1() - rest
                }
            }
        };

        let a = self.coeffs.field_super();
        let sup = one_minus_norm2(0..n, v);
        for j in 0..n {
            if mask[j] {
                out[j] = 0.0;
                continue;
            }
            let mut g = sup;
            for k in 0..n {
                g += a[(j, k)] * v[k] * v[k];
            }
            out[j] = phi * g;
        }
        for b in 0..l.n_blocks() {
            // |X - e_b|^2 with 1 - X_b = -expm1(u_b)
            let mut z = 0.0;
            for k in 0..n {
                if k == b {
                    let d = if mask[k] { 1.0 } else { -u[k].exp_m1() };
                    z += d * d;
                } else {
                    z += v[k] * v[k];
                }
            }
            let gate = bump(z, self.epsilon);
            let r = l.sub_range(b);
            let alpha = self.coeffs.field_sub(b);
            let base = one_minus_norm2(r.clone(), v);
            for i in 0..r.len() {
                let c = r.start + i;
                if mask[c] {
                    out[c] = 0.0;
                    continue;
                }
                let mut h = base;
                for k in 0..r.len() {
                    let vk = v[r.start + k];
                    h += alpha[(i, k)] * vk * vk;
                }
                let decay = match self.variant {
                    Variant::Standard => 1.0,
                    Variant::HeteroclinicBounded => -u[c].exp_m1(),
                };
                out[c] = psi * h * gate - omega * (1.0 - gate) * decay;
            }
        }
    }

    pub(crate) fn check_state(&self, s: &HierState) -> Result<(), FieldError> {
        if s.dim() != self.layout.dim() || s.layout().as_ref() != self.layout.as_ref() {
            return Err(FieldError::DimensionMismatch {
                expected: self.layout.dim(),
                found: s.dim(),
            });
        }
        if let Some(k) = s.values().iter().position(|v| !v.is_finite()) {
            return Err(FieldError::NonFiniteInput { coordinate: self.layout.coord(k).to_string() });
        }
        Ok(())
    }

    /// Pair-indexed coupling seen at vertex `at` in direction `dir` (0-based):
    /// the field coefficient multiplying `x_at^2` in the growth rate of `x_dir`.
    pub fn transverse_coupling(&self, level: Level, at: usize, dir: usize) -> f64 {
        self.coeffs.field(level)[(dir, at)]
    }
}

/// Which coordinates are exactly zero (and therefore stay zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroMask(Vec<bool>);

impl ZeroMask {
    pub fn of(state: &HierState) -> Self {
        ZeroMask(state.values().iter().map(|&v| v == 0.0).collect())
    }

    pub fn from_flags(flags: Vec<bool>) -> Self {
        ZeroMask(flags)
    }

    pub fn flags(&self) -> &[bool] {
        &self.0
    }

    pub fn is_masked(&self, k: usize) -> bool {
        self.0[k]
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&m| m).count()
    }
}

/// Time derivative of the (timescale-adapted) hierarchical system.
pub fn eval_field(s: &HierState, p: &FieldParams) -> Result<HierState, FieldError> {
    p.check_state(s)?;
    let mut out = HierState::zeros(p.layout().clone());
    p.derivative_into(s.values(), out.values_mut());
    Ok(out)
}

/// Growth-rate form of the field in log coordinates `u = ln(v)`.
///
/// For each unmasked coordinate returns `v'/v`; masked coordinates (exact
/// zeros in the original chart) return 0 and contribute nothing to sums.
pub fn eval_field_log(u: &HierState, mask: &ZeroMask, p: &FieldParams) -> Result<HierState, FieldError> {
    let dim = p.layout().dim();
    if u.dim() != dim || mask.flags().len() != dim {
        return Err(FieldError::DimensionMismatch { expected: dim, found: u.dim() });
    }
    for (k, &x) in u.values().iter().enumerate() {
        if !mask.is_masked(k) && !x.is_finite() {
            return Err(FieldError::NonFiniteInput { coordinate: p.layout().coord(k).to_string() });
        }
    }
    let mut out = HierState::zeros(p.layout().clone());
    let mut scratch = vec![0.0; dim];
    p.log_rates_into(u.values(), mask.flags(), &mut scratch, out.values_mut());
    Ok(out)
}

/// Maps a nonnegative state into the log chart. Zeros are masked and stored as 0.
pub fn to_log_chart(s: &HierState) -> (HierState, ZeroMask) {
    let mask = ZeroMask::of(s);
    let u = s.values().iter().map(|&v| if v == 0.0 { 0.0 } else { v.ln() }).collect();
    (HierState::from_flat(s.layout().clone(), u), mask)
}

/// Inverse of [`to_log_chart`].
pub fn from_log_chart(u: &HierState, mask: &ZeroMask) -> HierState {
    let v = u
        .values()
        .iter()
        .zip(mask.flags())
        .map(|(&x, &m)| if m { 0.0 } else { x.exp() })
        .collect();
    HierState::from_flat(u.layout().clone(), v)
}
