use nalgebra::DMatrix;

use super::bump::{bump, bump_derivative, sq_dist_to_unit};
use super::field::{FieldParams, Variant};
use super::state::HierState;
use super::FieldError;

/// Analytic Jacobian of [`eval_field`](super::eval_field), including the
/// chain rule through the bump gates.
pub fn jacobian(s: &HierState, p: &FieldParams) -> Result<DMatrix<f64>, FieldError> {
    p.check_state(s)?;
    let l = p.layout();
    let dim = l.dim();
    let n = l.n_super();
    let ts = p.timescales();
    let y = s.values();
    let xs = &y[..n];
    let a = p.coeffs().field_super();
    let mut jac = DMatrix::zeros(dim, dim);

    let norm2: f64 = xs.iter().map(|v| v * v).sum();
    for j in 0..n {
        let mut g = 1.0 - norm2;
        for k in 0..n {
            g += a[(j, k)] * xs[k] * xs[k];
        }
        for m in 0..n {
            let mut d = 2.0 * xs[j] * xs[m] * (a[(j, m)] - 1.0);
            if m == j {
                d += g;
            }
            jac[(j, m)] = ts.phi * d;
        }
    }

    for b in 0..l.n_blocks() {
        let z = sq_dist_to_unit(xs, b);
        let gate = bump(z, p.epsilon());
        let dgate = bump_derivative(z, p.epsilon());
        let r = l.sub_range(b);
        let x = &y[r.clone()];
        let alpha = p.coeffs().field_sub(b);
        let nx2: f64 = x.iter().map(|v| v * v).sum();
        for (i, &xi) in x.iter().enumerate() {
            let row = r.start + i;
            let mut h = 1.0 - nx2;
            for (k, &xk) in x.iter().enumerate() {
                h += alpha[(i, k)] * xk * xk;
            }
            let (decay, ddecay) = match p.variant() {
                Variant::Standard => (1.0, 0.0),
                Variant::HeteroclinicBounded => (1.0 - xi, -1.0),
            };
            // within the block
            for (m, &xm) in x.iter().enumerate() {
                let mut d = xi * ts.psi * gate * 2.0 * xm * (alpha[(i, m)] - 1.0);
                if m == i {
                    d += ts.psi * h * gate - ts.omega * (1.0 - gate) * decay;
                    d -= xi * ts.omega * (1.0 - gate) * ddecay;
                }
                jac[(row, r.start + m)] = d;
            }
            // through the gate: d gate / d X_m = b'(z) * 2 (X_m - delta_mb)
            if dgate != 0.0 {
                let coupling = xi * (ts.psi * h + ts.omega * decay) * dgate;
                for m in 0..n {
                    let dz = 2.0 * (xs[m] - if m == b { 1.0 } else { 0.0 });
                    jac[(row, m)] = coupling * dz;
                }
            }
        }
    }
    Ok(jac)
}
