//! Smooth transition function gating each substructure.
//!
//! On `(0, eps)` the function is `1 - e1/(e1 + e2)` with `e1 = exp(-eps/z)` and
//! `e2 = exp(-eps/(eps - z))`. Dividing through by `e2` gives the logistic
//! form `1 / (1 + exp(s))` with `s = eps/(eps - z) - eps/z`, which never
//! forms `0/0` near either endpoint.

use super::FieldError;

#[inline]
fn exponent_gap(z: f64, epsilon: f64) -> f64 {
    epsilon / (epsilon - z) - epsilon / z
}

/// `1` for `z <= 0`, `0` for `z >= epsilon`, smooth and non-increasing between.
pub fn bump(z: f64, epsilon: f64) -> f64 {
    if z <= 0.0 {
        1.0
    } else if z >= epsilon {
        0.0
    } else {
        let s = exponent_gap(z, epsilon);
        if s > 0.0 {
            let e = (-s).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + s.exp())
        }
    }
}

/// d/dz of [`bump`]; identically zero outside `(0, epsilon)`.
pub fn bump_derivative(z: f64, epsilon: f64) -> f64 {
    if z <= 0.0 || z >= epsilon {
        return 0.0;
    }
    let s = exponent_gap(z, epsilon);
    let ds = epsilon / ((epsilon - z) * (epsilon - z)) + epsilon / (z * z);
    // b(1-b) = e^{-|s|} / (1 + e^{-|s|})^2
    let e = (-s.abs()).exp();
    if e == 0.0 {
        return 0.0;
    }
    -(e / ((1.0 + e) * (1.0 + e))) * ds
}

/// Squared distance from `x` to the unit vector e_j.
pub(crate) fn sq_dist_to_unit(x: &[f64], j: usize) -> f64 {
    x.iter()
        .enumerate()
        .map(|(k, &v)| if k == j { (v - 1.0) * (v - 1.0) } else { v * v })
        .sum()
}

/// `bump(|X - e_j|^2, epsilon)`.
pub fn bump_j(x: &[f64], j: usize, epsilon: f64) -> Result<f64, FieldError> {
    if j >= x.len() {
        return Err(FieldError::IndexOutOfRange { index: j + 1, len: x.len() });
    }
    Ok(bump(sq_dist_to_unit(x, j), epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;

    // The defining formula transcribed literally, valid away from the endpoints.
    fn literal(z: f64, eps: f64) -> f64 {
        let e1 = (-eps / z).exp();
        let e2 = (-eps / (eps - z)).exp();
        1.0 - e1 / (e1 + e2)
    }

    #[test]
    fn piecewise_values() {
        assert_eq!(bump(-1.0, 0.2), 1.0);
        assert_eq!(bump(0.0, 0.2), 1.0);
        assert_eq!(bump(0.3, 0.2), 0.0);
        assert_eq!(bump(0.2, 0.2), 0.0);
        assert_eq!(bump(0.1, 0.2), 0.5);
    }

    #[test]
    fn matches_literal_formula_in_interior() {
        for k in 1..200 {
            let z = 0.2 * k as f64 / 200.0;
            let (a, b) = (bump(z, 0.2), literal(z, 0.2));
            assert!((a - b).abs() <= 1e-15, "z={z}: {a} vs {b}");
        }
    }

    #[test]
    fn bump_j_examples() {
        assert_eq!(bump_j(&[0.0, 1.0, 0.0], 1, 0.2).unwrap(), 1.0);
        assert_eq!(bump_j(&[1.0, 0.0, 0.0], 1, 0.2).unwrap(), 0.0);
        // |X - e_1|^2 = 0.01 + 0.01 + 0.01
        let z = 0.01 + 0.01 + 0.01;
        let expected = literal(z, 0.2);
        let got = bump_j(&[0.9, 0.1, 0.1], 0, 0.2).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!(bump_j(&[0.9, 0.1], 2, 0.2).is_err());
    }

    #[test]
    fn derivative_matches_central_differences() {
        let eps = 0.2;
        let h = 1e-7;
        for k in 1..100 {
            let z = eps * k as f64 / 100.0;
            let fd = (bump(z + h, eps) - bump(z - h, eps)) / (2.0 * h);
            assert!((fd - bump_derivative(z, eps)).abs() < 1e-6, "z={z}");
        }
    }

    #[test]
    fn extreme_interior_points_are_finite() {
        for z in [1e-300, 1e-12, 0.2 - 1e-15] {
            let b = bump(z, 0.2);
            let d = bump_derivative(z, 0.2);
            assert!(b.is_finite() && d.is_finite());
        }
    }
}
