//! Coefficient matrices for the superstructure and substructure simplex systems.
//!
//! Coefficients are specified per ordered vertex pair: the entry for `(i, k)`
//! is positive exactly when `i -> k` is an edge. The [`Orientation`] decides
//! where that entry lands in the growth-rate equations:
//!
//! * [`Orientation::Eigenvalue`] puts it in the equation of coordinate `k`,
//!   multiplying `x_i^2`. At the equilibrium `e_i` the transverse eigenvalue
//!   in direction `k` is then exactly that entry, so edges become unstable
//!   directions.
//! * [`Orientation::Literal`] puts it in the equation of coordinate `i`,
//!   multiplying `x_k^2`, i.e. the field matrix equals the pair matrix.

use std::fmt;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::hierarchy::{Digraph, HierarchySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Eigenvalue,
    Literal,
}

impl Orientation {
    pub fn as_str(self) -> &'static str {
        match self {
            Orientation::Eigenvalue => "eigenvalue",
            Orientation::Literal => "literal",
        }
    }
}

impl std::str::FromStr for Orientation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eigenvalue" => Ok(Orientation::Eigenvalue),
            "literal" => Ok(Orientation::Literal),
            other => Err(format!("unknown orientation '{other}' (expected eigenvalue|literal)")),
        }
    }
}

/// Which digraph a coefficient belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Level {
    Super,
    /// 0-based substructure index.
    Sub(usize),
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Level::Super => write!(f, "Gamma"),
            Level::Sub(j) => write!(f, "G_{}", j + 1),
        }
    }
}

/// Replaces the default value for one ordered pair (0-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientOverride {
    pub level: Level,
    pub from: usize,
    pub to: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoefficientError {
    #[error("c_plus must be > 0 and c_minus < 0 (got c_plus={c_plus}, c_minus={c_minus})")]
    BadDefaults { c_plus: f64, c_minus: f64 },
    #[error("SignViolationInOverride: {level} pair ({from},{to}) is {kind} but has value {value}")]
    SignViolationInOverride {
        level: Level,
        from: usize,
        to: usize,
        kind: &'static str,
        value: f64,
    },
    #[error("override for {level} pair ({from},{to}) is out of range or on the diagonal")]
    BadOverridePair { level: Level, from: usize, to: usize },
    #[error("{level}: coefficient matrix must be {n}x{n}")]
    MatrixShape { level: Level, n: usize },
    #[error("expected {expected} substructure matrices, got {found}")]
    MatrixCount { expected: usize, found: usize },
}

/// Coefficient matrices as they enter the growth rates:
/// `X_j' = X_j (1 - |X|^2 + sum_k a[j][k] X_k^2)`, likewise for each `alpha^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSet {
    a: DMatrix<f64>,
    alphas: Vec<DMatrix<f64>>,
    orientation: Orientation,
}

impl CoefficientSet {
    pub fn field_super(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn field_sub(&self, j: usize) -> &DMatrix<f64> {
        &self.alphas[j]
    }

    pub fn field(&self, level: Level) -> &DMatrix<f64> {
        match level {
            Level::Super => &self.a,
            Level::Sub(j) => &self.alphas[j],
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// The pair-indexed view (entry `(i,k)` governs the pair `i -> k`).
    pub fn pair_matrix(&self, level: Level) -> DMatrix<f64> {
        to_pair(self.field(level), self.orientation)
    }

    /// Same coefficients, re-placed under another orientation.
    pub fn reoriented(&self, orientation: Orientation) -> CoefficientSet {
        let place = |m: &DMatrix<f64>| to_field(&to_pair(m, self.orientation), orientation);
        CoefficientSet {
            a: place(&self.a),
            alphas: self.alphas.iter().map(place).collect(),
            orientation,
        }
    }

    #[cfg(test)]
    pub(crate) fn from_field_unchecked(
        a: DMatrix<f64>,
        alphas: Vec<DMatrix<f64>>,
        orientation: Orientation,
    ) -> Self {
        CoefficientSet { a, alphas, orientation }
    }
}

fn to_field(pair: &DMatrix<f64>, orientation: Orientation) -> DMatrix<f64> {
    match orientation {
        Orientation::Eigenvalue => pair.transpose(),
        Orientation::Literal => pair.clone(),
    }
}

fn to_pair(field: &DMatrix<f64>, orientation: Orientation) -> DMatrix<f64> {
    // both placements are involutions
    to_field(field, orientation)
}

fn check_pair_value(
    d: &Digraph,
    level: Level,
    from: usize,
    to: usize,
    value: f64,
) -> Result<(), CoefficientError> {
    let n = d.n_vertices();
    if from >= n || to >= n || from == to {
        return Err(CoefficientError::BadOverridePair { level, from: from + 1, to: to + 1 });
    }
    let edge = d.has_edge(from, to);
    let ok = if edge { value > 0.0 } else { value < 0.0 };
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(CoefficientError::SignViolationInOverride {
            level,
            from: from + 1,
            to: to + 1,
            kind: if edge { "an edge (needs > 0)" } else { "a non-edge (needs < 0)" },
            value,
        })
    }
}

fn uniform_pair_matrix(d: &Digraph, c_plus: f64, c_minus: f64) -> DMatrix<f64> {
    let n = d.n_vertices();
    DMatrix::from_fn(n, n, |i, k| {
        if i == k {
            0.0
        } else if d.has_edge(i, k) {
            c_plus
        } else {
            c_minus
        }
    })
}

/// Uniform `c_plus` on edges and `c_minus` elsewhere off the diagonal, then
/// the overrides applied on top.
pub fn build_coefficients(
    h: &HierarchySpec,
    c_plus: f64,
    c_minus: f64,
    overrides: &[CoefficientOverride],
    orientation: Orientation,
) -> Result<CoefficientSet, CoefficientError> {
    if !(c_plus > 0.0 && c_minus < 0.0 && c_plus.is_finite() && c_minus.is_finite()) {
        return Err(CoefficientError::BadDefaults { c_plus, c_minus });
    }
    let mut a = uniform_pair_matrix(h.superstructure(), c_plus, c_minus);
    let mut alphas: Vec<_> = h
        .substructures()
        .iter()
        .map(|d| uniform_pair_matrix(d, c_plus, c_minus))
        .collect();
    for o in overrides {
        let (d, m) = match o.level {
            Level::Super => (h.superstructure(), &mut a),
            Level::Sub(j) if j < alphas.len() => (h.substructure(j), &mut alphas[j]),
            Level::Sub(_) => {
                return Err(CoefficientError::BadOverridePair {
                    level: o.level,
                    from: o.from + 1,
                    to: o.to + 1,
                })
            }
        };
        check_pair_value(d, o.level, o.from, o.to, o.value)?;
        m[(o.from, o.to)] = o.value;
    }
    Ok(CoefficientSet {
        a: to_field(&a, orientation),
        alphas: alphas.iter().map(|m| to_field(m, orientation)).collect(),
        orientation,
    })
}

/// Full pair-indexed matrices, e.g. copied verbatim from a table. Every
/// off-diagonal entry must have the sign its pair requires, and the diagonal
/// must be zero.
pub fn coefficients_from_pair_matrices(
    h: &HierarchySpec,
    superstructure: &DMatrix<f64>,
    substructures: &[DMatrix<f64>],
    orientation: Orientation,
) -> Result<CoefficientSet, CoefficientError> {
    if substructures.len() != h.n_super() {
        return Err(CoefficientError::MatrixCount {
            expected: h.n_super(),
            found: substructures.len(),
        });
    }
    let check = |d: &Digraph, level: Level, m: &DMatrix<f64>| -> Result<(), CoefficientError> {
        let n = d.n_vertices();
        if m.nrows() != n || m.ncols() != n {
            return Err(CoefficientError::MatrixShape { level, n });
        }
        for i in 0..n {
            if m[(i, i)] != 0.0 {
                return Err(CoefficientError::SignViolationInOverride {
                    level,
                    from: i + 1,
                    to: i + 1,
                    kind: "a diagonal entry (needs = 0)",
                    value: m[(i, i)],
                });
            }
            for k in (0..n).filter(|&k| k != i) {
                check_pair_value(d, level, i, k, m[(i, k)])?;
            }
        }
        Ok(())
    };
    check(h.superstructure(), Level::Super, superstructure)?;
    for (j, m) in substructures.iter().enumerate() {
        check(h.substructure(j), Level::Sub(j), m)?;
    }
    Ok(CoefficientSet {
        a: to_field(superstructure, orientation),
        alphas: substructures.iter().map(|m| to_field(m, orientation)).collect(),
        orientation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle_hierarchy() -> HierarchySpec {
        let c = Digraph::from_edges(3, &[(1, 2), (2, 3), (3, 1)]).unwrap();
        let ks = Digraph::from_edges(4, &[(1, 2), (2, 3), (2, 4), (3, 1), (4, 1)]).unwrap();
        let rev = Digraph::from_edges(3, &[(1, 3), (3, 2), (2, 1)]).unwrap();
        HierarchySpec::new(c.clone(), vec![c, rev, ks]).unwrap()
    }

    #[test]
    fn three_cycle_pattern() {
        let h = cycle_hierarchy();
        let c = build_coefficients(&h, 1.0, -1.5, &[], Orientation::Eigenvalue).unwrap();
        let pair = c.pair_matrix(Level::Super);
        let table = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, -1.5, -1.5, 0.0, 1.0, 1.0, -1.5, 0.0]);
        assert_eq!(pair, table);
        // the growth rate of X_2 carries +1 * X_1^2
        assert_eq!(c.field_super()[(1, 0)], 1.0);
        for r in 0..3 {
            let row: Vec<f64> = (0..3).map(|k| pair[(r, k)]).collect();
            assert_eq!(row.iter().filter(|&&v| v == 1.0).count(), 1);
            assert_eq!(row.iter().filter(|&&v| v == -1.5).count(), 1);
        }
        let lit = c.reoriented(Orientation::Literal);
        assert_eq!(lit.field_super(), &table);
        assert_eq!(lit.pair_matrix(Level::Super), table);
    }

    #[test]
    fn edgeless_is_all_negative() {
        let e = Digraph::from_edges(2, &[]).unwrap();
        let h = HierarchySpec::new(e.clone(), vec![e.clone(), e]).unwrap();
        let c = build_coefficients(&h, 1.0, -1.0, &[], Orientation::Eigenvalue).unwrap();
        assert_eq!(c.field_super(), &DMatrix::from_row_slice(2, 2, &[0.0, -1.0, -1.0, 0.0]));
    }

    #[test]
    fn kirk_silber_overrides_reproduce_table() {
        let h = cycle_hierarchy();
        let overrides = [
            CoefficientOverride { level: Level::Sub(2), from: 1, to: 2, value: 0.5 },
            CoefficientOverride { level: Level::Sub(2), from: 1, to: 3, value: 2.0 },
        ];
        let c = build_coefficients(&h, 1.0, -1.5, &overrides, Orientation::Eigenvalue).unwrap();
        let table = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 1.0, -1.5, -1.5, //
                -1.5, 0.0, 0.5, 2.0, //
                1.0, -1.5, 0.0, -1.5, //
                1.0, -1.5, -1.5, 0.0,
            ],
        );
        assert_eq!(c.pair_matrix(Level::Sub(2)), table);
        assert_eq!(c.field_sub(2), &table.transpose());
    }

    #[test]
    fn sign_violations_are_rejected() {
        let h = cycle_hierarchy();
        let bad = [CoefficientOverride { level: Level::Super, from: 0, to: 1, value: -0.3 }];
        assert!(matches!(
            build_coefficients(&h, 1.0, -1.5, &bad, Orientation::Eigenvalue),
            Err(CoefficientError::SignViolationInOverride { .. })
        ));
        let bad = [CoefficientOverride { level: Level::Super, from: 0, to: 2, value: 0.3 }];
        assert!(build_coefficients(&h, 1.0, -1.5, &bad, Orientation::Eigenvalue).is_err());
        let diag = [CoefficientOverride { level: Level::Super, from: 0, to: 0, value: -1.0 }];
        assert!(matches!(
            build_coefficients(&h, 1.0, -1.5, &diag, Orientation::Eigenvalue),
            Err(CoefficientError::BadOverridePair { .. })
        ));
        assert!(build_coefficients(&h, -1.0, -1.5, &[], Orientation::Eigenvalue).is_err());
    }

    #[test]
    fn verbatim_matrices_checked() {
        let h = cycle_hierarchy();
        let c = build_coefficients(&h, 1.0, -1.1, &[], Orientation::Eigenvalue).unwrap();
        let subs: Vec<_> = (0..3).map(|j| c.pair_matrix(Level::Sub(j))).collect();
        let again = coefficients_from_pair_matrices(
            &h,
            &c.pair_matrix(Level::Super),
            &subs,
            Orientation::Eigenvalue,
        )
        .unwrap();
        assert_eq!(again, c);
        let mut wrong = c.pair_matrix(Level::Super);
        wrong[(0, 1)] = -1.0;
        assert!(coefficients_from_pair_matrices(&h, &wrong, &subs, Orientation::Eigenvalue).is_err());
    }
}
