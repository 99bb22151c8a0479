use std::collections::BTreeSet;
use std::fmt;

use nalgebra::DMatrix;

use super::AnalysisError;
use crate::vectorfield::{designed_equilibria, jacobian, Coord, Equilibrium, EquilibriumLabel, FieldParams, Level};

/// Eigenvalues above this count as positive.
pub const EIGEN_TOL: f64 = 1e-6;

const SCHUR_EPS: f64 = 1e-14;
const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttributedEigenvalue {
    pub re: f64,
    pub im: f64,
    /// Set when the eigenvalue belongs to a decoupled coordinate.
    pub coordinate: Option<Coord>,
}

impl fmt::Display for AttributedEigenvalue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{:.6}", self.re)?;
        } else {
            write!(f, "{:.6}{:+.6}i", self.re, self.im)?;
        }
        match self.coordinate {
            Some(c) => write!(f, " [{c}]"),
            None => write!(f, " [coupled]"),
        }
    }
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Groups coordinates that the Jacobian couples (in either direction).
fn coupled_blocks(j: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = j.nrows();
    let mut parent: Vec<usize> = (0..n).collect();
    for r in 0..n {
        for c in 0..n {
            if r != c && j[(r, c)] != 0.0 {
                let (a, b) = (find(&mut parent, r), find(&mut parent, c));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let root = find(&mut parent, i);
        if slot[root] == usize::MAX {
            slot[root] = blocks.len();
            blocks.push(Vec::new());
        }
        blocks[slot[root]].push(i);
    }
    blocks
}

/// Eigenvalues of the analytic Jacobian at `eq`.
///
/// The Jacobian is split into decoupled blocks. A 1x1 block yields its
/// diagonal entry attributed to that coordinate; larger blocks go through a
/// dense Schur decomposition and are left unattributed.
pub fn eigen_at(eq: &Equilibrium, p: &FieldParams) -> Result<Vec<AttributedEigenvalue>, AnalysisError> {
    let jm = jacobian(&eq.state, p)?;
    let layout = p.layout();
    let mut out = Vec::with_capacity(jm.nrows());
    for block in coupled_blocks(&jm) {
        if let [i] = block[..] {
            out.push(AttributedEigenvalue { re: jm[(i, i)], im: 0.0, coordinate: Some(layout.coord(i)) });
            continue;
        }
        let sub = DMatrix::from_fn(block.len(), block.len(), |r, c| jm[(block[r], block[c])]);
        let schur = sub
            .try_schur(SCHUR_EPS, SCHUR_MAX_ITER)
            .ok_or_else(|| AnalysisError::NumericalFailure(eq.label.to_string()))?;
        for z in schur.complex_eigenvalues().iter() {
            out.push(AttributedEigenvalue { re: z.re, im: z.im, coordinate: None });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct VertexEigenCheck {
    pub label: EquilibriumLabel,
    pub level: Level,
    /// Directions (0-based, within the level) with a positive eigenvalue.
    pub positive: BTreeSet<usize>,
    /// Out-neighbours in the prescribed digraph (0-based).
    pub expected: BTreeSet<usize>,
    /// Positive eigenvalues that could not be tied to a coordinate.
    pub unattributed_positive: usize,
    pub pass: bool,
}

fn one_based(s: &BTreeSet<usize>) -> String {
    let items: Vec<String> = s.iter().map(|v| (v + 1).to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

impl fmt::Display for VertexEigenCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<10} positive {} expected {} {}",
            self.label.to_string(),
            one_based(&self.positive),
            one_based(&self.expected),
            if self.pass { "ok" } else { "MISMATCH" }
        )?;
        if self.unattributed_positive > 0 {
            write!(f, " ({} unattributed positive)", self.unattributed_positive)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenCheck {
    pub vertices: Vec<VertexEigenCheck>,
    pub pass: bool,
}

/// Compares positive transverse eigendirections with out-neighbour sets at
/// every `Super(j)` and `Sub(j, i)`.
pub fn check_edge_eigen_correspondence(p: &FieldParams) -> Result<EigenCheck, AnalysisError> {
    let h = p.hierarchy();
    let mut vertices = Vec::new();
    for eq in designed_equilibria(p) {
        let (level, vertex, graph) = match eq.label {
            EquilibriumLabel::Origin => continue,
            EquilibriumLabel::Super(j) => (Level::Super, j, h.superstructure()),
            EquilibriumLabel::Sub(j, i) => (Level::Sub(j), i, h.substructure(j)),
        };
        let eig = eigen_at(&eq, p)?;
        let mut positive = BTreeSet::new();
        let mut unattributed_positive = 0;
        for e in &eig {
            if e.re <= EIGEN_TOL {
                continue;
            }
            match (level, e.coordinate) {
                (Level::Super, Some(Coord::Super(m))) if m != vertex => {
                    positive.insert(m);
                }
                (Level::Sub(j), Some(Coord::Sub(b, m))) if b == j && m != vertex => {
                    positive.insert(m);
                }
                (_, None) => unattributed_positive += 1,
                _ => {}
            }
        }
        let expected = graph.out_neighbors(vertex).expect("vertex from the layout");
        let pass = unattributed_positive == 0 && positive == expected;
        vertices.push(VertexEigenCheck { label: eq.label, level, positive, expected, unattributed_positive, pass });
    }
    let pass = vertices.iter().all(|v| v.pass);
    Ok(EigenCheck { vertices, pass })
}
