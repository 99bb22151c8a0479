use std::fmt;

use super::field::FieldParams;
use super::state::{Coord, HierState};

/// Which designed equilibrium; indices are 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EquilibriumLabel {
    Origin,
    /// X = e_j, all substructures at rest.
    Super(usize),
    /// X = e_j, x^j = e_i.
    Sub(usize, usize),
}

impl fmt::Display for EquilibriumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            EquilibriumLabel::Origin => write!(f, "Origin"),
            EquilibriumLabel::Super(j) => write!(f, "Super({})", j + 1),
            EquilibriumLabel::Sub(j, i) => write!(f, "Sub({},{})", j + 1, i + 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub label: EquilibriumLabel,
    pub state: HierState,
}

/// Builds the state of a designed equilibrium.
pub fn equilibrium_state(p: &FieldParams, label: EquilibriumLabel) -> HierState {
    let mut s = HierState::zeros(p.layout().clone());
    match label {
        EquilibriumLabel::Origin => {}
        EquilibriumLabel::Super(j) => s.set(Coord::Super(j), 1.0),
        EquilibriumLabel::Sub(j, i) => {
            s.set(Coord::Super(j), 1.0);
            s.set(Coord::Sub(j, i), 1.0);
        }
    }
    s
}

/// Origin, every `Super(j)` and every `Sub(j, i)`, in that order.
pub fn designed_equilibria(p: &FieldParams) -> Vec<Equilibrium> {
    let l = p.layout();
    let mut labels = vec![EquilibriumLabel::Origin];
    labels.extend((0..l.n_super()).map(EquilibriumLabel::Super));
    for j in 0..l.n_blocks() {
        labels.extend((0..l.sub_size(j)).map(|i| EquilibriumLabel::Sub(j, i)));
    }
    labels
        .into_iter()
        .map(|label| Equilibrium { label, state: equilibrium_state(p, label) })
        .collect()
}
