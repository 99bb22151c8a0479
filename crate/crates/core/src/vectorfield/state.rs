use std::fmt;
use std::sync::Arc;

use crate::hierarchy::HierarchySpec;

/// Offset table for the flat state vector: the X block first, then x^1..x^N.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    n_super: usize,
    offsets: Vec<usize>,
    sizes: Vec<usize>,
    dim: usize,
}

/// A single coordinate of the state, 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Coord {
    /// X_j
    Super(usize),
    /// x^j_i
    Sub(usize, usize),
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Coord::Super(j) => write!(f, "X{}", j + 1),
            Coord::Sub(j, i) => write!(f, "x{}_{}", j + 1, i + 1),
        }
    }
}

impl Layout {
    pub fn new(n_super: usize, sizes: Vec<usize>) -> Self {
        assert_eq!(n_super, sizes.len(), "one substructure block per superstructure vertex");
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut at = n_super;
        for &n in &sizes {
            offsets.push(at);
            at += n;
        }
        Layout { n_super, offsets, sizes, dim: at }
    }

    pub fn for_hierarchy(h: &HierarchySpec) -> Self {
        Layout::new(h.n_super(), h.sub_sizes())
    }

    pub fn n_super(&self) -> usize {
        self.n_super
    }

    pub fn n_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn sub_size(&self, j: usize) -> usize {
        self.sizes[j]
    }

    pub fn sub_sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn super_range(&self) -> std::ops::Range<usize> {
        0..self.n_super
    }

    pub fn sub_range(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j] + self.sizes[j]
    }

    pub fn index(&self, c: Coord) -> usize {
        match c {
            Coord::Super(j) => {
                assert!(j < self.n_super);
                j
            }
            Coord::Sub(j, i) => {
                assert!(i < self.sizes[j]);
                self.offsets[j] + i
            }
        }
    }

    pub fn coord(&self, index: usize) -> Coord {
        assert!(index < self.dim);
        if index < self.n_super {
            return Coord::Super(index);
        }
        let j = self.offsets.partition_point(|&o| o <= index) - 1;
        Coord::Sub(j, index - self.offsets[j])
    }

    /// Column names: `X1..XN`, then `x{j}_{i}` per block.
    pub fn labels(&self) -> Vec<String> {
        (0..self.dim).map(|k| self.coord(k).to_string()).collect()
    }
}

/// Full state (X, x^1, ..., x^N) stored as one flat vector.
#[derive(Debug, Clone, PartialEq)]
pub struct HierState {
    layout: Arc<Layout>,
    values: Vec<f64>,
}

impl HierState {
    pub fn zeros(layout: Arc<Layout>) -> Self {
        let values = vec![0.0; layout.dim()];
        HierState { layout, values }
    }

    /// Panics if `values.len()` differs from the layout dimension.
    pub fn from_flat(layout: Arc<Layout>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), layout.dim(), "state dimension");
        HierState { layout, values }
    }

    /// Returns `None` when the block sizes do not match the layout.
    pub fn from_blocks(layout: Arc<Layout>, super_block: &[f64], subs: &[Vec<f64>]) -> Option<Self> {
        if super_block.len() != layout.n_super() || subs.len() != layout.n_blocks() {
            return None;
        }
        let mut values = super_block.to_vec();
        for (j, x) in subs.iter().enumerate() {
            if x.len() != layout.sub_size(j) {
                return None;
            }
            values.extend_from_slice(x);
        }
        Some(HierState { layout, values })
    }

    pub fn layout(&self) -> &Arc<Layout> {
        &self.layout
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn super_block(&self) -> &[f64] {
        &self.values[self.layout.super_range()]
    }

    pub fn sub_block(&self, j: usize) -> &[f64] {
        &self.values[self.layout.sub_range(j)]
    }

    pub fn get(&self, c: Coord) -> f64 {
        self.values[self.layout.index(c)]
    }

    pub fn set(&mut self, c: Coord, v: f64) {
        let k = self.layout.index(c);
        self.values[k] = v;
    }

    pub fn sup_distance(&self, other: &HierState) -> f64 {
        sup_distance(&self.values, &other.values)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_and_labels() {
        let l = Layout::new(3, vec![3, 3, 4]);
        assert_eq!(l.dim(), 13);
        assert_eq!(l.sub_range(2), 9..13);
        assert_eq!(l.coord(9), Coord::Sub(2, 0));
        assert_eq!(l.coord(2), Coord::Super(2));
        assert_eq!(l.coord(8), Coord::Sub(1, 2));
        for k in 0..l.dim() {
            assert_eq!(l.index(l.coord(k)), k);
        }
        let labels = l.labels();
        assert_eq!(labels[0], "X1");
        assert_eq!(labels[3], "x1_1");
        assert_eq!(labels[12], "x3_4");
    }

    #[test]
    fn blocks() {
        let l = Arc::new(Layout::new(2, vec![1, 2]));
        let s = HierState::from_blocks(l.clone(), &[1.0, 2.0], &[vec![3.0], vec![4.0, 5.0]]).unwrap();
        assert_eq!(s.sub_block(1), &[4.0, 5.0]);
        assert_eq!(s.get(Coord::Sub(1, 1)), 5.0);
        assert!(HierState::from_blocks(l, &[1.0], &[vec![3.0], vec![4.0, 5.0]]).is_none());
    }
}
