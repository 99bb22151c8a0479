//! The two reference hierarchies with their published coefficient tables,
//! timescales and initial conditions.

use nalgebra::DMatrix;

use crate::hierarchy::{Digraph, HierarchySpec};
use crate::vectorfield::{
    coefficients_from_pair_matrices, FieldParams, HierState, Orientation, Timescales, Variant,
};

pub const EPSILON: f64 = 0.2;
pub const DISPLAY_TIMESCALES: Timescales = Timescales { phi: 0.1, psi: 200.0, omega: 0.05 };
pub const T_END: f64 = 2000.0;

pub fn three_cycle() -> Digraph {
    Digraph::from_edges(3, &[(1, 2), (2, 3), (3, 1)]).unwrap()
}

pub fn reversed_three_cycle() -> Digraph {
    Digraph::from_edges(3, &[(1, 3), (3, 2), (2, 1)]).unwrap()
}

pub fn kirk_silber() -> Digraph {
    Digraph::from_edges(4, &[(1, 2), (2, 3), (2, 4), (3, 1), (4, 1)]).unwrap()
}

pub fn four_cycle() -> Digraph {
    Digraph::from_edges(4, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap()
}

pub fn reversed_four_cycle() -> Digraph {
    Digraph::from_edges(4, &[(1, 4), (2, 1), (3, 2), (4, 3)]).unwrap()
}

fn m(n: usize, rows: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, rows)
}

/// Pair-indexed tables (row = source vertex).
pub mod tables {
    use super::*;

    pub fn cycle_super() -> DMatrix<f64> {
        m(3, &[0.0, 1.0, -1.5, -1.5, 0.0, 1.0, 1.0, -1.5, 0.0])
    }

    pub fn cycle_sub() -> DMatrix<f64> {
        m(3, &[0.0, 1.0, -1.1, -1.1, 0.0, 1.0, 1.0, -1.1, 0.0])
    }

    pub fn reversed_cycle_sub() -> DMatrix<f64> {
        m(3, &[0.0, -1.1, 1.0, 1.0, 0.0, -1.1, -1.1, 1.0, 0.0])
    }

    pub fn kirk_silber() -> DMatrix<f64> {
        m(
            4,
            &[
                0.0, 1.0, -1.5, -1.5, //
                -1.5, 0.0, 0.5, 2.0, //
                1.0, -1.5, 0.0, -1.5, //
                1.0, -1.5, -1.5, 0.0,
            ],
        )
    }

    pub fn four_cycle_sub() -> DMatrix<f64> {
        m(
            4,
            &[
                0.0, 1.0, -1.01, -1.1, //
                -1.01, 0.0, 1.0, -1.01, //
                -1.01, -1.01, 0.0, 1.0, //
                1.0, -1.01, -1.01, 0.0,
            ],
        )
    }

    pub fn reversed_four_cycle_sub() -> DMatrix<f64> {
        m(
            4,
            &[
                0.0, -1.01, -1.01, 1.0, //
                1.0, 0.0, -1.01, -1.01, //
                -1.01, 1.0, 0.0, -1.01, //
                -1.01, -1.01, 1.0, 0.0,
            ],
        )
    }
}

/// Three-cycle superstructure over two opposite three-cycles and a
/// Kirk-Silber substructure.
pub fn example_one_hierarchy() -> HierarchySpec {
    HierarchySpec::new(three_cycle(), vec![three_cycle(), reversed_three_cycle(), kirk_silber()])
        .unwrap()
}

/// Kirk-Silber superstructure over opposite three-cycles and opposite four-cycles.
pub fn example_two_hierarchy() -> HierarchySpec {
    HierarchySpec::new(
        kirk_silber(),
        vec![three_cycle(), reversed_three_cycle(), four_cycle(), reversed_four_cycle()],
    )
    .unwrap()
}

pub fn example_one(orientation: Orientation, timescales: Timescales) -> FieldParams {
    let h = example_one_hierarchy();
    let c = coefficients_from_pair_matrices(
        &h,
        &tables::cycle_super(),
        &[tables::cycle_sub(), tables::reversed_cycle_sub(), tables::kirk_silber()],
        orientation,
    )
    .unwrap();
    FieldParams::new(h, c, EPSILON, timescales, Variant::Standard).unwrap()
}

pub fn example_two(orientation: Orientation, timescales: Timescales) -> FieldParams {
    let h = example_two_hierarchy();
    let c = coefficients_from_pair_matrices(
        &h,
        &tables::kirk_silber(),
        &[
            tables::cycle_sub(),
            tables::reversed_cycle_sub(),
            tables::four_cycle_sub(),
            tables::reversed_four_cycle_sub(),
        ],
        orientation,
    )
    .unwrap();
    FieldParams::new(h, c, EPSILON, timescales, Variant::Standard).unwrap()
}

pub fn example_one_initial(p: &FieldParams) -> HierState {
    HierState::from_blocks(
        p.layout().clone(),
        &[0.9, 0.1, 0.1],
        &[vec![0.999, 0.1, 0.1], vec![0.1, 0.999, 0.1], vec![0.9, 0.1, 0.3, 0.000001]],
    )
    .unwrap()
}

pub fn example_two_initial(p: &FieldParams) -> HierState {
    let three = vec![0.999, 0.1, 0.1];
    let four = vec![0.999, 0.1, 0.1, 0.1];
    HierState::from_blocks(
        p.layout().clone(),
        &[0.9, 0.1, 0.3, 0.000001],
        &[three.clone(), three, four.clone(), four],
    )
    .unwrap()
}
