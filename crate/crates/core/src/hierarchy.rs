//! Directed graphs and two-level hierarchical collections of them.
//!
//! Vertices are 0-based inside the crate. Everything that faces a user
//! (error messages, reports, scenario files) uses 1-based labels, and the
//! conversion happens only at that boundary.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A single reason a digraph or hierarchy is rejected. Vertex labels are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("DuplicateEdge ({0},{1})")]
    DuplicateEdge(usize, usize),
    #[error("VertexOutOfRange: vertex {vertex} in a digraph on {n_vertices} vertices")]
    VertexOutOfRange { vertex: usize, n_vertices: usize },
    #[error("SelfLoop ({0},{0})")]
    SelfLoop(usize),
    #[error("TwoCycle ({0},{1})")]
    TwoCycle(usize, usize),
    #[error("EmptyDigraph: a digraph needs at least one vertex")]
    EmptyDigraph,
    #[error("SubstructureCountMismatch: superstructure has {expected} vertices but {found} substructures were given")]
    SubstructureCountMismatch { expected: usize, found: usize },
}

/// Where in a hierarchy a violation was found.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphLocation {
    Superstructure,
    /// 0-based substructure index.
    Substructure(usize),
    Hierarchy,
}

impl fmt::Display for GraphLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphLocation::Superstructure => write!(f, "Gamma"),
            GraphLocation::Substructure(j) => write!(f, "G_{}", j + 1),
            GraphLocation::Hierarchy => write!(f, "hierarchy"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub location: GraphLocation,
    pub error: GraphError,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.error)
    }
}

/// A directed graph without 1-cycles or 2-cycles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    n_vertices: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Digraph {
    /// Builds a digraph from 1-based edge pairs, as written in scenario files.
    pub fn from_edges(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        Self::from_edges_all(n_vertices, edges).map_err(|mut errs| errs.remove(0))
    }

    /// Like [`Digraph::from_edges`], but reports every problem instead of the first.
    pub fn from_edges_all(
        n_vertices: usize,
        edges: &[(usize, usize)],
    ) -> Result<Self, Vec<GraphError>> {
        let mut errors = Vec::new();
        if n_vertices == 0 {
            errors.push(GraphError::EmptyDigraph);
        }
        let mut set = BTreeSet::new();
        for &(from, to) in edges {
            let mut in_range = true;
            for vertex in [from, to] {
                if vertex == 0 || vertex > n_vertices {
                    errors.push(GraphError::VertexOutOfRange { vertex, n_vertices });
                    in_range = false;
                }
            }
            if !in_range {
                continue;
            }
            if from == to {
                errors.push(GraphError::SelfLoop(from));
                continue;
            }
            if !set.insert((from - 1, to - 1)) {
                errors.push(GraphError::DuplicateEdge(from, to));
            }
        }
        for &(i, k) in &set {
            if i < k && set.contains(&(k, i)) {
                errors.push(GraphError::TwoCycle(i + 1, k + 1));
            }
        }
        if errors.is_empty() {
            Ok(Digraph { n_vertices, edges: set })
        } else {
            Err(errors)
        }
    }

    /// Builds a digraph from 0-based pairs. Used internally and in tests.
    pub fn from_zero_based(n_vertices: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let shifted: Vec<_> = edges.iter().map(|&(i, k)| (i + 1, k + 1)).collect();
        Self::from_edges(n_vertices, &shifted)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.edges.contains(&(from, to))
    }

    /// 0-based edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// 1-based edge list, the inverse of [`Digraph::from_edges`].
    pub fn edge_list(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|&(i, k)| (i + 1, k + 1)).collect()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// `A[i][k] = 1` iff there is an edge from vertex i to vertex k.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.n_vertices;
        let mut a = vec![vec![0u8; n]; n];
        for &(i, k) in &self.edges {
            a[i][k] = 1;
        }
        a
    }

    /// Out-neighbours of `i` (0-based in, 0-based out).
    pub fn out_neighbors(&self, i: usize) -> Result<BTreeSet<usize>, GraphError> {
        if i >= self.n_vertices {
            return Err(GraphError::VertexOutOfRange {
                vertex: i + 1,
                n_vertices: self.n_vertices,
            });
        }
        Ok(self
            .edges
            .range((i, 0)..(i + 1, 0))
            .map(|&(_, k)| k)
            .collect())
    }
}

/// A superstructure digraph on N vertices plus one substructure per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HierarchySpec {
    superstructure: Digraph,
    substructures: Vec<Digraph>,
}

impl HierarchySpec {
    pub fn new(superstructure: Digraph, substructures: Vec<Digraph>) -> Result<Self, Violation> {
        if substructures.len() != superstructure.n_vertices() {
            return Err(Violation {
                location: GraphLocation::Hierarchy,
                error: GraphError::SubstructureCountMismatch {
                    expected: superstructure.n_vertices(),
                    found: substructures.len(),
                },
            });
        }
        Ok(HierarchySpec { superstructure, substructures })
    }

    pub fn superstructure(&self) -> &Digraph {
        &self.superstructure
    }

    pub fn substructures(&self) -> &[Digraph] {
        &self.substructures
    }

    pub fn substructure(&self, j: usize) -> &Digraph {
        &self.substructures[j]
    }

    /// N, the number of superstructure vertices.
    pub fn n_super(&self) -> usize {
        self.superstructure.n_vertices()
    }

    /// Block sizes n_1..n_N.
    pub fn sub_sizes(&self) -> Vec<usize> {
        self.substructures.iter().map(Digraph::n_vertices).collect()
    }
}

/// Raw, unvalidated hierarchy description with 1-based edge lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDigraph {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

/// Validates a raw hierarchy and reports every violation, located by digraph.
pub fn validate_hierarchy(
    superstructure: &RawDigraph,
    substructures: &[RawDigraph],
) -> Result<HierarchySpec, Vec<Violation>> {
    let mut violations = Vec::new();
    let sup = Digraph::from_edges_all(superstructure.n_vertices, &superstructure.edges)
        .map_err(|errs| {
            violations.extend(errs.into_iter().map(|error| Violation {
                location: GraphLocation::Superstructure,
                error,
            }))
        })
        .ok();
    if substructures.len() != superstructure.n_vertices {
        violations.push(Violation {
            location: GraphLocation::Hierarchy,
            error: GraphError::SubstructureCountMismatch {
                expected: superstructure.n_vertices,
                found: substructures.len(),
            },
        });
    }
    let mut subs = Vec::with_capacity(substructures.len());
    for (j, raw) in substructures.iter().enumerate() {
        match Digraph::from_edges_all(raw.n_vertices, &raw.edges) {
            Ok(d) => subs.push(d),
            Err(errs) => violations.extend(errs.into_iter().map(|error| Violation {
                location: GraphLocation::Substructure(j),
                error,
            })),
        }
    }
    match sup {
        Some(sup) if violations.is_empty() => {
            HierarchySpec::new(sup, subs).map_err(|v| vec![v])
        }
        _ => Err(violations),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn three_cycle() -> Digraph {
        Digraph::from_edges(3, &[(1, 2), (2, 3), (3, 1)]).unwrap()
    }

    fn kirk_silber() -> Digraph {
        Digraph::from_edges(4, &[(1, 2), (2, 3), (2, 4), (3, 1), (4, 1)]).unwrap()
    }

    fn raw(n: usize, edges: &[(usize, usize)]) -> RawDigraph {
        RawDigraph { n_vertices: n, edges: edges.to_vec() }
    }

    #[test]
    fn three_cycle_adjacency() {
        assert_eq!(three_cycle().adjacency(), vec![vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]);
    }

    #[test]
    fn reversed_cycle_adjacency() {
        let d = Digraph::from_edges(3, &[(1, 3), (3, 2), (2, 1)]).unwrap();
        assert_eq!(d.adjacency(), vec![vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]);
    }

    #[test]
    fn kirk_silber_adjacency() {
        assert_eq!(
            kirk_silber().adjacency(),
            vec![vec![0, 1, 0, 0], vec![0, 0, 1, 1], vec![1, 0, 0, 0], vec![1, 0, 0, 0]]
        );
    }

    #[test]
    fn edgeless() {
        let d = Digraph::from_edges(2, &[]).unwrap();
        assert_eq!(d.adjacency(), vec![vec![0, 0], vec![0, 0]]);
        assert!(d.out_neighbors(0).unwrap().is_empty());
        assert!(d.out_neighbors(1).unwrap().is_empty());
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Digraph::from_edges(2, &[(1, 2), (2, 1)]), Err(GraphError::TwoCycle(1, 2)));
        assert_eq!(Digraph::from_edges(2, &[(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            Digraph::from_edges(2, &[(1, 2), (1, 2)]),
            Err(GraphError::DuplicateEdge(1, 2))
        );
        assert_eq!(
            Digraph::from_edges(2, &[(1, 3)]),
            Err(GraphError::VertexOutOfRange { vertex: 3, n_vertices: 2 })
        );
        assert_eq!(
            Digraph::from_edges(2, &[(0, 1)]),
            Err(GraphError::VertexOutOfRange { vertex: 0, n_vertices: 2 })
        );
        assert_eq!(Digraph::from_edges(0, &[]), Err(GraphError::EmptyDigraph));
    }

    #[test]
    fn out_neighbors_queries() {
        let ks = kirk_silber();
        assert_eq!(ks.out_neighbors(1).unwrap(), BTreeSet::from([2, 3]));
        assert_eq!(three_cycle().out_neighbors(2).unwrap(), BTreeSet::from([0]));
        assert!(matches!(ks.out_neighbors(4), Err(GraphError::VertexOutOfRange { vertex: 5, .. })));
    }

    #[test]
    fn example_one_hierarchy_is_valid() {
        let h = validate_hierarchy(
            &raw(3, &[(1, 2), (2, 3), (3, 1)]),
            &[
                raw(3, &[(1, 2), (2, 3), (3, 1)]),
                raw(3, &[(1, 3), (3, 2), (2, 1)]),
                raw(4, &[(1, 2), (2, 3), (2, 4), (3, 1), (4, 1)]),
            ],
        )
        .unwrap();
        assert_eq!(h.sub_sizes(), vec![3, 3, 4]);
        assert_eq!(h.substructure(2), &kirk_silber());
    }

    #[test]
    fn count_mismatch() {
        let errs = validate_hierarchy(
            &raw(3, &[(1, 2), (2, 3), (3, 1)]),
            &[raw(3, &[]), raw(3, &[])],
        )
        .unwrap_err();
        assert_eq!(
            errs,
            vec![Violation {
                location: GraphLocation::Hierarchy,
                error: GraphError::SubstructureCountMismatch { expected: 3, found: 2 },
            }]
        );
    }

    #[test]
    fn two_cycle_in_g2_is_pinpointed() {
        let errs = validate_hierarchy(
            &raw(3, &[(1, 2), (2, 3), (3, 1)]),
            &[
                raw(3, &[(1, 2), (2, 3), (3, 1)]),
                raw(3, &[(1, 3), (3, 2), (2, 1), (1, 2)]),
                raw(4, &[(1, 2), (2, 3), (2, 4), (3, 1), (4, 1)]),
            ],
        )
        .unwrap_err();
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].location, GraphLocation::Substructure(1));
        assert_eq!(errs[0].error, GraphError::TwoCycle(1, 2));
        assert_eq!(errs[0].to_string(), "G_2: TwoCycle (1,2)");
    }

    #[test]
    fn all_violations_reported() {
        let errs = validate_hierarchy(&raw(2, &[(1, 1), (1, 2), (2, 1)]), &[raw(2, &[(3, 1)])])
            .unwrap_err();
        assert_eq!(errs.len(), 4);
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        fn valid_digraph() -> impl Strategy<Value = Digraph> {
            (1usize..8).prop_flat_map(|n| {
                // one bit per unordered pair: 0 = none, 1 = i->k, 2 = k->i
                proptest::collection::vec(0u8..3, n * (n - 1) / 2).prop_map(move |choice| {
                    let mut edges = Vec::new();
                    let mut c = choice.iter();
                    for i in 0..n {
                        for k in (i + 1)..n {
                            match c.next().unwrap() {
                                1 => edges.push((i, k)),
                                2 => edges.push((k, i)),
                                _ => {}
                            }
                        }
                    }
                    Digraph::from_zero_based(n, &edges).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn adjacency_has_no_short_cycles(d in valid_digraph()) {
                let a = d.adjacency();
                for i in 0..d.n_vertices() {
                    prop_assert_eq!(a[i][i], 0);
                    for k in 0..d.n_vertices() {
                        prop_assert_eq!(a[i][k] * a[k][i], 0);
                    }
                }
            }

            #[test]
            fn edge_list_round_trips(d in valid_digraph()) {
                let again = Digraph::from_edges(d.n_vertices(), &d.edge_list()).unwrap();
                prop_assert_eq!(again, d);
            }
        }
    }
}
