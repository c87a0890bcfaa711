//! Weighted graphs stored as dense adjacency matrices.
//!
//! Entry `(u, v)` is the weight of the edge `u -> v`; diagonal entries are
//! self-loops. A self-loop of weight `w` contributes `w` exactly once to both
//! the in- and out-degree of its vertex, which is what makes the delay
//! transformation `W = D_out (T - I) + A` produce degrees `d_u * tau_u`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeKind {
    Out,
    In,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeVector {
    pub values: Vec<f64>,
    pub kind: DegreeKind,
}

impl DegreeVector {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// First vertex whose degree is not strictly positive.
    pub fn first_zero(&self) -> Option<usize> {
        self.values.iter().position(|&d| d <= 0.0)
    }

    /// Fails with the offending vertex when some degree is zero.
    pub fn require_positive(&self) -> Result<&[f64]> {
        match self.first_zero() {
            Some(vertex) => Err(Error::ZeroDegree {
                vertex,
                kind: match self.kind {
                    DegreeKind::Out => "out",
                    DegreeKind::In => "in",
                },
            }),
            None => Ok(&self.values),
        }
    }
}

/// A validated weighted graph. Immutable; mutators return new graphs.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    weights: Matrix,
    directed: bool,
}

impl Graph {
    /// Builds a graph from an edge list. Duplicate edges sum their weights and,
    /// for undirected graphs, each edge is stored in both directions.
    pub fn new(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> Result<Graph> {
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut weights = Matrix::zeros(n, n);
        for &(u, v, w) in edges {
            check_edge(n, u, v, w)?;
            weights[(u, v)] += w;
            if !directed && u != v {
                weights[(v, u)] += w;
            }
        }
        Ok(Graph { weights, directed })
    }

    /// Wraps an adjacency matrix after validating it. Undirected graphs must be
    /// exactly symmetric.
    pub fn from_matrix(weights: Matrix, directed: bool) -> Result<Graph> {
        let n = weights.check_square()?;
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for u in 0..n {
            for v in 0..n {
                let w = weights[(u, v)];
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::InvalidWeight { u, v, weight: w });
                }
                if !directed && v > u && w != weights[(v, u)] {
                    return Err(Error::Asymmetric { u, v });
                }
            }
        }
        Ok(Graph { weights, directed })
    }

    pub fn n(&self) -> usize {
        self.weights.rows()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        self.weights[(u, v)]
    }

    pub fn degrees(&self, kind: DegreeKind) -> DegreeVector {
        let values = match kind {
            DegreeKind::Out => self.weights.row_sums(),
            DegreeKind::In => self.weights.col_sums(),
        };
        DegreeVector { values, kind }
    }

    pub fn out_degrees(&self) -> DegreeVector {
        self.degrees(DegreeKind::Out)
    }

    pub fn in_degrees(&self) -> DegreeVector {
        self.degrees(DegreeKind::In)
    }

    /// Total weighted out-degree, the traffic measure of the networking model.
    pub fn total_traffic(&self) -> f64 {
        self.out_degrees().sum()
    }

    /// Returns a copy with `w` added to edge `(u, v)` (and `(v, u)` when undirected).
    pub fn add_edge(&self, u: usize, v: usize, w: f64) -> Result<Graph> {
        check_edge(self.n(), u, v, w)?;
        let mut weights = self.weights.clone();
        weights[(u, v)] += w;
        if !self.directed && u != v {
            weights[(v, u)] += w;
        }
        Ok(Graph {
            weights,
            directed: self.directed,
        })
    }

    /// Connectivity of the undirected support (edge direction ignored).
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = queue.pop_front() {
            for (v, seen_v) in seen.iter_mut().enumerate() {
                if !*seen_v && (self.weights[(u, v)] > 0.0 || self.weights[(v, u)] > 0.0) {
                    *seen_v = true;
                    count += 1;
                    queue.push_back(v);
                }
            }
        }
        count == n
    }

    pub fn require_undirected(&self, operation: &'static str) -> Result<()> {
        if self.directed {
            return Err(Error::DirectedInput { operation });
        }
        Ok(())
    }

    pub fn require_connected(&self) -> Result<()> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(())
    }

    /// Edges with nonzero weight. Undirected graphs list each pair once with `u <= v`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        for u in 0..n {
            let start = if self.directed { 0 } else { u };
            for v in start..n {
                let w = self.weights[(u, v)];
                if w != 0.0 {
                    out.push((u, v, w));
                }
            }
        }
        out
    }
}

fn check_edge(n: usize, u: usize, v: usize, w: f64) -> Result<()> {
    for index in [u, v] {
        if index >= n {
            return Err(Error::IndexOutOfRange { index, n });
        }
    }
    if !w.is_finite() || w < 0.0 {
        return Err(Error::InvalidWeight { u, v, weight: w });
    }
    Ok(())
}

/// Small named graphs used throughout the tests and bundled scenarios.
pub mod families {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        Graph::new(n, &edges, false).expect("valid path")
    }

    pub fn cycle(n: usize) -> Graph {
        let mut edges: Vec<_> = (1..n).map(|i| (i - 1, i, 1.0)).collect();
        edges.push((n - 1, 0, 1.0));
        Graph::new(n, &edges, false).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v, 1.0));
            }
        }
        Graph::new(n, &edges, false).expect("valid complete graph")
    }

    /// Star with vertex 0 as the centre and `leaves` leaves.
    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i, 1.0)).collect();
        Graph::new(leaves + 1, &edges, false).expect("valid star")
    }

    /// Two `k`-cliques joined by a single bridge edge `(k - 1, k)`.
    pub fn dumbbell(k: usize) -> Graph {
        let mut edges = Vec::new();
        for offset in [0, k] {
            for u in 0..k {
                for v in u + 1..k {
                    edges.push((offset + u, offset + v, 1.0));
                }
            }
        }
        edges.push((k - 1, k, 1.0));
        Graph::new(2 * k, &edges, false).expect("valid dumbbell")
    }
}

#[cfg(test)]
mod tests {
    use super::families::*;
    use super::*;

    #[test]
    fn path_is_symmetric() {
        let g = Graph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)], false).unwrap();
        assert_eq!(
            g.weights().to_rows(),
            vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn directed_edge_stored_once() {
        let g = Graph::new(2, &[(0, 1, 1.0)], true).unwrap();
        assert_eq!(g.weights().to_rows(), vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn negative_and_nonfinite_weights_rejected() {
        assert!(matches!(
            Graph::new(2, &[(0, 1, -1.0)], false),
            Err(Error::InvalidWeight { .. })
        ));
        assert!(Graph::new(2, &[(0, 1, f64::NAN)], false).is_err());
        assert!(Graph::new(2, &[(0, 1, f64::INFINITY)], false).is_err());
        assert!(matches!(
            Graph::new(2, &[(0, 2, 1.0)], false),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
        assert_eq!(Graph::new(0, &[], false), Err(Error::EmptyGraph));
    }

    #[test]
    fn duplicate_edges_sum() {
        let g = Graph::new(2, &[(0, 1, 1.0), (1, 0, 2.5)], false).unwrap();
        assert_eq!(g.weight(0, 1), 3.5);
        assert_eq!(g.weight(1, 0), 3.5);
    }

    #[test]
    fn degree_examples() {
        assert_eq!(path(3).out_degrees().values, vec![1.0, 2.0, 1.0]);
        let two_cycle = Graph::new(2, &[(0, 1, 1.0), (1, 0, 1.0)], true).unwrap();
        assert_eq!(two_cycle.out_degrees().values, vec![1.0, 1.0]);
        assert_eq!(two_cycle.in_degrees().values, vec![1.0, 1.0]);
        let looped = Graph::new(1, &[(0, 0, 2.0)], false).unwrap();
        assert_eq!(looped.out_degrees().values, vec![2.0]);
        assert_eq!(looped.in_degrees().values, vec![2.0]);
    }

    #[test]
    fn traffic_examples() {
        assert_eq!(path(4).total_traffic(), 6.0);
        assert_eq!(Graph::new(3, &[], false).unwrap().total_traffic(), 0.0);
    }

    #[test]
    fn add_edge_examples() {
        let p4 = path(4);
        let healed = p4.add_edge(0, 3, 4.0).unwrap();
        assert_eq!(healed.out_degrees().values, vec![5.0, 2.0, 2.0, 5.0]);
        assert_eq!(p4.out_degrees().values, vec![1.0, 2.0, 2.0, 1.0]);

        let looped = p4.add_edge(0, 0, 1.0).unwrap();
        assert_eq!(looped.out_degrees().values[0], 2.0);

        let same = p4.add_edge(0, 1, 0.0).unwrap();
        assert_eq!(same.out_degrees(), p4.out_degrees());

        assert!(p4.add_edge(0, 1, -1.0).is_err());
        assert!(p4.add_edge(0, 4, 1.0).is_err());
    }

    #[test]
    fn from_matrix_rejects_asymmetric_undirected() {
        let m = Matrix::from_rows(vec![vec![0.0, 1.0], vec![2.0, 0.0]]).unwrap();
        assert!(matches!(
            Graph::from_matrix(m.clone(), false),
            Err(Error::Asymmetric { u: 0, v: 1 })
        ));
        assert!(Graph::from_matrix(m, true).is_ok());
    }

    #[test]
    fn connectivity() {
        assert!(path(5).is_connected());
        assert!(!Graph::new(3, &[(0, 1, 1.0)], false).unwrap().is_connected());
        // weak connectivity is enough
        assert!(Graph::new(3, &[(0, 1, 1.0), (2, 1, 1.0)], true).unwrap().is_connected());
    }

    #[test]
    fn edge_listing_round_trips() {
        let g = dumbbell(3).add_edge(2, 2, 0.5).unwrap();
        let rebuilt = Graph::new(g.n(), &g.edges(), false).unwrap();
        assert_eq!(rebuilt, g);
    }
}
