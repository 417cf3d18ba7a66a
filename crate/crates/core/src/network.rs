//! Communication topology between players.
//!
//! `adjacency[(i, j)] = a_ij` is the weight player `i` places on information
//! received from player `j`. Undirected graphs store symmetric weights. The
//! consensus estimator only ever reads the precomputed in-neighbor lists, so
//! graph construction is the single place where topology errors can surface.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CommGraph {
    n: usize,
    directed: bool,
    adjacency: DMatrix<f64>,
    /// Per receiver `i`: list of `(j, a_ij)` with `a_ij > 0`.
    in_neighbors: Vec<Vec<(usize, f64)>>,
}

impl CommGraph {
    /// Builds a graph over `n` nodes from 0-based `(from, to, weight)` edges.
    ///
    /// An edge means information flows `from → to`, i.e. it sets
    /// `a[to][from] = weight`; undirected graphs set both directions.
    pub fn new(n: usize, edges: &[(usize, usize, f64)], directed: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("graph.n", "graph needs at least one node"));
        }
        let mut adjacency = DMatrix::zeros(n, n);
        for (idx, &(from, to, weight)) in edges.iter().enumerate() {
            let key = format!("graph.edges.{idx}");
            if from >= n || to >= n {
                return Err(Error::config(
                    key,
                    format!("edge ({from}, {to}) references a node outside 0..{n}"),
                ));
            }
            if from == to {
                return Err(Error::config(
                    key,
                    format!("self-loop on node {from} is not allowed"),
                ));
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::config(
                    key,
                    format!("edge ({from}, {to}) has non-positive weight {weight}"),
                ));
            }
            if adjacency[(to, from)] != 0.0 {
                return Err(Error::config(
                    key,
                    format!("edge ({from}, {to}) specified more than once"),
                ));
            }
            adjacency[(to, from)] = weight;
            if !directed {
                adjacency[(from, to)] = weight;
            }
        }
        let in_neighbors = (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| adjacency[(i, j)] > 0.0)
                    .map(|j| (j, adjacency[(i, j)]))
                    .collect()
            })
            .collect();
        Ok(CommGraph {
            n,
            directed,
            adjacency,
            in_neighbors,
        })
    }

    /// Undirected unit-weight ring 0‑1‑…‑(n−1)‑0.
    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::config("graph.n", "a cycle needs at least 3 nodes"));
        }
        let edges: Vec<(usize, usize, f64)> = (0..n).map(|i| (i, (i + 1) % n, 1.0)).collect();
        Self::new(n, &edges, false)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn adjacency(&self) -> &DMatrix<f64> {
        &self.adjacency
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.adjacency[(i, j)]
    }

    /// In-neighbors of `i` with their weights, ready for the consensus sums.
    pub fn in_neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.in_neighbors[i]
    }

    /// Graph Laplacian L = D − A with in-degree D. Off-diagonals are −a_ij,
    /// the diagonal carries the row sums, so each row sums to zero.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut lap = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let mut degree = 0.0;
            for j in 0..self.n {
                if i != j {
                    let a = self.adjacency[(i, j)];
                    lap[(i, j)] = -a;
                    degree += a;
                }
            }
            lap[(i, i)] = degree;
        }
        lap
    }

    /// Undirected: one traversal covers every node. Directed: strong
    /// connectivity, checked as node 0 reaching all nodes along information
    /// flow and being reachable from all nodes.
    pub fn is_connected(&self) -> bool {
        if self.n == 1 {
            return true;
        }
        // a[i][j] > 0 means j → i carries information, so rows list in-edges
        // and columns list out-edges.
        let reaches_all_in = self.reachable(|i, j| self.adjacency[(i, j)] > 0.0);
        if !self.directed {
            return reaches_all_in;
        }
        let reaches_all_out = self.reachable(|i, j| self.adjacency[(j, i)] > 0.0);
        reaches_all_in && reaches_all_out
    }

    fn reachable(&self, step: impl Fn(usize, usize) -> bool) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for j in 0..self.n {
                if !seen[j] && step(i, j) {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.n
    }

    /// Consensus coupling matrix for the stacked estimation error.
    ///
    /// The stacked error orders entries (observer i, target j, component c)
    /// as `i·D + offset(j) + c` with `D = Σ dims`. The matrix is
    /// `L ⊗ I_D` plus the diagonal of observation weights `a_ij`, and its
    /// smallest eigenvalue (of the symmetric part) is returned alongside.
    /// Positive λ_min certifies exponential consensus of the estimator.
    pub fn coupling_matrix(&self, dims: &[usize]) -> Result<(DMatrix<f64>, f64)> {
        if dims.len() != self.n {
            return Err(Error::Dimension {
                context: "coupling_matrix dims".into(),
                expected: self.n,
                actual: dims.len(),
            });
        }
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let total: usize = dims.iter().sum();
        let mut offsets = Vec::with_capacity(self.n);
        let mut acc = 0;
        for &d in dims {
            offsets.push(acc);
            acc += d;
        }
        let size = self.n * total;
        let lap = self.laplacian();
        let mut m = DMatrix::zeros(size, size);
        for i in 0..self.n {
            for k in 0..self.n {
                let l = lap[(i, k)];
                if l != 0.0 {
                    for t in 0..total {
                        m[(i * total + t, k * total + t)] += l;
                    }
                }
            }
            for j in 0..self.n {
                let a = self.adjacency[(i, j)];
                if a != 0.0 {
                    for c in 0..dims[j] {
                        let idx = i * total + offsets[j] + c;
                        m[(idx, idx)] += a;
                    }
                }
            }
        }
        let sym = (&m + m.transpose()) * 0.5;
        let lambda_min = sym
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        Ok((m, lambda_min))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_laplacian_matches_hand_expansion() {
        let g = CommGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)], false).unwrap();
        let lap = g.laplacian();
        let expected = [
            [1.0, -1.0, 0.0],
            [-1.0, 2.0, -1.0],
            [0.0, -1.0, 1.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(lap[(i, j)], expected[i][j]);
            }
        }
    }

    #[test]
    fn laplacian_rows_sum_to_zero_on_weighted_graph() {
        let g = CommGraph::new(
            4,
            &[(0, 1, 0.3), (1, 2, 2.5), (2, 3, 1.25), (3, 0, 4.0)],
            false,
        )
        .unwrap();
        let lap = g.laplacian();
        for i in 0..4 {
            let sum: f64 = (0..4).map(|j| lap[(i, j)]).sum();
            assert!(sum.abs() < 1e-12, "row {i} sums to {sum}");
        }
    }

    #[test]
    fn connectivity_detection() {
        let connected = CommGraph::cycle(7).unwrap();
        assert!(connected.is_connected());

        let split = CommGraph::new(4, &[(0, 1, 1.0), (2, 3, 1.0)], false).unwrap();
        assert!(!split.is_connected());

        // A one-way chain is weakly but not strongly connected.
        let chain = CommGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0)], true).unwrap();
        assert!(!chain.is_connected());

        let ring = CommGraph::new(3, &[(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], true).unwrap();
        assert!(ring.is_connected());
    }

    #[test]
    fn construction_rejects_bad_edges() {
        assert!(matches!(
            CommGraph::new(3, &[(0, 0, 1.0)], false),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            CommGraph::new(3, &[(0, 5, 1.0)], false),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            CommGraph::new(3, &[(0, 1, -2.0)], false),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            CommGraph::new(3, &[(0, 1, 1.0), (0, 1, 2.0)], false),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn two_node_coupling_matrix_eigenvalue() {
        // Single edge, scalar actions. The stacked error splits by target
        // into L + diag(a_·j), each block [[1,-1],[-1,2]] up to permutation,
        // so λ_min = (3 − √5)/2.
        let g = CommGraph::new(2, &[(0, 1, 1.0)], false).unwrap();
        let (m, lambda_min) = g.coupling_matrix(&[1, 1]).unwrap();
        assert_eq!(m.nrows(), 4);
        let expected = (3.0 - 5.0_f64.sqrt()) / 2.0;
        assert!(
            (lambda_min - expected).abs() < 1e-12,
            "λ_min = {lambda_min}, expected {expected}"
        );
    }

    #[test]
    fn default_ring_coupling_is_positive_definite() {
        let g = CommGraph::cycle(7).unwrap();
        let dims = [2usize; 7];
        let (m, lambda_min) = g.coupling_matrix(&dims).unwrap();
        assert_eq!(m.nrows(), 7 * 14);
        assert!(lambda_min > 0.0, "λ_min = {lambda_min}");
    }

    #[test]
    fn coupling_matrix_requires_connectivity() {
        let split = CommGraph::new(4, &[(0, 1, 1.0), (2, 3, 1.0)], false).unwrap();
        assert!(matches!(
            split.coupling_matrix(&[1, 1, 1, 1]),
            Err(Error::Disconnected)
        ));
    }

    #[test]
    fn algebraic_connectivity_positive_iff_connected() {
        let second_smallest = |g: &CommGraph| {
            let mut eigs: Vec<f64> = g
                .laplacian()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .collect();
            eigs.sort_by(f64::total_cmp);
            eigs[1]
        };
        let ring = CommGraph::cycle(5).unwrap();
        assert!(second_smallest(&ring) > 1e-9);
        let split = CommGraph::new(4, &[(0, 1, 1.0), (2, 3, 1.0)], false).unwrap();
        assert!(second_smallest(&split).abs() < 1e-12);
    }
}
