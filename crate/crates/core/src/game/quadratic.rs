//! Declarative quadratic games.
//!
//! Player `i` minimizes
//!
//! ```text
//! f_i(x) = x_iᵀ M_i x_i + x_iᵀ m_i + c_i + Σ_{(i,j) ∈ couplings} ‖x_i − x_j‖²
//! ```
//!
//! over its own action `x_i`. Every coupling term is owned by exactly one
//! player (the pair is ordered), so heterogeneous interaction patterns are
//! expressed by listing pairs. The pseudo-gradient of such a game is affine,
//! `P(x) = Qx + c`, which enables exact equilibrium solves and exact
//! monotonicity/Lipschitz constants.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticGame {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
    self_matrices: Vec<DMatrix<f64>>,
    linear_terms: Vec<DVector<f64>>,
    constants: Vec<f64>,
    couplings: Vec<(usize, usize)>,
}

impl QuadraticGame {
    pub fn new(
        self_matrices: Vec<DMatrix<f64>>,
        linear_terms: Vec<DVector<f64>>,
        constants: Vec<f64>,
        couplings: Vec<(usize, usize)>,
    ) -> Result<Self> {
        let n = self_matrices.len();
        if n == 0 {
            return Err(Error::config("game.players", "game needs at least one player"));
        }
        if linear_terms.len() != n || constants.len() != n {
            return Err(Error::config(
                "game.players",
                "self_matrix, linear and offset lists must have one entry per player",
            ));
        }
        let mut dims = Vec::with_capacity(n);
        for (i, m) in self_matrices.iter().enumerate() {
            if m.nrows() == 0 || m.nrows() != m.ncols() {
                return Err(Error::config(
                    format!("game.players.{}.self_matrix", i + 1),
                    format!("must be square and non-empty, got {}x{}", m.nrows(), m.ncols()),
                ));
            }
            if m.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(
                    format!("game.players.{}.self_matrix", i + 1),
                    "entries must be finite",
                ));
            }
            if linear_terms[i].len() != m.nrows() {
                return Err(Error::config(
                    format!("game.players.{}.linear", i + 1),
                    format!("expected {} entries, got {}", m.nrows(), linear_terms[i].len()),
                ));
            }
            if linear_terms[i].iter().any(|v| !v.is_finite()) || !constants[i].is_finite() {
                return Err(Error::config(
                    format!("game.players.{}", i + 1),
                    "linear term and offset must be finite",
                ));
            }
            dims.push(m.nrows());
        }
        for (idx, &(a, b)) in couplings.iter().enumerate() {
            let key = format!("game.couplings.{idx}");
            if a >= n || b >= n {
                return Err(Error::config(
                    key,
                    format!("coupling ({a}, {b}) references a player outside the game"),
                ));
            }
            if a == b {
                return Err(Error::config(key, "coupling must join two distinct players"));
            }
            if dims[a] != dims[b] {
                return Err(Error::config(
                    key,
                    format!(
                        "coupled players have different action dimensions ({} vs {})",
                        dims[a], dims[b]
                    ),
                ));
            }
        }
        let mut offsets = Vec::with_capacity(n);
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        Ok(QuadraticGame {
            dims,
            offsets,
            total: acc,
            self_matrices,
            linear_terms,
            constants,
            couplings,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn objective(&self, player: usize, x: &[f64]) -> f64 {
        let xi = &x[self.offsets[player]..self.offsets[player] + self.dims[player]];
        let m = &self.self_matrices[player];
        let mut value = self.constants[player];
        for r in 0..self.dims[player] {
            value += xi[r] * self.linear_terms[player][r];
            for c in 0..self.dims[player] {
                value += xi[r] * m[(r, c)] * xi[c];
            }
        }
        for &(owner, other) in &self.couplings {
            if owner == player {
                let xo = &x[self.offsets[other]..self.offsets[other] + self.dims[other]];
                value += xi
                    .iter()
                    .zip(xo)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>();
            }
        }
        value
    }

    /// ∂f_i/∂x_i = (M_i + M_iᵀ) x_i + m_i + Σ 2 (x_i − x_j).
    pub fn partial_gradient_into(&self, player: usize, x: &[f64], out: &mut [f64]) {
        let d = self.dims[player];
        let off = self.offsets[player];
        let xi = &x[off..off + d];
        let m = &self.self_matrices[player];
        for r in 0..d {
            let mut g = self.linear_terms[player][r];
            for c in 0..d {
                g += (m[(r, c)] + m[(c, r)]) * xi[c];
            }
            out[r] = g;
        }
        for &(owner, other) in &self.couplings {
            if owner == player {
                let xo = &x[self.offsets[other]..self.offsets[other] + d];
                for r in 0..d {
                    out[r] += 2.0 * (xi[r] - xo[r]);
                }
            }
        }
    }

    /// P(x) = Qx + c in stacked coordinates.
    pub fn affine_parts(&self) -> (DMatrix<f64>, DVector<f64>) {
        let mut q = DMatrix::zeros(self.total, self.total);
        let mut lin = DVector::zeros(self.total);
        for i in 0..self.dims.len() {
            let d = self.dims[i];
            let off = self.offsets[i];
            let m = &self.self_matrices[i];
            for r in 0..d {
                lin[off + r] = self.linear_terms[i][r];
                for c in 0..d {
                    q[(off + r, off + c)] += m[(r, c)] + m[(c, r)];
                }
            }
        }
        for &(owner, other) in &self.couplings {
            let d = self.dims[owner];
            for r in 0..d {
                q[(self.offsets[owner] + r, self.offsets[owner] + r)] += 2.0;
                q[(self.offsets[owner] + r, self.offsets[other] + r)] -= 2.0;
            }
        }
        (q, lin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(d: f64, e: f64) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(vec![d, e]))
    }

    #[test]
    fn affine_parts_reproduce_gradient() {
        let game = QuadraticGame::new(
            vec![two_by_two(2.0, 1.0), two_by_two(4.0, 2.0)],
            vec![
                DVector::from_vec(vec![1.0, 2.0]),
                DVector::from_vec(vec![2.0, 4.0]),
            ],
            vec![1.0, 4.0],
            vec![(0, 1)],
        )
        .unwrap();
        let (q, c) = game.affine_parts();
        let x = [0.5, -1.5, 2.0, 0.25];
        let mut grad = vec![0.0; 4];
        game.partial_gradient_into(0, &x, &mut grad[0..2]);
        let mut tail = [0.0, 0.0];
        game.partial_gradient_into(1, &x, &mut tail);
        grad[2..4].copy_from_slice(&tail);
        let xv = DVector::from_column_slice(&x);
        let affine = &q * xv + c;
        for k in 0..4 {
            assert!((grad[k] - affine[k]).abs() < 1e-12);
        }
    }

    #[test]
    fn validation_rejects_malformed_games() {
        let ok_m = vec![two_by_two(1.0, 1.0)];
        let ok_l = vec![DVector::from_vec(vec![0.0, 0.0])];

        assert!(matches!(
            QuadraticGame::new(vec![], vec![], vec![], vec![]),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            QuadraticGame::new(
                ok_m.clone(),
                vec![DVector::from_vec(vec![0.0])],
                vec![0.0],
                vec![]
            ),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            QuadraticGame::new(ok_m.clone(), ok_l.clone(), vec![0.0], vec![(0, 0)]),
            Err(Error::Config { .. })
        ));
        assert!(matches!(
            QuadraticGame::new(ok_m, ok_l, vec![0.0], vec![(0, 3)]),
            Err(Error::Config { .. })
        ));
    }
}
