//! Leader-following consensus estimator: the optimization module each player
//! runs to generate its reference signal.
//!
//! Player `i` keeps `z_i`, a full copy of the action profile as it believes
//! it to be, and integrates its own partial gradient on that belief:
//!
//! ```text
//! ẏ_i     = −∇_i f_i(z_i)
//! ż_ijc   = −δ_ij · ( Σ_k a_ik (z_ijc − z_kjc) + a_ij (z_ijc − y_jc) )
//! ```
//!
//! Only neighbors of `j` observe `y_j` directly (through the `a_ij` anchor
//! term); everyone else inherits it through consensus. Gains are either fixed
//! (`δ · δ̄_ij`) or adaptive, where each gain integrates its own squared
//! consensus error and therefore never decreases.
//!
//! Stacked orderings: `y` is player-major (`offset(j) + c`), `z` and the
//! per-component gains are observer-major (`i·D + offset(j) + c` with
//! `D = Σ dims`), per-channel gains are `i·N + j`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::game::GameDefinition;
use crate::network::CommGraph;

/// How adaptive gains index the (observer, target, component) space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GainIndexing {
    /// One gain per (i, j, component); δ̇ is that component's squared error.
    #[default]
    PerComponent,
    /// One gain per (i, j); δ̇ sums squared errors over the components.
    PerChannel,
}

impl GainIndexing {
    pub fn gain_count(self, n: usize, total_dim: usize) -> usize {
        match self {
            GainIndexing::PerComponent => n * total_dim,
            GainIndexing::PerChannel => n * n,
        }
    }
}

/// Fixed-mode gain table: effective gain is `delta * delta_bar[(i, j)]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FixedGains {
    pub delta: f64,
    /// Per-(observer, target) scale factors, defaulting to all ones.
    pub delta_bar: DMatrix<f64>,
}

impl FixedGains {
    pub fn uniform(n: usize, delta: f64) -> Self {
        FixedGains {
            delta,
            delta_bar: DMatrix::from_element(n, n, 1.0),
        }
    }
}

/// Gain source for one derivative evaluation.
#[derive(Clone, Copy, Debug)]
pub enum EstimatorGains<'a> {
    Fixed(&'a FixedGains),
    Adaptive {
        indexing: GainIndexing,
        delta: &'a [f64],
    },
}

/// Owned estimator state, convenient for tests and standalone use. Inside the
/// closed-loop engine the same data lives in slices of the flat state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorState {
    pub y: Vec<f64>,
    pub z: Vec<f64>,
    /// Empty in fixed mode; sized by [`GainIndexing::gain_count`] in adaptive
    /// mode.
    pub delta: Vec<f64>,
}

impl EstimatorState {
    /// All-zero initialization: references and beliefs start at the origin,
    /// adaptive gains start disengaged.
    pub fn zeros(game: &GameDefinition, adaptive: Option<GainIndexing>) -> Self {
        let total = game.total_dim();
        let n = game.n_players();
        EstimatorState {
            y: vec![0.0; total],
            z: vec![0.0; n * total],
            delta: adaptive.map_or_else(Vec::new, |ix| vec![0.0; ix.gain_count(n, total)]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorDerivs {
    pub dy: Vec<f64>,
    pub dz: Vec<f64>,
    pub ddelta: Vec<f64>,
}

/// Derivative evaluation writing into caller-provided slices.
///
/// `ddelta` must be `Some` exactly when `gains` is adaptive. No allocation;
/// safe to call from the integrator's hot loop.
pub fn rhs_into(
    game: &GameDefinition,
    graph: &CommGraph,
    y: &[f64],
    z: &[f64],
    gains: EstimatorGains,
    dy: &mut [f64],
    dz: &mut [f64],
    mut ddelta: Option<&mut [f64]>,
) {
    let n = game.n_players();
    let total = game.total_dim();
    debug_assert_eq!(y.len(), total);
    debug_assert_eq!(z.len(), n * total);
    debug_assert_eq!(dy.len(), total);
    debug_assert_eq!(dz.len(), n * total);

    for i in 0..n {
        let belief = &z[i * total..(i + 1) * total];
        let off = game.offset(i);
        let d = game.dim(i);
        game.partial_gradient_into(i, belief, &mut dy[off..off + d]);
        for v in dy[off..off + d].iter_mut() {
            *v = -*v;
        }
    }

    for i in 0..n {
        let row = i * total;
        for j in 0..n {
            let off = game.offset(j);
            let a_ij = graph.weight(i, j);
            for c in 0..game.dim(j) {
                let idx = off + c;
                let own = z[row + idx];
                let mut err = 0.0;
                for &(k, a_ik) in graph.in_neighbors(i) {
                    err += a_ik * (own - z[k * total + idx]);
                }
                err += a_ij * (own - y[idx]);
                let gain = match gains {
                    EstimatorGains::Fixed(f) => f.delta * f.delta_bar[(i, j)],
                    EstimatorGains::Adaptive { indexing, delta } => match indexing {
                        GainIndexing::PerComponent => delta[row + idx],
                        GainIndexing::PerChannel => delta[i * n + j],
                    },
                };
                dz[row + idx] = -gain * err;
                if let Some(dd) = ddelta.as_deref_mut() {
                    match gains {
                        EstimatorGains::Adaptive {
                            indexing: GainIndexing::PerComponent,
                            ..
                        } => dd[row + idx] = err * err,
                        EstimatorGains::Adaptive {
                            indexing: GainIndexing::PerChannel,
                            ..
                        } => {
                            if c == 0 {
                                dd[i * n + j] = 0.0;
                            }
                            dd[i * n + j] += err * err;
                        }
                        EstimatorGains::Fixed(_) => {}
                    }
                }
            }
        }
    }
}

/// Owned-state convenience wrapper around [`rhs_into`].
pub fn estimator_rhs(
    game: &GameDefinition,
    graph: &CommGraph,
    state: &EstimatorState,
    gains: EstimatorGains,
) -> EstimatorDerivs {
    let mut derivs = EstimatorDerivs {
        dy: vec![0.0; state.y.len()],
        dz: vec![0.0; state.z.len()],
        ddelta: vec![0.0; state.delta.len()],
    };
    let adaptive = matches!(gains, EstimatorGains::Adaptive { .. });
    rhs_into(
        game,
        graph,
        &state.y,
        &state.z,
        gains,
        &mut derivs.dy,
        &mut derivs.dz,
        adaptive.then_some(&mut derivs.ddelta[..]),
    );
    derivs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{connectivity_game, GameDefinition, Gradient, Objective};
    use proptest::prelude::*;
    use std::sync::Arc;

    fn scalar_pair_game() -> GameDefinition {
        let f1: Objective = Arc::new(|x: &[f64]| x[0] * x[0]);
        let f2: Objective = Arc::new(|x: &[f64]| x[1] * x[1]);
        let g1: Gradient = Arc::new(|x: &[f64], out: &mut [f64]| out[0] = 2.0 * x[0]);
        let g2: Gradient = Arc::new(|x: &[f64], out: &mut [f64]| out[0] = 2.0 * x[1]);
        GameDefinition::new(vec![1, 1], vec![f1, f2], vec![g1, g2]).unwrap()
    }

    #[test]
    fn belief_pull_matches_hand_expansion() {
        // Two scalar players, one edge. With z_11 = 1, z_21 = 0, y_1 = 0 and
        // gain 2 on the (2,1) channel: ż_21 = −2·((0−1) + 1·(0−0)) = 2.
        let game = scalar_pair_game();
        let graph = CommGraph::new(2, &[(0, 1, 1.0)], false).unwrap();
        let mut state = EstimatorState::zeros(&game, None);
        state.z[0] = 1.0; // z_11
        let mut fixed = FixedGains::uniform(2, 1.0);
        fixed.delta_bar[(1, 0)] = 2.0;
        let derivs = estimator_rhs(&game, &graph, &state, EstimatorGains::Fixed(&fixed));
        assert_eq!(derivs.dz[2], 2.0); // (i, j) = (2, 1) row-major
    }

    #[test]
    fn consensus_on_equilibrium_is_a_fixed_point() {
        let game = connectivity_game();
        let graph = CommGraph::cycle(7).unwrap();
        let ne = game.analytic_ne().unwrap().to_vec();
        let mut state = EstimatorState::zeros(&game, None);
        state.y.copy_from_slice(&ne);
        for i in 0..7 {
            state.z[i * 14..(i + 1) * 14].copy_from_slice(&ne);
        }
        let fixed = FixedGains::uniform(7, 10.0);
        let derivs = estimator_rhs(&game, &graph, &state, EstimatorGains::Fixed(&fixed));
        assert!(derivs.dy.iter().all(|v| v.abs() < 1e-12));
        assert!(derivs.dz.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn consensus_off_equilibrium_freezes_beliefs_only() {
        // All beliefs agreeing with all references kills ż regardless of the
        // profile; ẏ then follows the true gradient at that profile.
        let game = connectivity_game();
        let graph = CommGraph::cycle(7).unwrap();
        let profile = vec![0.5; 14];
        let mut state = EstimatorState::zeros(&game, None);
        state.y.copy_from_slice(&profile);
        for i in 0..7 {
            state.z[i * 14..(i + 1) * 14].copy_from_slice(&profile);
        }
        let fixed = FixedGains::uniform(7, 10.0);
        let derivs = estimator_rhs(&game, &graph, &state, EstimatorGains::Fixed(&fixed));
        assert!(derivs.dz.iter().all(|v| *v == 0.0));
        let expected = game.pseudo_gradient(&profile);
        for (dyv, g) in derivs.dy.iter().zip(&expected) {
            assert!((dyv + g).abs() < 1e-12);
        }
    }

    #[test]
    fn adaptive_gains_rise_with_squared_error() {
        let game = scalar_pair_game();
        let graph = CommGraph::new(2, &[(0, 1, 1.0)], false).unwrap();
        let mut state = EstimatorState::zeros(&game, Some(GainIndexing::PerComponent));
        state.z[0] = 1.0;
        let derivs = estimator_rhs(
            &game,
            &graph,
            &state,
            EstimatorGains::Adaptive {
                indexing: GainIndexing::PerComponent,
                delta: &state.delta,
            },
        );
        // Error on (2,1) is −1, so its gain integrates 1; gains start at 0 so
        // every belief derivative is still frozen.
        assert_eq!(derivs.ddelta[2], 1.0);
        assert!(derivs.dz.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn per_channel_indexing_sums_component_errors() {
        let game = connectivity_game();
        let graph = CommGraph::cycle(7).unwrap();
        let mut state = EstimatorState::zeros(&game, Some(GainIndexing::PerChannel));
        for (k, v) in state.z.iter_mut().enumerate() {
            *v = (k % 5) as f64 - 2.0;
        }
        let per_channel = estimator_rhs(
            &game,
            &graph,
            &state,
            EstimatorGains::Adaptive {
                indexing: GainIndexing::PerChannel,
                delta: &state.delta,
            },
        );
        let mut per_component_state = state.clone();
        per_component_state.delta = vec![0.0; GainIndexing::PerComponent.gain_count(7, 14)];
        let per_component = estimator_rhs(
            &game,
            &graph,
            &per_component_state,
            EstimatorGains::Adaptive {
                indexing: GainIndexing::PerComponent,
                delta: &per_component_state.delta,
            },
        );
        for i in 0..7 {
            for j in 0..7 {
                let summed: f64 = (0..2).map(|c| per_component.ddelta[i * 14 + j * 2 + c]).sum();
                let direct = per_channel.ddelta[i * 7 + j];
                assert!((summed - direct).abs() < 1e-12);
            }
        }
    }

    proptest! {
        /// Adaptive gain derivatives are squared errors, never negative.
        #[test]
        fn adaptive_gain_derivatives_nonnegative(
            seed in proptest::collection::vec(-50.0f64..50.0, 2 * 2 + 2 + 4)
        ) {
            let game = scalar_pair_game();
            let graph = CommGraph::new(2, &[(0, 1, 1.0)], false).unwrap();
            let state = EstimatorState {
                y: seed[0..2].to_vec(),
                z: seed[2..6].to_vec(),
                delta: seed[6..10].iter().map(|v| v.abs()).collect(),
            };
            let derivs = estimator_rhs(
                &game,
                &graph,
                &state,
                EstimatorGains::Adaptive {
                    indexing: GainIndexing::PerComponent,
                    delta: &state.delta,
                },
            );
            prop_assert!(derivs.ddelta.iter().all(|v| *v >= 0.0));
        }
    }
}
