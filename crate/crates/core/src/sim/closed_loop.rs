//! Wiring of estimator, regulators, and plants into one autonomous system.
//!
//! The information firewall is structural: regulator laws receive the
//! regulation error, the reference derivative, and regressor values, never
//! the plant's hidden gain or parameter vector. Plants in turn never see
//! regulator internals, only the control produced this evaluation.

use crate::error::{Error, Result};
use crate::estimator::{self, EstimatorGains, FixedGains, GainIndexing};
use crate::game::GameDefinition;
use crate::network::CommGraph;
use crate::plants::{Plant, PlantKind};
use crate::regulators::{
    backstepping_control, first_order_control, first_order_control_no_uncertainty,
    second_order_control, BacksteppingState, Nussbaum, RegulatorFamily,
};
use crate::sim::layout::{PlayerShape, StateLayout};

/// One player's regulation stack: the law it runs and the plant it drives.
#[derive(Clone, Debug)]
pub struct PlayerSim {
    pub family: RegulatorFamily,
    pub plant: Plant,
}

/// Consensus-gain policy for the whole run.
#[derive(Clone, Debug)]
pub enum EstimatorMode {
    Fixed(FixedGains),
    Adaptive(GainIndexing),
}

/// The full simulated system. `players` may be empty, which runs the
/// reference-generation layer on its own.
#[derive(Clone, Debug)]
pub struct ClosedLoop {
    game: GameDefinition,
    graph: CommGraph,
    players: Vec<PlayerSim>,
    mode: EstimatorMode,
    nussbaum: Nussbaum,
    layout: StateLayout,
}

impl ClosedLoop {
    pub fn new(
        game: GameDefinition,
        graph: CommGraph,
        players: Vec<PlayerSim>,
        mode: EstimatorMode,
        nussbaum: Nussbaum,
    ) -> Result<Self> {
        let n = game.n_players();
        if graph.n() != n {
            return Err(Error::Dimension {
                context: "graph size vs player count".into(),
                expected: n,
                actual: graph.n(),
            });
        }
        if !players.is_empty() && players.len() != n {
            return Err(Error::Dimension {
                context: "player stacks".into(),
                expected: n,
                actual: players.len(),
            });
        }
        for (i, p) in players.iter().enumerate() {
            if p.plant.dim() != game.dim(i) {
                return Err(Error::Dimension {
                    context: format!("player {} action dimension", i + 1),
                    expected: game.dim(i),
                    actual: p.plant.dim(),
                });
            }
            let compatible = matches!(
                (p.family, p.plant.kind()),
                (RegulatorFamily::FirstOrder, PlantKind::FirstOrder)
                    | (RegulatorFamily::FirstOrderNoUncertainty, PlantKind::FirstOrder)
                    | (RegulatorFamily::SecondOrder, PlantKind::SecondOrderChain)
                    | (RegulatorFamily::Backstepping, PlantKind::GeneralSecondOrder)
            );
            if !compatible {
                return Err(Error::config(
                    format!("players.{}.controller", i + 1),
                    format!(
                        "{:?} regulator cannot drive a {:?} plant",
                        p.family,
                        p.plant.kind()
                    ),
                ));
            }
        }
        if let EstimatorMode::Fixed(gains) = &mode {
            if !(gains.delta.is_finite() && gains.delta > 0.0) {
                return Err(Error::config(
                    "estimator.delta",
                    format!("must be a positive finite number, got {}", gains.delta),
                ));
            }
            if gains.delta_bar.nrows() != n || gains.delta_bar.ncols() != n {
                return Err(Error::Dimension {
                    context: "estimator gain table".into(),
                    expected: n * n,
                    actual: gains.delta_bar.len(),
                });
            }
            if gains.delta_bar.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(Error::config(
                    "estimator.delta_bar",
                    "every pair scale must be positive and finite",
                ));
            }
        }
        let shapes: Vec<PlayerShape> = players
            .iter()
            .map(|p| PlayerShape {
                dim: p.plant.dim(),
                has_velocity: p.plant.kind().has_velocity(),
                reg_states_per_channel: p.family.states_per_channel(),
            })
            .collect();
        let adaptive_gains = match &mode {
            EstimatorMode::Fixed(_) => None,
            EstimatorMode::Adaptive(ix) => Some(ix.gain_count(n, game.total_dim())),
        };
        let layout = StateLayout::new(&shapes, n, game.total_dim(), adaptive_gains);
        Ok(ClosedLoop {
            game,
            graph,
            players,
            mode,
            nussbaum,
            layout,
        })
    }

    pub fn game(&self) -> &GameDefinition {
        &self.game
    }

    pub fn graph(&self) -> &CommGraph {
        &self.graph
    }

    pub fn players(&self) -> &[PlayerSim] {
        &self.players
    }

    pub fn mode(&self) -> &EstimatorMode {
        &self.mode
    }

    pub fn nussbaum(&self) -> Nussbaum {
        self.nussbaum
    }

    pub fn layout(&self) -> &StateLayout {
        &self.layout
    }

    pub fn workspace(&self) -> EvalWorkspace {
        let total = self.game.total_dim();
        let channels = if self.players.is_empty() { 0 } else { total };
        let max_dim = self.game.dims().iter().copied().max().unwrap_or(0);
        EvalWorkspace {
            u: vec![0.0; channels],
            k_dot: vec![0.0; channels],
            reg_error: vec![0.0; channels],
            ydot: vec![0.0; total],
            ydot_norm_sq: 0.0,
            dx: vec![0.0; max_dim],
            dv: vec![0.0; max_dim],
        }
    }

    /// Evaluate the full right-hand side at `state` into `deriv`, refreshing
    /// the workspace diagnostics as a side effect. Evaluation order: the
    /// reference layer first (its output feeds the regulators), then per
    /// player the regulator law followed by the plant it drives.
    pub fn eval_into(&self, state: &[f64], deriv: &mut [f64], ws: &mut EvalWorkspace) {
        let layout = &self.layout;
        debug_assert_eq!(state.len(), layout.total_len());
        debug_assert_eq!(deriv.len(), layout.total_len());
        let total = self.game.total_dim();
        let n = self.game.n_players();
        let y_range = layout.y_range();

        {
            let y = &state[y_range.clone()];
            let z = &state[layout.z_range()];
            let (_, est) = deriv.split_at_mut(y_range.start);
            let (dy, rest) = est.split_at_mut(total);
            let (dz, dd) = rest.split_at_mut(n * total);
            match &self.mode {
                EstimatorMode::Fixed(gains) => {
                    estimator::rhs_into(
                        &self.game,
                        &self.graph,
                        y,
                        z,
                        EstimatorGains::Fixed(gains),
                        dy,
                        dz,
                        None,
                    );
                }
                EstimatorMode::Adaptive(indexing) => {
                    let delta = &state[layout.delta_range().expect("adaptive layout")];
                    estimator::rhs_into(
                        &self.game,
                        &self.graph,
                        y,
                        z,
                        EstimatorGains::Adaptive {
                            indexing: *indexing,
                            delta,
                        },
                        dy,
                        dz,
                        Some(dd),
                    );
                }
            }
        }
        ws.ydot.copy_from_slice(&deriv[y_range.clone()]);
        ws.ydot_norm_sq = ws.ydot.iter().map(|v| v * v).sum();

        for (i, p) in self.players.iter().enumerate() {
            let d = p.plant.dim();
            let off = self.game.offset(i);
            let x_range = layout.x_range(i);
            let v_range = layout.v_range(i);
            let x = &state[x_range.clone()];
            let v = v_range.clone().map(|r| &state[r]);

            for c in 0..d {
                let reg = layout.reg_channel_range(i, c);
                let x_c = x[c];
                let y_c = state[y_range.start + off + c];
                let ydot_c = ws.ydot[off + c];
                let ch = off + c;
                ws.reg_error[ch] = x_c - y_c;
                match p.family {
                    RegulatorFamily::FirstOrder => {
                        let phi = p.plant.phi1().value(x, v, c);
                        let out = first_order_control(
                            self.nussbaum,
                            x_c,
                            y_c,
                            ydot_c,
                            state[reg.start],
                            state[reg.start + 1],
                            phi,
                        );
                        deriv[reg.start] = out.k_dot;
                        deriv[reg.start + 1] = out.theta_hat_dot;
                        ws.u[ch] = out.u;
                        ws.k_dot[ch] = out.k_dot;
                    }
                    RegulatorFamily::FirstOrderNoUncertainty => {
                        let out = first_order_control_no_uncertainty(
                            self.nussbaum,
                            x_c,
                            y_c,
                            state[reg.start],
                        );
                        deriv[reg.start] = out.k_dot;
                        ws.u[ch] = out.u;
                        ws.k_dot[ch] = out.k_dot;
                    }
                    RegulatorFamily::SecondOrder => {
                        let v_c = v.expect("chain plant has velocity")[c];
                        let phi = p.plant.phi1().value(x, v, c);
                        let out = second_order_control(
                            self.nussbaum,
                            x_c,
                            y_c,
                            v_c,
                            ydot_c,
                            v_c,
                            state[reg.start],
                            state[reg.start + 1],
                            phi,
                        );
                        deriv[reg.start] = out.k_dot;
                        deriv[reg.start + 1] = out.theta_hat_dot;
                        ws.u[ch] = out.u;
                        ws.k_dot[ch] = out.k_dot;
                    }
                    RegulatorFamily::Backstepping => {
                        let v_slice = v.expect("general plant has velocity");
                        let v_c = v_slice[c];
                        let phi1 = p.plant.phi1().value(x, v, c);
                        let dphi1 = p.plant.phi1().dx(x, v, c);
                        let phi2 = p
                            .plant
                            .phi2()
                            .expect("general plant has a second regressor")
                            .value(x, v, c);
                        let s = BacksteppingState {
                            k1: state[reg.start],
                            theta_hat1: state[reg.start + 1],
                            k2: state[reg.start + 2],
                            theta_bar1: state[reg.start + 3],
                            theta_bar2: state[reg.start + 4],
                            b_bar1: state[reg.start + 5],
                        };
                        let out = backstepping_control(
                            self.nussbaum,
                            x_c,
                            y_c,
                            ydot_c,
                            v_c,
                            &s,
                            phi1,
                            dphi1,
                            phi2,
                        );
                        deriv[reg.start] = out.k1_dot;
                        deriv[reg.start + 1] = out.theta_hat1_dot;
                        deriv[reg.start + 2] = out.k2_dot;
                        deriv[reg.start + 3] = out.theta_bar1_dot;
                        deriv[reg.start + 4] = out.theta_bar2_dot;
                        deriv[reg.start + 5] = out.b_bar1_dot;
                        ws.u[ch] = out.u;
                        ws.k_dot[ch] = out.k1_dot;
                    }
                }
            }

            p.plant.rhs_into(
                x,
                v,
                &ws.u[off..off + d],
                &mut ws.dx[..d],
                v_range.as_ref().map(|_| &mut ws.dv[..d]),
            );
            deriv[x_range].copy_from_slice(&ws.dx[..d]);
            if let Some(r) = v_range {
                deriv[r].copy_from_slice(&ws.dv[..d]);
            }
        }
    }
}

/// Reusable buffers plus per-evaluation diagnostics. The public fields are
/// refreshed by every [`ClosedLoop::eval_into`] call and describe the state
/// that call saw; channel vectors are indexed by global channel (player-major)
/// and are empty for estimator-only systems.
#[derive(Clone, Debug)]
pub struct EvalWorkspace {
    pub u: Vec<f64>,
    pub k_dot: Vec<f64>,
    pub reg_error: Vec<f64>,
    pub ydot: Vec<f64>,
    pub ydot_norm_sq: f64,
    dx: Vec<f64>,
    dv: Vec<f64>,
}
