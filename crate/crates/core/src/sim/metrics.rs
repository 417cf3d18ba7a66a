//! Convergence and boundedness summaries of a sampled run.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::sim::closed_loop::{ClosedLoop, EstimatorMode};
use crate::sim::integrate::RunLog;

/// Boundedness summary of one logged scalar state: its largest magnitude over
/// the whole run and its max-min spread over the final tenth of the samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StateMetric {
    pub max_abs: f64,
    pub plateau: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelMetrics {
    /// 1-based player index.
    pub player: usize,
    /// 1-based component within the player's action.
    pub component: usize,
    /// Adaptive regulator states by name (`k`, `theta_hat`, ...).
    pub reg_states: BTreeMap<String, StateMetric>,
    /// Gain adaptation rate at the final sample; settles to ~0 on success.
    pub terminal_k_dot: f64,
    pub max_abs_u: f64,
    pub max_abs_v: Option<f64>,
    pub terminal_abs_v: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Metrics {
    /// Time of the last recorded sample.
    pub final_time: f64,
    /// ∞-norm distance of the final actions (references when no players are
    /// simulated) from the equilibrium.
    pub final_error: f64,
    pub channels: Vec<ChannelMetrics>,
    /// Largest Nussbaum argument magnitude seen anywhere.
    pub max_abs_k: f64,
    /// Trapezoid rule over the sampled ‖ẏ‖² series.
    pub ydot_sq_integral: f64,
    /// Share of that integral accrued over the final fifth of the samples.
    pub ydot_sq_tail_fraction: f64,
    /// Adaptive mode only: whether every consensus gain was nondecreasing
    /// across samples.
    pub delta_monotone: Option<bool>,
    /// Adaptive mode only: largest consensus gain reached.
    pub max_delta: Option<f64>,
    pub diverged: bool,
}

fn state_metric(series: impl Iterator<Item = f64> + Clone, window_start: usize) -> StateMetric {
    let mut max_abs = 0.0f64;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (idx, v) in series.enumerate() {
        max_abs = max_abs.max(v.abs());
        if idx >= window_start {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    StateMetric {
        max_abs,
        plateau: if hi >= lo { hi - lo } else { 0.0 },
    }
}

/// Per-sample ∞-norm distance from `x_star`, measured on the actions when
/// players are simulated and on the references otherwise.
pub fn error_series(cl: &ClosedLoop, log: &RunLog, x_star: &[f64]) -> Vec<(f64, f64)> {
    let layout = cl.layout();
    let game = cl.game();
    log.times
        .iter()
        .zip(&log.states)
        .map(|(&t, state)| {
            let mut err = 0.0f64;
            if cl.players().is_empty() {
                let y = &state[layout.y_range()];
                for (a, b) in y.iter().zip(x_star) {
                    err = err.max((a - b).abs());
                }
            } else {
                for i in 0..game.n_players() {
                    let x = &state[layout.x_range(i)];
                    let target = &x_star[game.offset(i)..game.offset(i) + game.dim(i)];
                    for (a, b) in x.iter().zip(target) {
                        err = err.max((a - b).abs());
                    }
                }
            }
            (t, err)
        })
        .collect()
}

pub fn compute(cl: &ClosedLoop, log: &RunLog, x_star: &[f64]) -> Metrics {
    let layout = cl.layout();
    let game = cl.game();
    let n_samples = log.n_samples();
    assert!(n_samples > 0, "metrics need at least one sample");
    let window_start = n_samples - (n_samples / 10).max(1);

    let final_error = error_series(cl, log, x_star)
        .last()
        .map(|&(_, e)| e)
        .unwrap_or(f64::INFINITY);

    let mut channels = Vec::new();
    let mut max_abs_k = 0.0f64;
    for (i, p) in cl.players().iter().enumerate() {
        let names = p.family.state_names();
        let off = game.offset(i);
        for c in 0..p.plant.dim() {
            let reg = layout.reg_channel_range(i, c);
            let mut reg_states = BTreeMap::new();
            for (s, name) in names.iter().enumerate() {
                let metric = state_metric(
                    log.states.iter().map(|st| st[reg.start + s]),
                    window_start,
                );
                if *name == "k" || *name == "k1" || *name == "k2" {
                    max_abs_k = max_abs_k.max(metric.max_abs);
                }
                reg_states.insert((*name).to_string(), metric);
            }
            let ch = off + c;
            let v_series = layout.v_range(i).map(|r| {
                (
                    log.states
                        .iter()
                        .fold(0.0f64, |m, st| m.max(st[r.start + c].abs())),
                    log.last_state()[r.start + c].abs(),
                )
            });
            channels.push(ChannelMetrics {
                player: i + 1,
                component: c + 1,
                reg_states,
                terminal_k_dot: log.k_dot.last().map_or(0.0, |row| row[ch]),
                max_abs_u: log.u.iter().fold(0.0f64, |m, row| m.max(row[ch].abs())),
                max_abs_v: v_series.map(|(max, _)| max),
                terminal_abs_v: v_series.map(|(_, last)| last),
            });
        }
    }

    let mut integral = 0.0;
    let mut tail = 0.0;
    let tail_start = n_samples - (n_samples / 5).max(1);
    for idx in 0..n_samples.saturating_sub(1) {
        let dt = log.times[idx + 1] - log.times[idx];
        let seg = 0.5 * dt * (log.ydot_norm_sq[idx] + log.ydot_norm_sq[idx + 1]);
        integral += seg;
        if idx >= tail_start {
            tail += seg;
        }
    }
    let tail_fraction = if integral > 0.0 { tail / integral } else { 0.0 };

    let (delta_monotone, max_delta) = match (cl.mode(), layout.delta_range()) {
        (EstimatorMode::Adaptive(_), Some(range)) => {
            let mut monotone = true;
            let mut max_delta = f64::NEG_INFINITY;
            for pair in log.states.windows(2) {
                let (prev, next) = (&pair[0][range.clone()], &pair[1][range.clone()]);
                if prev.iter().zip(next).any(|(a, b)| b < a) {
                    monotone = false;
                }
            }
            for st in &log.states {
                for v in &st[range.clone()] {
                    max_delta = max_delta.max(*v);
                }
            }
            (Some(monotone), Some(max_delta))
        }
        _ => (None, None),
    };

    Metrics {
        final_time: *log.times.last().unwrap(),
        final_error,
        channels,
        max_abs_k,
        ydot_sq_integral: integral,
        ydot_sq_tail_fraction: tail_fraction,
        delta_monotone,
        max_delta,
        diverged: log.diverged.is_some(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimator::{FixedGains, GainIndexing};
    use crate::game::connectivity_game;
    use crate::network::CommGraph;
    use crate::phi::Phi;
    use crate::plants::{HiddenParams, Plant, PlantKind};
    use crate::regulators::{Nussbaum, NussbaumKind, RegulatorFamily};
    use crate::sim::closed_loop::PlayerSim;
    use crate::sim::integrate::{integrate, IntegrationParams};

    fn estimator_loop(mode: EstimatorMode) -> ClosedLoop {
        ClosedLoop::new(
            connectivity_game(),
            CommGraph::cycle(7).unwrap(),
            Vec::new(),
            mode,
            Nussbaum::new(NussbaumKind::QuadraticSine),
        )
        .unwrap()
    }

    #[test]
    fn reference_layer_converges_toward_equilibrium() {
        let cl = estimator_loop(EstimatorMode::Fixed(FixedGains::uniform(7, 10.0)));
        let x_star = cl.game().analytic_ne().unwrap().to_vec();
        let initial = vec![0.0; cl.layout().total_len()];
        let params = IntegrationParams {
            t_final: 5.0,
            step: 1e-3,
            stride: 10,
            warmup: Vec::new(),
        };
        let log = integrate(&cl, &initial, &params).unwrap();
        let m = compute(&cl, &log, &x_star);
        // From y(0) = 0 the initial distance is 1; five time constants cut it
        // far down.
        assert!(m.final_error < 0.1, "final error {}", m.final_error);
        assert!(m.ydot_sq_integral > 0.0);
        assert!((0.0..=1.0).contains(&m.ydot_sq_tail_fraction));
        assert!(m.ydot_sq_tail_fraction < 0.5);
        assert!(m.channels.is_empty());
        assert_eq!(m.max_abs_k, 0.0);
        assert!(m.delta_monotone.is_none());
        assert!(!m.diverged);
    }

    #[test]
    fn adaptive_gains_are_reported_monotone() {
        let cl = estimator_loop(EstimatorMode::Adaptive(GainIndexing::PerComponent));
        let x_star = cl.game().analytic_ne().unwrap().to_vec();
        let initial = vec![0.0; cl.layout().total_len()];
        let params = IntegrationParams {
            t_final: 2.0,
            step: 1e-3,
            stride: 10,
            warmup: Vec::new(),
        };
        let log = integrate(&cl, &initial, &params).unwrap();
        let m = compute(&cl, &log, &x_star);
        assert_eq!(m.delta_monotone, Some(true));
        assert!(m.max_delta.unwrap() > 0.0);
    }

    #[test]
    fn channel_metrics_track_the_log() {
        let game = connectivity_game();
        let n = game.n_players();
        let players = (0..n)
            .map(|i| PlayerSim {
                family: RegulatorFamily::FirstOrder,
                plant: Plant::new(
                    PlantKind::FirstOrder,
                    2,
                    HiddenParams::single_stage(vec![3.0, 3.0], vec![1.0, 1.0]),
                    Phi::Linear((i + 1) as f64),
                    None,
                    "test",
                )
                .unwrap(),
            })
            .collect();
        let cl = ClosedLoop::new(
            game,
            CommGraph::cycle(n).unwrap(),
            players,
            EstimatorMode::Fixed(FixedGains::uniform(n, 10.0)),
            Nussbaum::new(NussbaumKind::QuadraticSine),
        )
        .unwrap();
        let x_star = cl.game().analytic_ne().unwrap().to_vec();
        let mut initial = vec![0.0; cl.layout().total_len()];
        initial[0] = 2.0;
        let params = IntegrationParams {
            t_final: 0.2,
            step: 1e-3,
            stride: 20,
            warmup: Vec::new(),
        };
        let log = integrate(&cl, &initial, &params).unwrap();
        let m = compute(&cl, &log, &x_star);
        assert_eq!(m.channels.len(), 14);
        let ch = &m.channels[0];
        assert_eq!((ch.player, ch.component), (1, 1));
        assert!(ch.reg_states.contains_key("k"));
        assert!(ch.reg_states.contains_key("theta_hat"));
        assert_eq!(ch.terminal_k_dot, *log.k_dot.last().unwrap().first().unwrap());
        assert!(ch.max_abs_v.is_none());
        let k = &ch.reg_states["k"];
        assert!(k.max_abs > 0.0);
        assert!(k.plateau >= 0.0);
        assert_eq!(m.max_abs_k, m.channels.iter().map(|c| c.reg_states["k"].max_abs).fold(0.0, f64::max));
    }
}
