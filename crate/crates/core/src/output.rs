//! Run artifact writers.
//!
//! A finished run produces two files: a trajectory CSV with one row per
//! recorded sample, and a summary JSON with the scored metrics and a redacted
//! echo of the configuration. Sweeps add a third file with one row per swept
//! value. All writers are deterministic: re-running the same configuration
//! reproduces every artifact byte for byte.
//!
//! Trajectory columns are fully determined by the scenario, in this order:
//!
//! 1. `t`
//! 2. `x_<i>_<c>` for every simulated player `i` and action component `c`
//! 3. `y_<i>_<c>` reference signals for every player in the game
//! 4. `k_<i>_<c>` the Nussbaum argument (the first-stage one for two-stage
//!    regulators)
//! 5. `theta_hat_<i>_<c>` the uncertainty estimate, absent for regulator
//!    families that do not adapt one
//! 6. `v_<i>_<c>` velocities, present for second-order plants
//! 7. `delta_<i>_<j>_<c>` (per-component) or `delta_<i>_<j>` (per-channel)
//!    consensus gains, adaptive estimator mode only; `i` observes, `j` is the
//!    target
//! 8. `u_<i>_<c>` applied controls
//! 9. remaining adaptive states of two-stage regulators, state-major:
//!    `k2_<i>_<c>`, `theta_bar1_<i>_<c>`, `theta_bar2_<i>_<c>`,
//!    `b_bar1_<i>_<c>`
//!
//! Indices are 1-based everywhere. The summary JSON never contains the
//! `players.<i>.hidden` tables; those hold plant-side truth the controllers
//! must not read, and the echo is the place a leak would be easiest to miss.

use std::fmt::Write as _;
use std::io::Write;

use serde_json::json;
use toml::Value;

use crate::error::Result;
use crate::estimator::GainIndexing;
use crate::scenario::BuiltScenario;
use crate::sim::{ClosedLoop, EstimatorMode, Metrics, RunLog};

enum Col {
    Time,
    State(usize),
    Control(usize),
}

/// Column plan for one scenario: names plus where each value lives in a
/// recorded sample.
fn columns(cl: &ClosedLoop) -> Vec<(String, Col)> {
    let layout = cl.layout();
    let game = cl.game();
    let mut cols = vec![("t".to_string(), Col::Time)];
    for i in 0..cl.players().len() {
        for (c, idx) in layout.x_range(i).enumerate() {
            cols.push((format!("x_{}_{}", i + 1, c + 1), Col::State(idx)));
        }
    }
    let y0 = layout.y_range().start;
    let mut offset = 0;
    for j in 0..game.n_players() {
        for c in 0..game.dim(j) {
            cols.push((format!("y_{}_{}", j + 1, c + 1), Col::State(y0 + offset + c)));
        }
        offset += game.dim(j);
    }
    for i in 0..cl.players().len() {
        for c in 0..layout.player_shape(i).dim {
            let r = layout.reg_channel_range(i, c);
            cols.push((format!("k_{}_{}", i + 1, c + 1), Col::State(r.start)));
        }
    }
    for (i, p) in cl.players().iter().enumerate() {
        if !p.family.has_theta_hat() {
            continue;
        }
        for c in 0..layout.player_shape(i).dim {
            let r = layout.reg_channel_range(i, c);
            cols.push((format!("theta_hat_{}_{}", i + 1, c + 1), Col::State(r.start + 1)));
        }
    }
    for i in 0..cl.players().len() {
        if let Some(r) = layout.v_range(i) {
            for (c, idx) in r.enumerate() {
                cols.push((format!("v_{}_{}", i + 1, c + 1), Col::State(idx)));
            }
        }
    }
    if let EstimatorMode::Adaptive(indexing) = cl.mode() {
        let d0 = layout
            .delta_range()
            .expect("adaptive mode always lays out gain states")
            .start;
        let n = game.n_players();
        match indexing {
            GainIndexing::PerComponent => {
                let total = game.total_dim();
                for i in 0..n {
                    let mut offset = 0;
                    for j in 0..n {
                        for c in 0..game.dim(j) {
                            cols.push((
                                format!("delta_{}_{}_{}", i + 1, j + 1, c + 1),
                                Col::State(d0 + i * total + offset + c),
                            ));
                        }
                        offset += game.dim(j);
                    }
                }
            }
            GainIndexing::PerChannel => {
                for i in 0..n {
                    for j in 0..n {
                        cols.push((
                            format!("delta_{}_{}", i + 1, j + 1),
                            Col::State(d0 + i * n + j),
                        ));
                    }
                }
            }
        }
    }
    let mut ch = 0;
    for i in 0..cl.players().len() {
        for c in 0..layout.player_shape(i).dim {
            cols.push((format!("u_{}_{}", i + 1, c + 1), Col::Control(ch)));
            ch += 1;
        }
    }
    for (i, p) in cl.players().iter().enumerate() {
        let names = p.family.state_names();
        for (slot, name) in names.iter().enumerate().skip(2) {
            for c in 0..layout.player_shape(i).dim {
                let r = layout.reg_channel_range(i, c);
                cols.push((format!("{}_{}_{}", name, i + 1, c + 1), Col::State(r.start + slot)));
            }
        }
    }
    cols
}

/// Column names of the trajectory CSV for this scenario.
pub fn trajectory_header(cl: &ClosedLoop) -> Vec<String> {
    columns(cl).into_iter().map(|(name, _)| name).collect()
}

/// Stream the recorded samples as CSV, header first. Values use the shortest
/// round-trip float form, so equal runs serialize to equal bytes.
pub fn write_trajectory<W: Write>(mut out: W, cl: &ClosedLoop, log: &RunLog) -> Result<()> {
    let cols = columns(cl);
    let mut line = String::new();
    for (idx, (name, _)) in cols.iter().enumerate() {
        if idx > 0 {
            line.push(',');
        }
        line.push_str(name);
    }
    line.push('\n');
    out.write_all(line.as_bytes())?;
    for s in 0..log.n_samples() {
        line.clear();
        for (idx, (_, col)) in cols.iter().enumerate() {
            if idx > 0 {
                line.push(',');
            }
            let v = match col {
                Col::Time => log.times[s],
                Col::State(i) => log.states[s][*i],
                Col::Control(i) => log.u[s][*i],
            };
            let _ = write!(line, "{v}");
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Copy of the configuration with every `players.<i>.hidden` table removed.
pub fn redact_config(raw: &Value) -> Value {
    let mut echo = raw.clone();
    if let Some(players) = echo.get_mut("players").and_then(Value::as_table_mut) {
        for (_, player) in players.iter_mut() {
            if let Some(table) = player.as_table_mut() {
                table.remove("hidden");
            }
        }
    }
    echo
}

/// Summary document for a finished run. `converged` means the run stayed
/// finite and its final error beat the tolerance.
pub fn summary_json(
    built: &BuiltScenario,
    metrics: &Metrics,
    tolerance: f64,
) -> Result<serde_json::Value> {
    let converged = !metrics.diverged && metrics.final_error < tolerance;
    let metrics_value = serde_json::to_value(metrics)?;
    let config_value = serde_json::to_value(redact_config(&built.raw))?;
    Ok(json!({
        "scenario": built.name,
        "converged": converged,
        "diverged": metrics.diverged,
        "final_error": metrics.final_error,
        "tolerance": tolerance,
        "config_hash": format!("{:016x}", built.config_hash),
        "metrics": metrics_value,
        "config": config_value,
    }))
}

/// One scored run of a parameter sweep.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub final_error: f64,
    pub max_k: f64,
    pub diverged: bool,
}

/// Sweep results as CSV, one row per swept value in input order.
pub fn write_sweep<W: Write>(mut out: W, rows: &[SweepRow]) -> Result<()> {
    writeln!(out, "value,final_error,max_k,diverged")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.value, r.final_error, r.max_k, r.diverged)?;
    }
    Ok(())
}
