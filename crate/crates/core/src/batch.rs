//! Parameter sweep execution.
//!
//! A sweep re-runs one scenario with a single numeric config key set to each
//! value in a list and scores every variant. Result rows keep the input
//! order regardless of scheduling. With the `parallel` feature the variants
//! fan out over the rayon thread pool; without it they run back to back on
//! the calling thread. A variant that diverges is recorded in its row, not
//! turned into an error; only configuration problems abort the sweep.

use crate::error::{Error, Result};
use crate::output::SweepRow;
use crate::phi::PhiRegistry;
use crate::scenario::load;
use crate::sim::{compute_metrics, integrate};

/// What to sweep: a scenario source, overrides shared by every variant, and
/// the dotted config key receiving the swept value.
#[derive(Clone, Copy, Debug)]
pub struct SweepSpec<'a> {
    /// Path or `builtin:<name>` reference.
    pub source: &'a str,
    pub overrides: &'a [(String, String)],
    pub parameter: &'a str,
}

/// Run and score every value of the sweep, preserving input order.
pub fn run_sweep(
    spec: &SweepSpec<'_>,
    values: &[f64],
    registry: &PhiRegistry,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::config(
            "sweep.values",
            "need at least one value to sweep",
        ));
    }
    map_scored(spec, values, registry)
}

#[cfg(feature = "parallel")]
fn map_scored(
    spec: &SweepSpec<'_>,
    values: &[f64],
    registry: &PhiRegistry,
) -> Result<Vec<SweepRow>> {
    use rayon::prelude::*;
    values
        .par_iter()
        .map(|&value| score(spec, value, registry))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn map_scored(
    spec: &SweepSpec<'_>,
    values: &[f64],
    registry: &PhiRegistry,
) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|&value| score(spec, value, registry))
        .collect()
}

fn score(spec: &SweepSpec<'_>, value: f64, registry: &PhiRegistry) -> Result<SweepRow> {
    let mut overrides = spec.overrides.to_vec();
    overrides.push((spec.parameter.to_string(), float_literal(value)));
    let built = load(spec.source, &overrides, registry)?;
    let log = integrate(&built.closed_loop, &built.initial_state, &built.params)?;
    let metrics = compute_metrics(&built.closed_loop, &log, &built.x_star);
    Ok(SweepRow {
        value,
        final_error: metrics.final_error,
        max_k: metrics.max_abs_k,
        diverged: metrics.diverged,
    })
}

/// Shortest decimal form that reads back as a float, never as an integer, so
/// the override cannot change the config key's type.
fn float_literal(value: f64) -> String {
    let mut s = format!("{value}");
    if !s.contains(['.', 'e', 'E', 'n', 'i']) {
        s.push_str(".0");
    }
    s
}
