//! Fixed-step fourth-order Runge-Kutta driver with strided sampling.

use crate::error::{Error, Result};
use crate::sim::closed_loop::ClosedLoop;

/// Refined fixed-step window at the start of a run. Some closed loops open
/// with transients whose rates exceed what the cruise step can resolve by
/// orders of magnitude; windows cover those bursts with smaller steps and
/// hand over to the main step afterwards. Every phase is a plain fixed-step
/// schedule declared up front, so runs stay deterministic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WarmupParams {
    /// Time at which the window ends (truncated to a whole step count).
    pub t_end: f64,
    /// Step used inside the window; at most the main step.
    pub step: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegrationParams {
    pub t_final: f64,
    pub step: f64,
    /// Record every `stride`-th step, plus the end state always. 1 records
    /// everything. Inside a warmup window the
    /// recording interval stays `step * stride` of time, not every window
    /// step, so sample cadence is roughly uniform across the whole run.
    pub stride: usize,
    /// Consecutive refined windows from t = 0, ordered by end time; empty
    /// for a single-phase run.
    pub warmup: Vec<WarmupParams>,
}

impl Default for IntegrationParams {
    fn default() -> Self {
        IntegrationParams {
            t_final: 100.0,
            step: 1e-3,
            stride: 10,
            warmup: Vec::new(),
        }
    }
}

impl IntegrationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Error::config(
                "integration.T",
                format!("horizon must be finite and nonnegative, got {}", self.t_final),
            ));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::config(
                "integration.h",
                format!("step must be positive and finite, got {}", self.step),
            ));
        }
        if self.stride == 0 {
            return Err(Error::config("integration.stride", "stride must be at least 1"));
        }
        let mut prev_end = 0.0;
        for (idx, w) in self.warmup.iter().enumerate() {
            if !(w.t_end.is_finite() && w.t_end > prev_end && w.t_end <= self.t_final) {
                return Err(Error::config(
                    format!("integration.warmup.{idx}.T"),
                    format!(
                        "warmup windows must end at increasing times inside (0, T], got {} after {} with T = {}",
                        w.t_end, prev_end, self.t_final
                    ),
                ));
            }
            if !(w.step.is_finite() && w.step > 0.0 && w.step <= self.step) {
                return Err(Error::config(
                    format!("integration.warmup.{idx}.h"),
                    format!(
                        "warmup step must be positive and at most h, got {} with h = {}",
                        w.step, self.step
                    ),
                ));
            }
            prev_end = w.t_end;
        }
        Ok(())
    }

    /// Whole steps taken across all phases; each phase horizon is truncated
    /// to a step multiple.
    pub fn n_steps(&self) -> usize {
        self.phases().iter().map(|p| p.n).sum()
    }

    /// The run as a list of fixed-step segments. Each phase starts where the
    /// previous one actually stopped (a whole number of its steps), so the
    /// timeline carries no gaps.
    fn phases(&self) -> Vec<Phase> {
        let whole = |span: f64, h: f64| ((span / h) + 1e-9).floor() as usize;
        let record_dt = self.step * self.stride as f64;
        let mut phases = Vec::with_capacity(self.warmup.len() + 1);
        let mut t0 = 0.0;
        for w in &self.warmup {
            let n = whole(w.t_end - t0, w.step);
            phases.push(Phase {
                t0,
                h: w.step,
                n,
                every: ((record_dt / w.step).round() as usize).max(1),
            });
            t0 += n as f64 * w.step;
        }
        phases.push(Phase {
            t0,
            h: self.step,
            n: whole(self.t_final - t0, self.step),
            every: self.stride,
        });
        phases
    }
}

/// One fixed-step segment of a run: `n` steps of size `h` from `t0`,
/// recording every `every`-th step.
struct Phase {
    t0: f64,
    h: f64,
    n: usize,
    every: usize,
}

/// Scratch for one integrator instance; reused across steps so the hot loop
/// does not allocate.
pub struct Rk4Buffers {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl Rk4Buffers {
    pub fn new(len: usize) -> Self {
        Rk4Buffers {
            k1: vec![0.0; len],
            k2: vec![0.0; len],
            k3: vec![0.0; len],
            k4: vec![0.0; len],
            stage: vec![0.0; len],
        }
    }
}

/// One classical Runge-Kutta step of `ẋ = f(t, x)` in place, with `k1`
/// supplied by the caller (the evaluation at `(t, state)`).
fn rk4_advance<F>(f: &mut F, t: f64, state: &mut [f64], h: f64, bufs: &mut Rk4Buffers)
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let n = state.len();
    for i in 0..n {
        bufs.stage[i] = state[i] + 0.5 * h * bufs.k1[i];
    }
    f(t + 0.5 * h, &bufs.stage, &mut bufs.k2);
    for i in 0..n {
        bufs.stage[i] = state[i] + 0.5 * h * bufs.k2[i];
    }
    f(t + 0.5 * h, &bufs.stage, &mut bufs.k3);
    for i in 0..n {
        bufs.stage[i] = state[i] + h * bufs.k3[i];
    }
    f(t + h, &bufs.stage, &mut bufs.k4);
    let w = h / 6.0;
    for i in 0..n {
        state[i] += w * (bufs.k1[i] + 2.0 * bufs.k2[i] + 2.0 * bufs.k3[i] + bufs.k4[i]);
    }
}

/// Single classical Runge-Kutta step, allocating variant for tests and small
/// problems.
pub fn rk4_step<F>(mut f: F, t: f64, state: &[f64], h: f64) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut bufs = Rk4Buffers::new(state.len());
    let mut out = state.to_vec();
    f(t, &out, &mut bufs.k1);
    rk4_advance(&mut f, t, &mut out, h, &mut bufs);
    out
}

/// Any state entry beyond this magnitude counts as divergence. Healthy runs
/// of the shipped scenarios peak around 1e3 during Nussbaum search
/// transients, so the margin is six orders; a trajectory out here never comes
/// back, it only decides between overflow and a slow exponential.
pub const STATE_BOUND: f64 = 1e9;

/// Where and when the state first left the allowed range.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceReport {
    pub time: f64,
    pub index: usize,
    pub segment: String,
}

impl std::fmt::Display for DivergenceReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "state left the allowed range (|value| <= {STATE_BOUND:.0e}) in segment `{}` (entry {}) at t = {}",
            self.segment, self.index, self.time
        )
    }
}

/// Sampled trajectory of one run. All per-sample vectors share indexing with
/// `times`; channel diagnostics are empty for estimator-only systems.
#[derive(Clone, Debug, PartialEq)]
pub struct RunLog {
    pub params: IntegrationParams,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub k_dot: Vec<Vec<f64>>,
    pub reg_error: Vec<Vec<f64>>,
    pub ydot_norm_sq: Vec<f64>,
    /// Set when integration stopped early on a non-finite state.
    pub diverged: Option<DivergenceReport>,
}

impl RunLog {
    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    pub fn last_state(&self) -> &[f64] {
        self.states.last().expect("a run log holds at least one sample")
    }
}

/// Integrate the closed loop from `initial` over the given horizon.
///
/// Samples are taken at every `stride`-th step boundary starting at t = 0,
/// and the end state is always recorded even when the horizon is not a whole
/// number of recording intervals. The recorded diagnostics come from the same
/// derivative evaluation that drives the step, so logging does not perturb
/// the trajectory. A state entry outside [`STATE_BOUND`] aborts the run and
/// sets [`RunLog::diverged`] instead of failing.
pub fn integrate(cl: &ClosedLoop, initial: &[f64], params: &IntegrationParams) -> Result<RunLog> {
    params.validate()?;
    let dim = cl.layout().total_len();
    if initial.len() != dim {
        return Err(Error::Dimension {
            context: "initial state".into(),
            expected: dim,
            actual: initial.len(),
        });
    }
    let phases = params.phases();
    let mut state = initial.to_vec();
    let mut ws = cl.workspace();
    let mut bufs = Rk4Buffers::new(dim);
    let mut log = RunLog {
        params: params.clone(),
        times: Vec::new(),
        states: Vec::new(),
        u: Vec::new(),
        k_dot: Vec::new(),
        reg_error: Vec::new(),
        ydot_norm_sq: Vec::new(),
        diverged: None,
    };
    let record = |log: &mut RunLog, t: f64, state: &[f64], ws: &crate::sim::EvalWorkspace| {
        log.times.push(t);
        log.states.push(state.to_vec());
        log.u.push(ws.u.clone());
        log.k_dot.push(ws.k_dot.clone());
        log.reg_error.push(ws.reg_error.clone());
        log.ydot_norm_sq.push(ws.ydot_norm_sq);
    };

    // Recording happens before each step, so a phase never logs its right
    // endpoint; the boundary state is recorded exactly once, by the next
    // phase's step 0 (or by the tail record after the last phase).
    for (phase_idx, phase) in phases.iter().enumerate() {
        for step_idx in 0..phase.n {
            let t = phase.t0 + step_idx as f64 * phase.h;
            cl.eval_into(&state, &mut bufs.k1, &mut ws);
            if step_idx % phase.every == 0 {
                record(&mut log, t, &state, &ws);
            }
            {
                let mut f = |_t: f64, s: &[f64], d: &mut [f64]| cl.eval_into(s, d, &mut ws);
                rk4_advance(&mut f, t, &mut state, phase.h, &mut bufs);
            }
            if let Some(index) = state.iter().position(|v| !(v.abs() <= STATE_BOUND)) {
                log.diverged = Some(DivergenceReport {
                    time: phase.t0 + (step_idx + 1) as f64 * phase.h,
                    index,
                    segment: cl.layout().segment_of(index).to_string(),
                });
                break;
            }
        }
        if log.diverged.is_some() {
            break;
        }
        if phase_idx + 1 == phases.len() {
            let t = phase.t0 + phase.n as f64 * phase.h;
            cl.eval_into(&state, &mut bufs.k1, &mut ws);
            record(&mut log, t, &state, &ws);
        }
    }
    Ok(log)
}
