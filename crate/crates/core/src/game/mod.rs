//! Game layer: objectives, partial gradients, equilibrium solving and the
//! diagnostics (monotonicity / Lipschitz estimates) that certify a game is
//! solvable by gradient-based seeking.
//!
//! A [`GameDefinition`] is a bundle of per-player objective and
//! partial-gradient callbacks over the stacked action profile. Games built
//! from a [`QuadraticGame`] additionally carry their affine pseudo-gradient
//! `P(x) = Qx + c`, unlocking exact equilibrium solves and exact
//! monotonicity/Lipschitz constants; everything else falls back to seeded
//! sampling.

mod quadratic;

pub use quadratic::QuadraticGame;

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub type Objective = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
pub type Gradient = Arc<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// Axis-aligned sampling region `[lo, hi]^dim` for the estimate ops.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleBox {
    pub lo: f64,
    pub hi: f64,
}

impl SampleBox {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return Err(Error::config(
                "sample_box",
                format!("degenerate bounds [{lo}, {hi}]"),
            ));
        }
        Ok(SampleBox { lo, hi })
    }
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox { lo: -10.0, hi: 10.0 }
    }
}

/// Knobs for [`GameDefinition::solve_nash_with`].
#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Residual target on ‖P(x)‖∞.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Region used when monotonicity/Lipschitz constants must be sampled.
    pub sample_box: SampleBox,
    pub sample_pairs: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerance: 1e-9,
            max_iterations: 500_000,
            sample_box: SampleBox::default(),
            sample_pairs: 256,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone)]
pub struct GameDefinition {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    total: usize,
    objectives: Vec<Objective>,
    gradients: Vec<Gradient>,
    analytic_ne: Option<Vec<f64>>,
    declared_monotonicity: Option<f64>,
    declared_lipschitz: Option<Vec<f64>>,
    quadratic: Option<Arc<QuadraticGame>>,
}

// The closure tables make a derived Debug impossible; summarize shape instead.
impl std::fmt::Debug for GameDefinition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GameDefinition")
            .field("dims", &self.dims)
            .field("quadratic", &self.quadratic.is_some())
            .field("analytic_ne", &self.analytic_ne)
            .finish()
    }
}

impl GameDefinition {
    pub fn new(dims: Vec<usize>, objectives: Vec<Objective>, gradients: Vec<Gradient>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::config("game.players", "game needs at least one player"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::config("game.players", "every action needs at least one component"));
        }
        if objectives.len() != dims.len() || gradients.len() != dims.len() {
            return Err(Error::config(
                "game.players",
                "objectives and gradients must have one entry per player",
            ));
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &d in &dims {
            offsets.push(acc);
            acc += d;
        }
        Ok(GameDefinition {
            dims,
            offsets,
            total: acc,
            objectives,
            gradients,
            analytic_ne: None,
            declared_monotonicity: None,
            declared_lipschitz: None,
            quadratic: None,
        })
    }

    pub fn from_quadratic(q: QuadraticGame) -> GameDefinition {
        let arc = Arc::new(q);
        let n = arc.dims().len();
        let objectives = (0..n)
            .map(|i| {
                let g = arc.clone();
                Arc::new(move |x: &[f64]| g.objective(i, x)) as Objective
            })
            .collect();
        let gradients = (0..n)
            .map(|i| {
                let g = arc.clone();
                Arc::new(move |x: &[f64], out: &mut [f64]| g.partial_gradient_into(i, x, out))
                    as Gradient
            })
            .collect();
        let mut game = GameDefinition::new(arc.dims().to_vec(), objectives, gradients)
            .expect("quadratic games are validated at construction");
        game.quadratic = Some(arc);
        game
    }

    pub fn with_analytic_ne(mut self, ne: Vec<f64>) -> Result<Self> {
        if ne.len() != self.total {
            return Err(Error::Dimension {
                context: "analytic equilibrium".into(),
                expected: self.total,
                actual: ne.len(),
            });
        }
        self.analytic_ne = Some(ne);
        Ok(self)
    }

    pub fn with_monotonicity(mut self, m: f64) -> Self {
        self.declared_monotonicity = Some(m);
        self
    }

    pub fn with_lipschitz(mut self, l: Vec<f64>) -> Self {
        self.declared_lipschitz = Some(l);
        self
    }

    pub fn n_players(&self) -> usize {
        self.dims.len()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, player: usize) -> usize {
        self.dims[player]
    }

    pub fn total_dim(&self) -> usize {
        self.total
    }

    pub fn offset(&self, player: usize) -> usize {
        self.offsets[player]
    }

    pub fn analytic_ne(&self) -> Option<&[f64]> {
        self.analytic_ne.as_deref()
    }

    pub fn quadratic(&self) -> Option<&QuadraticGame> {
        self.quadratic.as_deref()
    }

    pub fn player_slice<'a>(&self, player: usize, x: &'a [f64]) -> &'a [f64] {
        &x[self.offsets[player]..self.offsets[player] + self.dims[player]]
    }

    pub fn objective(&self, player: usize, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.total);
        (self.objectives[player])(x)
    }

    /// ∂f_i/∂x_i evaluated on the stacked profile, written into `out`.
    pub fn partial_gradient_into(&self, player: usize, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.total);
        debug_assert_eq!(out.len(), self.dims[player]);
        (self.gradients[player])(x, out);
    }

    pub fn partial_gradient(&self, player: usize, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[player]];
        self.partial_gradient_into(player, x, &mut out);
        out
    }

    /// Stacked pseudo-gradient P(x) = (∂f_1/∂x_1, …, ∂f_N/∂x_N).
    pub fn pseudo_gradient_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(out.len(), self.total);
        for i in 0..self.dims.len() {
            let (off, d) = (self.offsets[i], self.dims[i]);
            self.partial_gradient_into(i, x, &mut out[off..off + d]);
        }
    }

    pub fn pseudo_gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.total];
        self.pseudo_gradient_into(x, &mut out);
        out
    }

    /// Nash equilibrium with default options: exact affine solve for
    /// quadratic games, damped pseudo-gradient iteration otherwise.
    pub fn solve_nash(&self) -> Result<Vec<f64>> {
        self.solve_nash_with(&SolveOptions::default())
    }

    pub fn solve_nash_with(&self, opts: &SolveOptions) -> Result<Vec<f64>> {
        if let Some(q) = &self.quadratic {
            let (qm, c) = q.affine_parts();
            let rhs = -&c;
            let solution = qm
                .clone()
                .lu()
                .solve(&rhs)
                .ok_or(Error::SolverStalled {
                    residual: f64::INFINITY,
                    iterations: 0,
                })?;
            let residual = (&qm * &solution + &c).amax();
            if residual > opts.tolerance {
                return Err(Error::SolverStalled {
                    residual,
                    iterations: 0,
                });
            }
            return Ok(solution.data.into());
        }
        self.solve_nash_iterative(opts)
    }

    /// x ← x − τ P(x) with τ = m̂ / L̂², the classical step for strongly
    /// monotone Lipschitz operators.
    fn solve_nash_iterative(&self, opts: &SolveOptions) -> Result<Vec<f64>> {
        let m = match self.declared_monotonicity {
            Some(m) => m,
            None => self.estimate_monotonicity(opts.sample_box, opts.sample_pairs, opts.seed)?,
        };
        if m <= 0.0 {
            return Err(Error::NotMonotone { estimate: m });
        }
        let l = match &self.declared_lipschitz {
            Some(per_player) => per_player.iter().map(|v| v * v).sum::<f64>().sqrt(),
            None => self.estimate_stacked_lipschitz(opts.sample_box, opts.sample_pairs, opts.seed)?,
        };
        let l = l.max(m);
        let tau = m / (l * l);
        let center = 0.5 * (opts.sample_box.lo + opts.sample_box.hi);
        let mut x = vec![center; self.total];
        let mut p = vec![0.0; self.total];
        let mut residual = f64::INFINITY;
        for _ in 0..opts.max_iterations {
            self.pseudo_gradient_into(&x, &mut p);
            residual = p.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            if residual < opts.tolerance {
                return Ok(x);
            }
            for (xk, pk) in x.iter_mut().zip(&p) {
                *xk -= tau * pk;
            }
        }
        Err(Error::SolverStalled {
            residual,
            iterations: opts.max_iterations,
        })
    }

    /// Strong-monotonicity modulus of the pseudo-gradient.
    ///
    /// Exact λ_min((Q + Qᵀ)/2) for quadratic games; otherwise the sampled
    /// minimum of ⟨x−z, P(x)−P(z)⟩ / ‖x−z‖² over `pairs` seeded draws.
    pub fn estimate_monotonicity(&self, sample_box: SampleBox, pairs: usize, seed: u64) -> Result<f64> {
        if let Some(q) = &self.quadratic {
            let (qm, _) = q.affine_parts();
            let sym = (&qm + qm.transpose()) * 0.5;
            return Ok(min_symmetric_eigenvalue(&sym));
        }
        self.sampled_pair_stat(sample_box, pairs, seed, Fold::Min, |game, x, z, px, pz| {
            let mut num = 0.0;
            let mut den = 0.0;
            game.pseudo_gradient_into(x, px);
            game.pseudo_gradient_into(z, pz);
            for k in 0..x.len() {
                let dx = x[k] - z[k];
                num += dx * (px[k] - pz[k]);
                den += dx * dx;
            }
            if den < 1e-20 {
                None
            } else {
                Some(num / den)
            }
        })
    }

    /// Lipschitz bound of player `i`'s partial gradient as a map of the full
    /// profile. Exact operator norm of the player's row block of Q for
    /// quadratic games; sampled ratio otherwise.
    pub fn estimate_lipschitz(
        &self,
        player: usize,
        sample_box: SampleBox,
        pairs: usize,
        seed: u64,
    ) -> Result<f64> {
        if let Some(q) = &self.quadratic {
            let (qm, _) = q.affine_parts();
            let rows = qm.rows(self.offsets[player], self.dims[player]).into_owned();
            return Ok(operator_norm(&rows));
        }
        let d = self.dims[player];
        self.sampled_pair_stat(sample_box, pairs, seed, Fold::Max, move |game, x, z, px, pz| {
            game.partial_gradient_into(player, x, &mut px[..d]);
            game.partial_gradient_into(player, z, &mut pz[..d]);
            let num = px[..d]
                .iter()
                .zip(&pz[..d])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den = x
                .iter()
                .zip(z)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if den < 1e-10 {
                None
            } else {
                Some(num / den)
            }
        })
    }

    fn estimate_stacked_lipschitz(&self, sample_box: SampleBox, pairs: usize, seed: u64) -> Result<f64> {
        if let Some(q) = &self.quadratic {
            let (qm, _) = q.affine_parts();
            return Ok(operator_norm(&qm));
        }
        self.sampled_pair_stat(sample_box, pairs, seed, Fold::Max, |game, x, z, px, pz| {
            game.pseudo_gradient_into(x, px);
            game.pseudo_gradient_into(z, pz);
            let num = px
                .iter()
                .zip(pz.iter())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den = x
                .iter()
                .zip(z)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            if den < 1e-10 {
                None
            } else {
                Some(num / den)
            }
        })
    }

    /// Draws `pairs` (x, z) pairs from the box and folds `stat` over them.
    /// Each pair derives its own RNG from (seed, index), so results do not
    /// depend on evaluation order and the parallel and sequential paths agree
    /// bit for bit.
    fn sampled_pair_stat<F>(
        &self,
        sample_box: SampleBox,
        pairs: usize,
        seed: u64,
        fold: Fold,
        stat: F,
    ) -> Result<f64>
    where
        F: Fn(&GameDefinition, &[f64], &[f64], &mut [f64], &mut [f64]) -> Option<f64> + Sync,
    {
        if pairs == 0 {
            return Err(Error::config("sample_pairs", "need at least one sample pair"));
        }
        let eval_one = |idx: u64| -> Option<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ idx.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let mut x = vec![0.0; self.total];
            let mut z = vec![0.0; self.total];
            for v in x.iter_mut().chain(z.iter_mut()) {
                *v = rng.random_range(sample_box.lo..sample_box.hi);
            }
            let mut px = vec![0.0; self.total];
            let mut pz = vec![0.0; self.total];
            stat(self, &x, &z, &mut px, &mut pz)
        };
        let folded = fold_samples(pairs as u64, fold, &eval_one);
        folded.ok_or_else(|| Error::config("sample_box", "all sampled pairs were degenerate"))
    }
}

#[derive(Clone, Copy)]
enum Fold {
    Min,
    Max,
}

#[cfg(feature = "parallel")]
fn fold_samples(pairs: u64, fold: Fold, eval: &(dyn Fn(u64) -> Option<f64> + Sync)) -> Option<f64> {
    use rayon::prelude::*;
    (0..pairs)
        .into_par_iter()
        .filter_map(eval)
        .reduce_with(|a, b| match fold {
            Fold::Min => a.min(b),
            Fold::Max => a.max(b),
        })
}

#[cfg(not(feature = "parallel"))]
fn fold_samples(pairs: u64, fold: Fold, eval: &(dyn Fn(u64) -> Option<f64> + Sync)) -> Option<f64> {
    (0..pairs).filter_map(eval).reduce(|a, b| match fold {
        Fold::Min => a.min(b),
        Fold::Max => a.max(b),
    })
}

fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

fn operator_norm(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Seven players on the plane minimizing quadratic position costs plus
/// squared-distance connectivity terms. Its equilibrium places every player
/// at (−1/4, −1).
pub fn connectivity_game() -> GameDefinition {
    let n = 7;
    let mut self_matrices = Vec::with_capacity(n);
    let mut linear_terms = Vec::with_capacity(n);
    let mut constants = Vec::with_capacity(n);
    for p in 1..=n {
        let w = p as f64;
        self_matrices.push(DMatrix::from_diagonal(&DVector::from_vec(vec![
            2.0 * w,
            w,
        ])));
        linear_terms.push(DVector::from_vec(vec![w, 2.0 * w]));
        constants.push(w * w);
    }
    let couplings = vec![
        (0, 1),
        (1, 2),
        (2, 0),
        (3, 2),
        (4, 0),
        (4, 5),
        (5, 2),
        (5, 0),
        (6, 1),
    ];
    let quad = QuadraticGame::new(self_matrices, linear_terms, constants, couplings)
        .expect("builtin game is well-formed");
    GameDefinition::from_quadratic(quad)
        .with_analytic_ne([-0.25, -1.0].repeat(n))
        .expect("builtin equilibrium has the right dimension")
}

static REGISTRY: OnceLock<Mutex<HashMap<String, GameDefinition>>> = OnceLock::new();

fn registry() -> &'static Mutex<HashMap<String, GameDefinition>> {
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Registers a game under a name usable from scenario files. Re-registering
/// a name replaces the previous definition.
pub fn register_game(name: impl Into<String>, game: GameDefinition) {
    registry().lock().unwrap().insert(name.into(), game);
}

/// Looks up a named game: builtin names first, then user registrations.
pub fn lookup_game(name: &str) -> Option<GameDefinition> {
    if name == "connectivity" {
        return Some(connectivity_game());
    }
    registry().lock().unwrap().get(name).cloned()
}
