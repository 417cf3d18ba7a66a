//! Declarative scenario files: schema, validation, overrides, and the
//! built-in experiment roster.
//!
//! A scenario is one TOML document. Hidden plant parameters live under
//! `players.<i>.hidden` so tooling can verify the regulator path never reads
//! them. Reference and belief states always start at zero; only actions and
//! velocities take initial values.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use serde::Deserialize;
use toml::Value;

use crate::error::{Error, Result};
use crate::estimator::{FixedGains, GainIndexing};
use crate::game::{lookup_game, GameDefinition, QuadraticGame};
use crate::network::CommGraph;
use crate::phi::{Phi, PhiRegistry, PhiSpec};
use crate::plants::{HiddenParams, Plant, PlantKind};
use crate::regulators::{Nussbaum, NussbaumKind, RegulatorFamily};
use crate::sim::{ClosedLoop, EstimatorMode, IntegrationParams, PlayerSim, WarmupParams};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub game: GameConfig,
    #[serde(default)]
    pub graph: Option<GraphConfig>,
    #[serde(default)]
    pub estimator: EstimatorConfig,
    #[serde(default)]
    pub integration: IntegrationConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub players: BTreeMap<String, PlayerConfig>,
    #[serde(default)]
    pub nussbaum: NussbaumConfig,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameConfig {
    /// A game registered programmatically, looked up by name.
    Named { name: String },
    /// Fully declarative quadratic game. Couplings are 1-based (owner,
    /// neighbor) pairs.
    Quadratic {
        self_matrices: Vec<Vec<Vec<f64>>>,
        linear_terms: Vec<Vec<f64>>,
        #[serde(default)]
        constants: Option<Vec<f64>>,
        #[serde(default)]
        couplings: Vec<(usize, usize)>,
        #[serde(default)]
        analytic_ne: Option<Vec<f64>>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphConfig {
    #[serde(default)]
    pub n: Option<usize>,
    /// 1-based `[from, to]` or `[from, to, weight]` entries.
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub directed: bool,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(untagged)]
pub enum EdgeSpec {
    Pair(usize, usize),
    Weighted(usize, usize, f64),
}

#[derive(Clone, Copy, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorModeConfig {
    #[default]
    Fixed,
    Adaptive,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    #[serde(default)]
    pub mode: EstimatorModeConfig,
    /// Fixed mode only: the shared gain scale.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Fixed mode only: 1-based `[observer, target, scale]` overrides on the
    /// all-ones pair table.
    #[serde(default)]
    pub delta_bar: Vec<(usize, usize, f64)>,
    /// Adaptive mode only.
    #[serde(default)]
    pub gain_indexing: Option<GainIndexing>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegrationConfig {
    #[serde(rename = "T", default = "default_horizon")]
    pub t_final: f64,
    #[serde(default = "default_step")]
    pub h: f64,
    #[serde(default = "default_stride")]
    pub stride: usize,
    /// Refined opening windows for runs whose early transients are far
    /// stiffer than the rest of the horizon, e.g.
    /// `warmup = [{ T = 0.05, h = 1e-7 }, { T = 0.7, h = 2e-6 }]`.
    #[serde(default)]
    pub warmup: Vec<WarmupWindow>,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WarmupWindow {
    #[serde(rename = "T")]
    pub t_end: f64,
    pub h: f64,
}

fn default_horizon() -> f64 {
    100.0
}

fn default_step() -> f64 {
    1e-3
}

fn default_stride() -> usize {
    10
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            t_final: default_horizon(),
            h: default_step(),
            stride: default_stride(),
            warmup: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    /// Stacked initial actions, player-major. Defaults to zeros.
    #[serde(default)]
    pub x: Option<Vec<f64>>,
    /// Stacked initial velocities; entries for players without a velocity
    /// state must be zero.
    #[serde(default)]
    pub v: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NussbaumConfig {
    #[serde(default)]
    pub kind: NussbaumKind,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerConfig {
    pub controller: RegulatorFamily,
    pub plant: PlantKind,
    #[serde(default)]
    pub phi: PhiSpec,
    #[serde(default)]
    pub phi2: Option<PhiSpec>,
    pub hidden: HiddenConfig,
}

/// True plant parameters. Single-stage plants take `b`/`theta`; the general
/// two-stage plant takes `b1`/`theta1`/`b2`/`theta2`. Unset `theta` entries
/// default to ones.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HiddenConfig {
    #[serde(default)]
    pub b: Option<Vec<f64>>,
    #[serde(default)]
    pub theta: Option<Vec<f64>>,
    #[serde(default)]
    pub b1: Option<Vec<f64>>,
    #[serde(default)]
    pub theta1: Option<Vec<f64>>,
    #[serde(default)]
    pub b2: Option<Vec<f64>>,
    #[serde(default)]
    pub theta2: Option<Vec<f64>>,
}

/// A validated, runnable scenario.
#[derive(Debug)]
pub struct BuiltScenario {
    pub name: String,
    pub closed_loop: ClosedLoop,
    pub initial_state: Vec<f64>,
    pub params: IntegrationParams,
    /// Equilibrium the run is scored against: the declared one when present,
    /// otherwise solved from the game definition.
    pub x_star: Vec<f64>,
    /// The configuration as parsed (after overrides), echoed into summaries.
    pub raw: Value,
    /// FNV-1a hash of the serialized configuration.
    pub config_hash: u64,
}

/// Load a scenario from a file path or a `builtin:<name>` reference, apply
/// dotted-path overrides in order, validate, and build.
pub fn load(source: &str, overrides: &[(String, String)], registry: &PhiRegistry) -> Result<BuiltScenario> {
    let text = if let Some(name) = source.strip_prefix("builtin:") {
        builtin_toml(name).ok_or_else(|| Error::UnknownName {
            kind: "builtin scenario",
            name: name.to_string(),
        })?
    } else {
        std::fs::read_to_string(source)?
    };
    let mut value = parse_document(&text)?;
    for (key, raw) in overrides {
        apply_override(&mut value, key, raw)?;
    }
    let config: ScenarioConfig = value
        .clone()
        .try_into()
        .map_err(|e| Error::config("config", format!("{e}")))?;
    build(&config, value, registry)
}

/// Parse TOML document text into a value tree.
pub fn parse_document(text: &str) -> Result<Value> {
    let table: toml::Table = text
        .parse()
        .map_err(|e| Error::config("config", format!("{e}")))?;
    Ok(Value::Table(table))
}

/// Set `path` (dotted table keys) to the TOML value parsed from `raw`,
/// creating intermediate tables as needed. A value that does not parse as
/// TOML is taken as a bare string.
pub fn apply_override(value: &mut Value, path: &str, raw: &str) -> Result<()> {
    if path.is_empty() {
        return Err(Error::config("--set", "override key must not be empty"));
    }
    let parsed: Value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("wrapper key is present"),
        Err(_) => Value::String(raw.to_string()),
    };
    let mut cursor = value;
    let parts: Vec<&str> = path.split('.').collect();
    for part in &parts[..parts.len() - 1] {
        let table = cursor.as_table_mut().ok_or_else(|| {
            Error::config(path, format!("`{part}` is not a table, cannot descend into it"))
        })?;
        cursor = table
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Default::default()));
    }
    let leaf = parts[parts.len() - 1];
    let table = cursor
        .as_table_mut()
        .ok_or_else(|| Error::config(path, "parent of the override key is not a table"))?;
    table.insert(leaf.to_string(), parsed);
    Ok(())
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn build_game(config: &GameConfig) -> Result<GameDefinition> {
    match config {
        GameConfig::Named { name } => lookup_game(name).ok_or_else(|| Error::UnknownName {
            kind: "game",
            name: name.clone(),
        }),
        GameConfig::Quadratic {
            self_matrices,
            linear_terms,
            constants,
            couplings,
            analytic_ne,
        } => {
            let mut matrices = Vec::with_capacity(self_matrices.len());
            for (i, rows) in self_matrices.iter().enumerate() {
                let nrows = rows.len();
                let ncols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != ncols) {
                    return Err(Error::config(
                        format!("game.self_matrices.{}", i + 1),
                        "rows have unequal lengths",
                    ));
                }
                matrices.push(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]));
            }
            let linear: Vec<DVector<f64>> = linear_terms
                .iter()
                .map(|v| DVector::from_column_slice(v))
                .collect();
            let constants = constants
                .clone()
                .unwrap_or_else(|| vec![0.0; matrices.len()]);
            let mut pairs = Vec::with_capacity(couplings.len());
            for (idx, &(a, b)) in couplings.iter().enumerate() {
                if a == 0 || b == 0 {
                    return Err(Error::config(
                        format!("game.couplings.{idx}"),
                        "players are numbered from 1",
                    ));
                }
                pairs.push((a - 1, b - 1));
            }
            let quadratic = QuadraticGame::new(matrices, linear, constants, pairs)?;
            let game = GameDefinition::from_quadratic(quadratic);
            match analytic_ne {
                Some(ne) => game.with_analytic_ne(ne.clone()),
                None => Ok(game),
            }
        }
    }
}

fn build_graph(config: Option<&GraphConfig>, n: usize) -> Result<CommGraph> {
    let graph = match config {
        None => CommGraph::cycle(n)?,
        Some(g) => {
            if let Some(gn) = g.n {
                if gn != n {
                    return Err(Error::config(
                        "graph.n",
                        format!("graph has {gn} nodes but the game has {n} players"),
                    ));
                }
            }
            let mut edges = Vec::with_capacity(g.edges.len());
            for (idx, e) in g.edges.iter().enumerate() {
                let (from, to, w) = match *e {
                    EdgeSpec::Pair(a, b) => (a, b, 1.0),
                    EdgeSpec::Weighted(a, b, w) => (a, b, w),
                };
                if from == 0 || to == 0 {
                    return Err(Error::config(
                        format!("graph.edges.{idx}"),
                        "players are numbered from 1",
                    ));
                }
                edges.push((from - 1, to - 1, w));
            }
            CommGraph::new(n, &edges, g.directed)?
        }
    };
    if !graph.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(graph)
}

fn build_estimator_mode(config: &EstimatorConfig, n: usize) -> Result<EstimatorMode> {
    match config.mode {
        EstimatorModeConfig::Fixed => {
            if config.gain_indexing.is_some() {
                return Err(Error::config(
                    "estimator.gain_indexing",
                    "gain indexing only applies to adaptive mode",
                ));
            }
            let delta = config.delta.unwrap_or(10.0);
            let mut delta_bar = DMatrix::from_element(n, n, 1.0);
            for (idx, &(i, j, scale)) in config.delta_bar.iter().enumerate() {
                let key = format!("estimator.delta_bar.{idx}");
                if i == 0 || j == 0 || i > n || j > n {
                    return Err(Error::config(
                        key,
                        format!("pair ({i}, {j}) is out of range for {n} players"),
                    ));
                }
                if !(scale.is_finite() && scale > 0.0) {
                    return Err(Error::config(key, "pair scale must be positive and finite"));
                }
                delta_bar[(i - 1, j - 1)] = scale;
            }
            Ok(EstimatorMode::Fixed(FixedGains { delta, delta_bar }))
        }
        EstimatorModeConfig::Adaptive => {
            if config.delta.is_some() {
                return Err(Error::config(
                    "estimator.delta",
                    "adaptive mode grows its gains online and takes no shared gain",
                ));
            }
            if !config.delta_bar.is_empty() {
                return Err(Error::config(
                    "estimator.delta_bar",
                    "pair scales only apply to fixed mode",
                ));
            }
            Ok(EstimatorMode::Adaptive(config.gain_indexing.unwrap_or_default()))
        }
    }
}

fn check_phi_shape(key: &str, spec: &PhiSpec, has_velocity: bool, dim: usize) -> Result<()> {
    if matches!(spec, PhiSpec::ComponentLinear { .. }) && (!has_velocity || dim != 2) {
        return Err(Error::config(
            key,
            "the cross pattern needs a 2-component action with a velocity state",
        ));
    }
    Ok(())
}

fn build_players(
    config: &ScenarioConfig,
    game: &GameDefinition,
    registry: &PhiRegistry,
) -> Result<Vec<PlayerSim>> {
    if config.players.is_empty() {
        if config.initial.x.is_some() || config.initial.v.is_some() {
            return Err(Error::config(
                "initial.x",
                "initial actions given but the scenario has no players; references and beliefs always start at zero",
            ));
        }
        return Ok(Vec::new());
    }
    let n = game.n_players();
    let mut slots: Vec<Option<&PlayerConfig>> = vec![None; n];
    for (key, pc) in &config.players {
        let idx: usize = key.parse().map_err(|_| {
            Error::config(
                format!("players.{key}"),
                "player keys are 1-based integers",
            )
        })?;
        if idx == 0 || idx > n {
            return Err(Error::config(
                format!("players.{key}"),
                format!("player index out of range for {n} players"),
            ));
        }
        if slots[idx - 1].replace(pc).is_some() {
            return Err(Error::config(
                format!("players.{key}"),
                "player configured twice",
            ));
        }
    }
    if let Some(missing) = slots.iter().position(Option::is_none) {
        return Err(Error::config(
            "players",
            format!(
                "player {} is missing; configure all {n} players or none",
                missing + 1
            ),
        ));
    }

    let mut players = Vec::with_capacity(n);
    for (i, slot) in slots.into_iter().enumerate() {
        let pc = slot.expect("checked above");
        let key = format!("players.{}", i + 1);
        let d = game.dim(i);
        let has_velocity = pc.plant.has_velocity();
        check_phi_shape(&format!("{key}.phi"), &pc.phi, has_velocity, d)?;
        if let Some(spec) = &pc.phi2 {
            check_phi_shape(&format!("{key}.phi2"), spec, has_velocity, d)?;
        }
        let phi1 = Phi::resolve(&pc.phi, registry)?;
        let phi2 = pc
            .phi2
            .as_ref()
            .map(|spec| Phi::resolve(spec, registry))
            .transpose()?;
        let h = &pc.hidden;
        let hidden = match pc.plant {
            PlantKind::FirstOrder | PlantKind::SecondOrderChain => {
                if h.b1.is_some() || h.b2.is_some() || h.theta1.is_some() || h.theta2.is_some() {
                    return Err(Error::config(
                        format!("{key}.hidden"),
                        "single-stage plants take `b` and `theta` only",
                    ));
                }
                let b = h.b.clone().ok_or_else(|| {
                    Error::config(format!("{key}.hidden.b"), "control gains are required")
                })?;
                let theta = h.theta.clone().unwrap_or_else(|| vec![1.0; d]);
                HiddenParams::single_stage(b, theta)
            }
            PlantKind::GeneralSecondOrder => {
                if h.b.is_some() || h.theta.is_some() {
                    return Err(Error::config(
                        format!("{key}.hidden"),
                        "the two-stage plant takes `b1`/`theta1`/`b2`/`theta2`",
                    ));
                }
                let b1 = h.b1.clone().ok_or_else(|| {
                    Error::config(format!("{key}.hidden.b1"), "stage-one gains are required")
                })?;
                let b2 = h.b2.clone().ok_or_else(|| {
                    Error::config(format!("{key}.hidden.b2"), "stage-two gains are required")
                })?;
                let theta1 = h.theta1.clone().unwrap_or_else(|| vec![1.0; d]);
                let theta2 = h.theta2.clone().unwrap_or_else(|| vec![1.0; d]);
                HiddenParams::two_stage(b1, theta1, b2, theta2)
            }
        };
        let plant = Plant::new(pc.plant, d, hidden, phi1, phi2, &key)?;
        players.push(PlayerSim {
            family: pc.controller,
            plant,
        });
    }
    Ok(players)
}

fn build_initial_state(
    config: &InitialConfig,
    closed_loop: &ClosedLoop,
) -> Result<Vec<f64>> {
    let layout = closed_loop.layout();
    let game = closed_loop.game();
    let total = game.total_dim();
    let mut parts = layout.unpack(&vec![0.0; layout.total_len()]);
    if closed_loop.players().is_empty() {
        return layout.pack(&parts);
    }
    let x0 = match &config.x {
        Some(x) => {
            if x.len() != total {
                return Err(Error::Dimension {
                    context: "initial.x".into(),
                    expected: total,
                    actual: x.len(),
                });
            }
            x.clone()
        }
        None => vec![0.0; total],
    };
    let v0 = match &config.v {
        Some(v) => {
            if v.len() != total {
                return Err(Error::Dimension {
                    context: "initial.v".into(),
                    expected: total,
                    actual: v.len(),
                });
            }
            v.clone()
        }
        None => vec![0.0; total],
    };
    for i in 0..game.n_players() {
        let off = game.offset(i);
        let d = game.dim(i);
        parts.x[i].copy_from_slice(&x0[off..off + d]);
        match &mut parts.v[i] {
            Some(v) => v.copy_from_slice(&v0[off..off + d]),
            None => {
                if v0[off..off + d].iter().any(|v| *v != 0.0) {
                    return Err(Error::config(
                        "initial.v",
                        format!("player {} has no velocity state; its entries must be zero", i + 1),
                    ));
                }
            }
        }
    }
    layout.pack(&parts)
}

/// Validate and assemble a parsed configuration. `raw` is the same document
/// as a TOML value; it is echoed (redacted) into summaries and hashed for
/// reproducibility checks.
pub fn build(config: &ScenarioConfig, raw: Value, registry: &PhiRegistry) -> Result<BuiltScenario> {
    let game = build_game(&config.game)?;
    let n = game.n_players();
    let graph = build_graph(config.graph.as_ref(), n)?;
    let mode = build_estimator_mode(&config.estimator, n)?;
    let players = build_players(config, &game, registry)?;
    let nussbaum = Nussbaum::new(config.nussbaum.kind);
    let x_star = match game.analytic_ne() {
        Some(ne) => ne.to_vec(),
        None => game.solve_nash()?,
    };
    let closed_loop = ClosedLoop::new(game, graph, players, mode, nussbaum)?;
    let params = IntegrationParams {
        t_final: config.integration.t_final,
        step: config.integration.h,
        stride: config.integration.stride,
        warmup: config
            .integration
            .warmup
            .iter()
            .map(|w| WarmupParams {
                t_end: w.t_end,
                step: w.h,
            })
            .collect(),
    };
    params.validate()?;
    let initial_state = build_initial_state(&config.initial, &closed_loop)?;
    let serialized = toml::to_string(&raw)
        .map_err(|e| Error::config("config", format!("cannot serialize: {e}")))?;
    Ok(BuiltScenario {
        name: config
            .name
            .clone()
            .unwrap_or_else(|| "scenario".to_string()),
        closed_loop,
        initial_state,
        params,
        x_star,
        raw,
        config_hash: fnv1a(serialized.as_bytes()),
    })
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "scenario_A",
    "scenario_B",
    "scenario_C",
    "scenario_D",
    "estimator_only",
    "scenario_A_flipped",
];

/// TOML text of a built-in scenario. `scenario_A_flipped` is derived from
/// `scenario_A` by negating every control gain, and nothing else.
pub fn builtin_toml(name: &str) -> Option<String> {
    match name {
        "scenario_A" => Some(SCENARIO_A.to_string()),
        "scenario_B" => Some(SCENARIO_B.to_string()),
        "scenario_C" => Some(SCENARIO_C.to_string()),
        "scenario_D" => Some(SCENARIO_D.to_string()),
        "estimator_only" => Some(ESTIMATOR_ONLY.to_string()),
        "scenario_A_flipped" => Some(flipped_scenario_a()),
        _ => None,
    }
}

fn flipped_scenario_a() -> String {
    let mut value = parse_document(SCENARIO_A).expect("builtin scenario parses");
    let table = value.as_table_mut().expect("builtin is a table");
    table.insert(
        "name".to_string(),
        Value::String("scenario_A_flipped".to_string()),
    );
    let players = table
        .get_mut("players")
        .and_then(Value::as_table_mut)
        .expect("builtin has players");
    for (_, player) in players.iter_mut() {
        let gains = player
            .get_mut("hidden")
            .and_then(|h| h.get_mut("b"))
            .and_then(Value::as_array_mut)
            .expect("builtin players carry `b` gains");
        for entry in gains.iter_mut() {
            let flipped = -entry.as_float().expect("gains are floats");
            *entry = Value::Float(flipped);
        }
    }
    toml::to_string(&value).expect("builtin round-trips")
}

const SCENARIO_A: &str = r#"
name = "scenario_A"

[game]
kind = "named"
name = "connectivity"

[estimator]
mode = "fixed"
delta = 10.0

[integration]
T = 300.0
h = 5e-4
stride = 200

[initial]
x = [-5.0, 3.0, -4.0, -6.0, 1.0, 8.0, 0.0, -8.0, -1.0, 10.0, 1.0, 2.0, 3.0, 0.0]

[players.1]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 1.0 }
hidden = { b = [3.0, 3.0], theta = [1.0, 1.0] }

[players.2]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 2.0 }
hidden = { b = [5.0, 5.0], theta = [1.0, 1.0] }

[players.3]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 3.0 }
hidden = { b = [-2.0, -2.0], theta = [1.0, 1.0] }

[players.4]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 4.0 }
hidden = { b = [1.0, 2.0], theta = [1.0, 1.0] }

[players.5]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 5.0 }
hidden = { b = [-3.0, -3.0], theta = [1.0, 1.0] }

[players.6]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 6.0 }
hidden = { b = [-1.0, -1.0], theta = [1.0, 1.0] }

[players.7]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 7.0 }
hidden = { b = [2.0, 2.0], theta = [1.0, 1.0] }
"#;

const SCENARIO_B: &str = r#"
name = "scenario_B"

[game]
kind = "named"
name = "connectivity"

[estimator]
mode = "fixed"
delta = 10.0

[integration]
T = 200.0
h = 1e-3
stride = 100

[initial]
x = [-5.0, 3.0, -4.0, -6.0, 1.0, 8.0, 0.0, -8.0, -1.0, 10.0, 1.0, 2.0, 3.0, 0.0]

[players.1]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 1.0 }
hidden = { b = [3.0, 3.0], theta = [1.0, 1.0] }

[players.2]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 2.0 }
hidden = { b = [5.0, 5.0], theta = [1.0, 1.0] }

[players.3]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 3.0 }
hidden = { b = [-2.0, -2.0], theta = [1.0, 1.0] }

[players.4]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 4.0 }
hidden = { b = [1.0, 2.0], theta = [1.0, 1.0] }

[players.5]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 5.0 }
hidden = { b = [-3.0, -3.0], theta = [1.0, 1.0] }

[players.6]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 6.0 }
hidden = { b = [-1.0, -1.0], theta = [1.0, 1.0] }

[players.7]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 7.0 }
hidden = { b = [2.0, 2.0], theta = [1.0, 1.0] }
"#;

const SCENARIO_C: &str = r#"
name = "scenario_C"

[game]
kind = "named"
name = "connectivity"

[estimator]
mode = "fixed"
delta = 10.0

[integration]
T = 150.0
h = 1e-4
stride = 1000
warmup = [{ T = 0.05, h = 1e-7 }, { T = 0.7, h = 2e-6 }]

[initial]
x = [-5.0, 3.0, -4.0, -6.0, 1.0, 8.0, 0.0, -8.0, -1.0, 10.0, 1.0, 2.0, 3.0, 0.0]

[players.1]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 1.0 }
hidden = { b = [3.0, 3.0], theta = [1.0, 1.0] }

[players.2]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 2.0 }
hidden = { b = [5.0, 5.0], theta = [1.0, 1.0] }

[players.3]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 3.0 }
hidden = { b = [-2.0, -2.0], theta = [1.0, 1.0] }

[players.4]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 4.0 }
hidden = { b = [1.0, 2.0], theta = [1.0, 1.0] }

[players.5]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 5.0 }
hidden = { b = [-3.0, -3.0], theta = [1.0, 1.0] }

[players.6]
controller = "second_order"
plant = "second_order_chain"
phi = { kind = "linear", coeff = 6.0 }
hidden = { b = [-1.0, -1.0], theta = [1.0, 1.0] }

[players.7]
controller = "backstepping"
plant = "general_second_order"
phi = { kind = "linear", coeff = 7.0 }
phi2 = { kind = "component_linear", coeff = 7.0 }
hidden = { b1 = [2.0, 2.0], theta1 = [1.0, 1.0], b2 = [2.0, 2.0], theta2 = [1.0, 1.0] }
"#;

const SCENARIO_D: &str = r#"
name = "scenario_D"

[game]
kind = "named"
name = "connectivity"

[estimator]
mode = "adaptive"
gain_indexing = "per_component"

[integration]
T = 200.0
h = 5e-4
stride = 200

[initial]
x = [-5.0, 3.0, -4.0, -6.0, 1.0, 8.0, 0.0, -8.0, -1.0, 10.0, 1.0, 2.0, 3.0, 0.0]

[players.1]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 1.0 }
hidden = { b = [3.0, 3.0], theta = [1.0, 1.0] }

[players.2]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 2.0 }
hidden = { b = [5.0, 5.0], theta = [1.0, 1.0] }

[players.3]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 3.0 }
hidden = { b = [-2.0, -2.0], theta = [1.0, 1.0] }

[players.4]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 4.0 }
hidden = { b = [1.0, 2.0], theta = [1.0, 1.0] }

[players.5]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 5.0 }
hidden = { b = [-3.0, -3.0], theta = [1.0, 1.0] }

[players.6]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 6.0 }
hidden = { b = [-1.0, -1.0], theta = [1.0, 1.0] }

[players.7]
controller = "first_order"
plant = "first_order"
phi = { kind = "linear", coeff = 7.0 }
hidden = { b = [2.0, 2.0], theta = [1.0, 1.0] }
"#;

const ESTIMATOR_ONLY: &str = r#"
name = "estimator_only"

[game]
kind = "named"
name = "connectivity"

[estimator]
mode = "fixed"
delta = 10.0

[integration]
T = 40.0
h = 1e-3
stride = 10
"#;
