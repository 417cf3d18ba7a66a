//! Known plant nonlinearities φ.
//!
//! The regressor φ multiplying the uncertain parameter θ is public model
//! structure: both the plant and the regulator evaluate the same φ, while θ
//! (and the control gain b) stay hidden from the regulator. Values are
//! produced per scalar channel `c` of a player's action.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative φ selector as it appears in scenario files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PhiSpec {
    /// φ ≡ 0 (no parametric uncertainty enters the channel).
    Zero,
    /// φ_c(x) = coeff · x_c, with ∂φ_c/∂x_c = coeff.
    Linear { coeff: f64 },
    /// Two-channel cross pattern: φ_0 = coeff · x_1, φ_1 = coeff · v_1.
    /// Requires a 2-component action and a velocity state.
    ComponentLinear { coeff: f64 },
    /// Programmatically registered nonlinearity, looked up by name.
    Named { name: String },
}

impl Default for PhiSpec {
    fn default() -> Self {
        PhiSpec::Zero
    }
}

/// Value and own-channel derivative callbacks for a custom nonlinearity.
///
/// Arguments are the player's full action `x`, its velocity `v` when the
/// plant has one, and the channel index `c`.
pub struct PhiFn {
    pub value: Box<dyn Fn(&[f64], Option<&[f64]>, usize) -> f64 + Send + Sync>,
    /// ∂φ_c/∂x_c. Only consulted by the backstepping regulator's first stage.
    pub dx: Box<dyn Fn(&[f64], Option<&[f64]>, usize) -> f64 + Send + Sync>,
}

/// Name → callback table for custom nonlinearities.
#[derive(Default)]
pub struct PhiRegistry {
    entries: HashMap<String, Arc<PhiFn>>,
}

impl PhiRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn register(&mut self, name: impl Into<String>, phi: PhiFn) {
        self.entries.insert(name.into(), Arc::new(phi));
    }

    pub fn get(&self, name: &str) -> Option<Arc<PhiFn>> {
        self.entries.get(name).cloned()
    }
}

/// A resolved, evaluatable nonlinearity.
#[derive(Clone)]
pub enum Phi {
    Zero,
    Linear(f64),
    ComponentLinear(f64),
    Custom(Arc<PhiFn>),
}

impl Phi {
    pub fn resolve(spec: &PhiSpec, registry: &PhiRegistry) -> Result<Phi> {
        Ok(match spec {
            PhiSpec::Zero => Phi::Zero,
            PhiSpec::Linear { coeff } => Phi::Linear(*coeff),
            PhiSpec::ComponentLinear { coeff } => Phi::ComponentLinear(*coeff),
            PhiSpec::Named { name } => Phi::Custom(registry.get(name).ok_or_else(|| {
                Error::UnknownName {
                    kind: "nonlinearity",
                    name: name.clone(),
                }
            })?),
        })
    }

    /// φ_c(x, v).
    pub fn value(&self, x: &[f64], v: Option<&[f64]>, c: usize) -> f64 {
        match self {
            Phi::Zero => 0.0,
            Phi::Linear(coeff) => coeff * x[c],
            Phi::ComponentLinear(coeff) => match c {
                0 => coeff * x[1],
                1 => coeff * v.expect("component_linear requires a velocity state")[1],
                _ => unreachable!("component_linear is validated to 2-component actions"),
            },
            Phi::Custom(f) => (f.value)(x, v, c),
        }
    }

    /// ∂φ_c/∂x_c at (x, v). For the cross pattern this is exactly zero: its
    /// channels depend on the other channel's state, never their own.
    pub fn dx(&self, x: &[f64], v: Option<&[f64]>, c: usize) -> f64 {
        match self {
            Phi::Zero => 0.0,
            Phi::Linear(coeff) => *coeff,
            Phi::ComponentLinear(_) => 0.0,
            Phi::Custom(f) => (f.dx)(x, v, c),
        }
    }
}

impl std::fmt::Debug for Phi {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phi::Zero => write!(f, "Phi::Zero"),
            Phi::Linear(c) => write!(f, "Phi::Linear({c})"),
            Phi::ComponentLinear(c) => write!(f, "Phi::ComponentLinear({c})"),
            Phi::Custom(_) => write!(f, "Phi::Custom(..)"),
        }
    }
}
