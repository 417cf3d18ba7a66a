//! Plant models: the true dynamics generating each player's action.
//!
//! The control gains `b` and uncertainty parameters `θ` are *hidden*: they
//! drive the simulated physics but are kept private to this module so no
//! regulator code can read them. Controllers see only states, references and
//! the public nonlinearity values φ. Gains are per-component (diagonal), all
//! entries nonzero with arbitrary unknown sign.

use crate::error::{Error, Result};
use crate::phi::Phi;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlantKind {
    /// ẋ = b∘u + φ(x)·θ
    FirstOrder,
    /// ẋ = v, v̇ = b∘u + φ(x)·θ
    SecondOrderChain,
    /// ẋ = b₁∘v + φ₁(x)·θ₁, v̇ = b₂∘u + φ₂(x, v)·θ₂
    GeneralSecondOrder,
}

impl PlantKind {
    pub fn has_velocity(self) -> bool {
        !matches!(self, PlantKind::FirstOrder)
    }
}

/// Hidden true parameters. Private fields: only the plant evaluator reads
/// them.
#[derive(Clone, Debug, PartialEq)]
pub struct HiddenParams {
    b1: Vec<f64>,
    theta1: Vec<f64>,
    b2: Option<Vec<f64>>,
    theta2: Option<Vec<f64>>,
}

impl HiddenParams {
    pub fn single_stage(b: Vec<f64>, theta: Vec<f64>) -> Self {
        HiddenParams {
            b1: b,
            theta1: theta,
            b2: None,
            theta2: None,
        }
    }

    pub fn two_stage(b1: Vec<f64>, theta1: Vec<f64>, b2: Vec<f64>, theta2: Vec<f64>) -> Self {
        HiddenParams {
            b1,
            theta1,
            b2: Some(b2),
            theta2: Some(theta2),
        }
    }
}

/// One player's plant: kind, dimension, hidden parameters and the public
/// nonlinearities it shares with the regulator.
#[derive(Clone, Debug)]
pub struct Plant {
    kind: PlantKind,
    dim: usize,
    hidden: HiddenParams,
    phi1: Phi,
    phi2: Option<Phi>,
}

impl Plant {
    pub fn new(
        kind: PlantKind,
        dim: usize,
        hidden: HiddenParams,
        phi1: Phi,
        phi2: Option<Phi>,
        config_key: &str,
    ) -> Result<Self> {
        let check_gain = |name: &str, b: &[f64]| -> Result<()> {
            if b.len() != dim {
                return Err(Error::config(
                    format!("{config_key}.hidden.{name}"),
                    format!("expected {dim} entries, got {}", b.len()),
                ));
            }
            if let Some(pos) = b.iter().position(|v| !v.is_finite() || *v == 0.0) {
                return Err(Error::config(
                    format!("{config_key}.hidden.{name}"),
                    format!("component {} must be finite and nonzero", pos + 1),
                ));
            }
            Ok(())
        };
        let check_theta = |name: &str, t: &[f64]| -> Result<()> {
            if t.len() != dim {
                return Err(Error::config(
                    format!("{config_key}.hidden.{name}"),
                    format!("expected {dim} entries, got {}", t.len()),
                ));
            }
            if t.iter().any(|v| !v.is_finite()) {
                return Err(Error::config(
                    format!("{config_key}.hidden.{name}"),
                    "entries must be finite",
                ));
            }
            Ok(())
        };
        match kind {
            PlantKind::FirstOrder | PlantKind::SecondOrderChain => {
                check_gain("b", &hidden.b1)?;
                check_theta("theta", &hidden.theta1)?;
                if hidden.b2.is_some() || hidden.theta2.is_some() {
                    return Err(Error::config(
                        format!("{config_key}.hidden"),
                        "b2/theta2 only apply to the general second-order kind",
                    ));
                }
                if phi2.is_some() {
                    return Err(Error::config(
                        format!("{config_key}.phi2"),
                        "second nonlinearity only applies to the general second-order kind",
                    ));
                }
            }
            PlantKind::GeneralSecondOrder => {
                check_gain("b1", &hidden.b1)?;
                check_theta("theta1", &hidden.theta1)?;
                match (&hidden.b2, &hidden.theta2) {
                    (Some(b2), Some(t2)) => {
                        check_gain("b2", b2)?;
                        check_theta("theta2", t2)?;
                    }
                    _ => {
                        return Err(Error::config(
                            format!("{config_key}.hidden"),
                            "general second-order plants need b1, b2, theta1 and theta2",
                        ));
                    }
                }
                if phi2.is_none() {
                    return Err(Error::config(
                        format!("{config_key}.phi2"),
                        "general second-order plants need a second nonlinearity (use kind = \"zero\" if none)",
                    ));
                }
            }
        }
        Ok(Plant {
            kind,
            dim,
            hidden,
            phi1,
            phi2,
        })
    }

    pub fn kind(&self) -> PlantKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phi1(&self) -> &Phi {
        &self.phi1
    }

    pub fn phi2(&self) -> Option<&Phi> {
        self.phi2.as_ref()
    }

    /// True dynamics. `v`/`dv` are present exactly for second-order kinds.
    pub fn rhs_into(
        &self,
        x: &[f64],
        v: Option<&[f64]>,
        u: &[f64],
        dx: &mut [f64],
        mut dv: Option<&mut [f64]>,
    ) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(u.len(), self.dim);
        match self.kind {
            PlantKind::FirstOrder => {
                for c in 0..self.dim {
                    dx[c] = self.hidden.b1[c] * u[c]
                        + self.phi1.value(x, None, c) * self.hidden.theta1[c];
                }
            }
            PlantKind::SecondOrderChain => {
                let v = v.expect("chain plant has a velocity state");
                let dv = dv.as_deref_mut().expect("chain plant has a velocity state");
                for c in 0..self.dim {
                    dx[c] = v[c];
                    dv[c] = self.hidden.b1[c] * u[c]
                        + self.phi1.value(x, Some(v), c) * self.hidden.theta1[c];
                }
            }
            PlantKind::GeneralSecondOrder => {
                let v = v.expect("general plant has a velocity state");
                let dv = dv.as_deref_mut().expect("general plant has a velocity state");
                let b2 = self.hidden.b2.as_ref().expect("validated at construction");
                let t2 = self.hidden.theta2.as_ref().expect("validated at construction");
                let phi2 = self.phi2.as_ref().expect("validated at construction");
                for c in 0..self.dim {
                    dx[c] = self.hidden.b1[c] * v[c]
                        + self.phi1.value(x, Some(v), c) * self.hidden.theta1[c];
                    dv[c] = b2[c] * u[c] + phi2.value(x, Some(v), c) * t2[c];
                }
            }
        }
    }
}
