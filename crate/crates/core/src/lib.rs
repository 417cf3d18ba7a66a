//! Simulation library for distributed Nash equilibrium seeking in multi-agent
//! systems whose control directions are unknown.
//!
//! Each player runs two coupled blocks:
//!
//! * an *optimization module*: a leader-following consensus estimator that
//!   maintains an estimate of every player's action and integrates the player's
//!   own partial gradient into a reference signal `y_i`, and
//! * a *state regulation module*: a Nussbaum-gain adaptive controller that
//!   drives the physical action `x_i` to the reference `y_i` without knowing
//!   the sign or magnitude of the plant's control gain, while adapting away
//!   parametric model uncertainty.
//!
//! The crate provides the game layer ([`game`]), the communication graph
//! ([`network`]), the consensus estimator ([`estimator`]), the regulator
//! families ([`regulators`]), the plant models ([`plants`]), a fixed-step RK4
//! closed-loop engine ([`sim`]), declarative scenario configuration with
//! builtin benchmark scenarios ([`scenario`]), run artifact writers
//! ([`output`]) and parameter-sweep execution ([`batch`]).
//!
//! With the default `parallel` feature, sweeps and sampling-based game
//! diagnostics fan out over a rayon thread pool; a single closed-loop run is
//! always sequential.

pub mod batch;
pub mod error;
pub mod estimator;
pub mod game;
pub mod network;
pub mod output;
pub mod phi;
pub mod plants;
pub mod regulators;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
