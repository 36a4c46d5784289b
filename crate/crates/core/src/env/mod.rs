//! Simulated systems the planner can drive.

pub mod cartpole;
pub mod grid;
pub mod rocket;

use serde::{Deserialize, Serialize};

use crate::action::{Action, ActionSpec};
use crate::reward::{compose_reward, RewardComponent};

pub use cartpole::{CartPole, CartPoleConstants, CartPoleState};
pub use grid::{Cell, GridLayout, GridState, GridWorld};
pub use rocket::{hook_reward, rocket_distance, Rock, Rocket, RocketConstants, RocketState};

/// Canonical byte encoding of a discrete state.
pub type StateKey = Vec<u8>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Observation {
    Key(String),
    Vector(Vec<f64>),
}

/// A system the planner can simulate.
///
/// `step` must be a pure function of its inputs: walkers are simulated
/// concurrently against shared `&self`. Dead states absorb, so `step` on a dead
/// state returns it unchanged, and its composed reward is zero.
pub trait Environment: Sync {
    type State: Clone + Send + Sync + std::fmt::Debug;

    fn action_spec(&self) -> &ActionSpec;

    fn initial_state(&self) -> Self::State;

    fn step(&self, state: &Self::State, action: &Action, dt: f64) -> Self::State;

    /// Goals evaluated at `state` for an agent whose decision is being made at `root`.
    fn reward_components(&self, root: &Self::State, state: &Self::State) -> Vec<RewardComponent>;

    fn reward(&self, root: &Self::State, state: &Self::State) -> f64 {
        compose_reward(&self.reward_components(root, state)).unwrap_or(0.0)
    }

    fn is_dead(&self, state: &Self::State) -> bool;

    fn distance(&self, a: &Self::State, b: &Self::State) -> f64;

    fn observe(&self, state: &Self::State) -> Observation;

    /// Game points credited for being in `state`; accumulated along swarm-wave paths.
    fn points(&self, _state: &Self::State) -> f64 {
        0.0
    }
}

/// An environment with finitely many states that can be keyed for enumeration.
pub trait DiscreteEnvironment: Environment {
    fn canonical_key(&self, state: &Self::State) -> StateKey;

    fn action_count(&self) -> usize {
        self.action_spec().count().expect("discrete environment with continuous actions")
    }
}

pub fn hex_key(key: &[u8]) -> String {
    key.iter().map(|b| format!("{b:02x}")).collect()
}
