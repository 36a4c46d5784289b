//! Fractal Monte Carlo planning.
//!
//! A swarm of walkers scans the future of a simulated system by perturbing
//! and cloning, and the decision is read off the initial actions of the
//! survivors. Besides the planner this crate carries the environments it is
//! exercised on and an exact oracle for the cone metrics on small systems.

pub mod action;
pub mod baseline;
pub mod dist;
pub mod env;
pub mod episode;
pub mod error;
pub mod reward;
pub mod swarm;
pub mod theory;
pub mod wave;

pub use action::{Action, ActionSpec};
pub use baseline::{random_action, vanilla_mc_decide};
pub use dist::{dh_divergence, shannon_entropy, Distribution};
pub use env::{DiscreteEnvironment, Environment, Observation, StateKey};
pub use episode::{decide_at, run_controller, run_episode, run_episode_from, step_seed, PriorSource, Trajectory};
pub use error::{FmcError, Result};
pub use reward::{compose_reward, relativize, RewardComponent};
pub use swarm::{
    clone_probability, plan, virtual_reward, ActionSampler, Decision, DecisionMode, DecisionSummary, FmcParams,
    Swarm, TickReport, Walker,
};
