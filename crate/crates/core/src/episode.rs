//! Step-by-step control: a fresh cone per agent step.

use serde::Serialize;

use crate::action::Action;
use crate::env::Environment;
use crate::error::{FmcError, Result};
use crate::swarm::{plan, ActionSampler, Decision, FmcParams};
use crate::wave::prior::{credibility, walker_budget, PriorProvider};

/// An external prior and how much to trust it.
pub struct PriorSource<'a, S> {
    pub provider: &'a dyn PriorProvider<S>,
    pub credibility: f64,
    /// When set, credibility is re-estimated after every step and the walker
    /// count shrinks to `walker_budget(params.n_walkers, credibility)`.
    pub adaptive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory<S> {
    pub start: S,
    /// State after each applied action.
    pub states: Vec<S>,
    pub actions: Vec<Action>,
    pub rewards: Vec<f64>,
    pub samples_per_step: Vec<usize>,
    /// Steps completed with the agent still alive.
    pub survival: usize,
}

impl<S> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }

    pub fn mean_samples_per_action(&self) -> f64 {
        if self.samples_per_step.is_empty() {
            0.0
        } else {
            self.samples_per_step.iter().sum::<usize>() as f64 / self.samples_per_step.len() as f64
        }
    }
}

/// Seed for the cone built at agent step `step`.
pub fn step_seed(seed: u64, step: usize) -> u64 {
    // splitmix64 finaliser
    let mut z = seed.wrapping_add((step as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Drives `env` from `start` with any per-step controller.
///
/// The controller returns the action to apply and the simulator samples it consumed.
pub fn run_controller<E, F>(
    env: &E,
    start: E::State,
    dt: f64,
    max_steps: usize,
    mut controller: F,
) -> Result<Trajectory<E::State>>
where
    E: Environment,
    F: FnMut(usize, &E::State) -> Result<(Action, usize)>,
{
    if max_steps == 0 {
        return Err(FmcError::InvalidParams("max_steps must be >= 1".into()));
    }
    let mut traj = Trajectory {
        start: start.clone(),
        states: Vec::new(),
        actions: Vec::new(),
        rewards: Vec::new(),
        samples_per_step: Vec::new(),
        survival: 0,
    };
    let mut state = start;
    for step in 0..max_steps {
        if env.is_dead(&state) {
            break;
        }
        let (action, samples) = controller(step, &state)?;
        let next = env.step(&state, &action, dt);
        traj.rewards.push(env.reward(&state, &next));
        traj.actions.push(action);
        traj.samples_per_step.push(samples);
        if !env.is_dead(&next) {
            traj.survival += 1;
        }
        traj.states.push(next.clone());
        state = next;
    }
    Ok(traj)
}

/// Runs FMC step by step from the environment's initial state.
pub fn run_episode<E: Environment>(
    env: &E,
    params: &FmcParams,
    max_steps: usize,
    prior: Option<&PriorSource<'_, E::State>>,
) -> Result<Trajectory<E::State>> {
    run_episode_from(env, env.initial_state(), params, max_steps, prior)
}

pub fn run_episode_from<E: Environment>(
    env: &E,
    start: E::State,
    params: &FmcParams,
    max_steps: usize,
    prior: Option<&PriorSource<'_, E::State>>,
) -> Result<Trajectory<E::State>> {
    params.validate()?;
    let mut credibility_now = prior.map_or(0.0, |p| p.credibility);
    let mut walkers = params.n_walkers;
    run_controller(env, start, params.dt, max_steps, |step, state| {
        let step_params = FmcParams {
            n_walkers: walkers,
            seed: step_seed(params.seed, step),
            ..params.clone()
        };
        let sampler = match prior {
            Some(p) => ActionSampler::with_prior(p.provider, credibility_now),
            None => ActionSampler::uniform(),
        };
        let decision = plan(env, state, &step_params, sampler)?;
        if let Some(p) = prior.filter(|p| p.adaptive) {
            if let Some(dist) = decision.distribution() {
                let prior_here = p.provider.prior(state);
                if prior_here.len() == dist.len() {
                    credibility_now = credibility(&dist, &prior_here)?;
                    walkers = walker_budget(params.n_walkers, credibility_now);
                }
            }
        }
        Ok((decision.chosen, decision.samples_used))
    })
}

/// Convenience for callers that want the decisions themselves.
pub fn decide_at<E: Environment>(env: &E, state: &E::State, params: &FmcParams) -> Result<Decision> {
    plan(env, state, params, ActionSampler::uniform())
}
