//! The walker swarm: measure, clone and perturb, tick by tick.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{Action, ActionSpec};
use crate::dist::Distribution;
use crate::env::Environment;
use crate::error::{FmcError, Result};
use crate::reward::relativize_in_place;
use crate::wave::prior::{blend_prior, PriorProvider};

const DECISION_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecisionMode {
    #[default]
    Argmax,
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FmcParams {
    pub n_walkers: usize,
    pub ticks: usize,
    /// Seconds simulated per tick.
    pub dt: f64,
    pub alpha: f64,
    pub beta: f64,
    pub clamp_clone_prob: bool,
    pub decision_mode: DecisionMode,
    pub seed: u64,
    /// With cloning off the swarm degenerates to independent random walks.
    pub cloning: bool,
    /// Process walkers on the rayon pool. Results are identical either way.
    pub parallel: bool,
}

impl Default for FmcParams {
    fn default() -> Self {
        Self {
            n_walkers: 100,
            ticks: 20,
            dt: 0.1,
            alpha: 1.0,
            beta: 1.0,
            clamp_clone_prob: true,
            decision_mode: DecisionMode::Argmax,
            seed: 0,
            cloning: true,
            parallel: false,
        }
    }
}

impl FmcParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(FmcError::InvalidParams(msg));
        if self.n_walkers < 2 {
            return bad(format!("need at least 2 walkers, got {}", self.n_walkers));
        }
        if self.ticks < 1 {
            return bad("need at least one tick".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be >= 0, got {}", self.alpha));
        }
        if !self.beta.is_finite() {
            return bad(format!("beta must be finite, got {}", self.beta));
        }
        Ok(())
    }

    /// Simulated time the cone spans.
    pub fn horizon(&self) -> f64 {
        self.ticks as f64 * self.dt
    }

    pub fn samples_per_decision(&self) -> usize {
        self.n_walkers * self.ticks
    }
}

/// `r^alpha * d^beta` over relativized reward and distance.
pub fn virtual_reward(reward: f64, distance: f64, alpha: f64, beta: f64) -> f64 {
    let r = if alpha == 0.0 { 1.0 } else { reward.powf(alpha) };
    let d = if beta == 0.0 {
        1.0
    } else if beta == 1.0 {
        distance
    } else {
        distance.powf(beta)
    };
    r * d
}

/// Probability that a walker with virtual reward `vr_i` clones onto one with `vr_j`.
pub fn clone_probability(vr_i: f64, vr_j: f64, clamp: bool) -> f64 {
    if vr_i == 0.0 {
        return 1.0;
    }
    if vr_i > vr_j {
        return 0.0;
    }
    let p = (vr_j - vr_i) / vr_i;
    if clamp {
        p.min(1.0)
    } else {
        p
    }
}

/// Draws perturbation actions, uniformly or from a blended prior.
pub struct ActionSampler<'a, S> {
    prior: Option<(&'a dyn PriorProvider<S>, f64)>,
}

impl<S> Clone for ActionSampler<'_, S> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<S> Copy for ActionSampler<'_, S> {}

impl<S> Default for ActionSampler<'_, S> {
    fn default() -> Self {
        Self::uniform()
    }
}

impl<'a, S> ActionSampler<'a, S> {
    pub fn uniform() -> Self {
        Self { prior: None }
    }

    pub fn with_prior(prior: &'a dyn PriorProvider<S>, credibility: f64) -> Self {
        Self { prior: Some((prior, credibility)) }
    }

    pub fn sample<R: Rng + ?Sized>(&self, spec: &ActionSpec, state: &S, rng: &mut R) -> Action {
        let Some((provider, credibility)) = self.prior else {
            return spec.sample_uniform(rng);
        };
        let resolution = provider.resolution().max(1);
        let prior = provider.prior(state);
        if prior.len() != spec.cell_count(resolution) {
            tracing::warn!(
                prior = prior.len(),
                cells = spec.cell_count(resolution),
                "prior does not match the action grid, sampling uniformly"
            );
            return spec.sample_uniform(rng);
        }
        let blended = blend_prior(&prior, credibility);
        let cell = blended.sample_with(rng.random::<f64>());
        spec.sample_in_cell(resolution, cell, rng)
    }
}

#[derive(Debug, Clone)]
pub struct Walker<S> {
    pub state: S,
    pub initial_action: Action,
    pub dead: bool,
    pub raw_reward: f64,
    pub scratch_distance: f64,
    pub virtual_reward: f64,
}

/// What happened to each walker during one tick.
#[derive(Debug, Clone, Default)]
pub struct TickReport {
    /// Snapshot index copied by each walker, if it cloned.
    pub cloned_from: Vec<Option<usize>>,
    /// Action simulated by each walker that perturbed.
    pub actions: Vec<Option<Action>>,
    pub alive: usize,
    pub terminal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "values", rename_all = "snake_case")]
pub enum DecisionSummary {
    /// Share of (alive) walkers holding each initial action.
    Discrete(Vec<f64>),
    /// Mean initial action before clipping.
    Continuous(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub summary: DecisionSummary,
    pub chosen: Action,
    pub samples_used: usize,
    /// Set when no walker survived and the decision fell back to uniform.
    pub degenerate: bool,
}

impl Decision {
    /// The discrete deciding distribution, if any.
    pub fn distribution(&self) -> Option<Distribution> {
        match &self.summary {
            DecisionSummary::Discrete(w) => Distribution::normalized(w.clone()).ok(),
            DecisionSummary::Continuous(_) => None,
        }
    }
}

pub struct Swarm<S> {
    walkers: Vec<Walker<S>>,
    rngs: Vec<ChaCha8Rng>,
    params: FmcParams,
    root: S,
    tick_index: usize,
    terminal: bool,
}

fn walker_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn map_rngs<T, F>(rngs: &mut [ChaCha8Rng], parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> T + Sync + Send,
{
    if parallel {
        rngs.par_iter_mut().enumerate().map(|(i, r)| f(i, r)).collect()
    } else {
        rngs.iter_mut().enumerate().map(|(i, r)| f(i, r)).collect()
    }
}

fn companion<R: Rng>(i: usize, n: usize, rng: &mut R) -> usize {
    let j = rng.random_range(0..n - 1);
    if j >= i {
        j + 1
    } else {
        j
    }
}

impl<S: Clone + Send + Sync + std::fmt::Debug> Swarm<S> {
    /// Spawns `n_walkers` copies of `root`, each holding a sampled initial action.
    pub fn new<E>(env: &E, root: S, params: FmcParams, sampler: ActionSampler<'_, S>) -> Result<Self>
    where
        E: Environment<State = S>,
    {
        params.validate()?;
        env.action_spec().validate()?;
        let spec = env.action_spec();
        let dead = env.is_dead(&root);
        let mut rngs: Vec<ChaCha8Rng> =
            (0..params.n_walkers as u64).map(|i| walker_rng(params.seed, i)).collect();
        let walkers = rngs
            .iter_mut()
            .map(|rng| Walker {
                state: root.clone(),
                initial_action: sampler.sample(spec, &root, rng),
                dead,
                raw_reward: 0.0,
                scratch_distance: 0.0,
                virtual_reward: 0.0,
            })
            .collect();
        Ok(Self { walkers, rngs, params, root, tick_index: 0, terminal: false })
    }

    /// Builds a swarm from explicit walker states and initial actions.
    pub fn from_walkers<E>(env: &E, root: S, seeds: Vec<(S, Action)>, params: FmcParams) -> Result<Self>
    where
        E: Environment<State = S>,
    {
        let params = FmcParams { n_walkers: seeds.len(), ..params };
        params.validate()?;
        let rngs = (0..seeds.len() as u64).map(|i| walker_rng(params.seed, i)).collect();
        let walkers = seeds
            .into_iter()
            .map(|(state, initial_action)| Walker {
                dead: env.is_dead(&state),
                state,
                initial_action,
                raw_reward: 0.0,
                scratch_distance: 0.0,
                virtual_reward: 0.0,
            })
            .collect();
        Ok(Self { walkers, rngs, params, root, tick_index: 0, terminal: false })
    }

    pub fn walkers(&self) -> &[Walker<S>] {
        &self.walkers
    }

    pub fn params(&self) -> &FmcParams {
        &self.params
    }

    pub fn root(&self) -> &S {
        &self.root
    }

    pub fn tick_index(&self) -> usize {
        self.tick_index
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    pub fn alive(&self) -> usize {
        self.walkers.iter().filter(|w| !w.dead).count()
    }

    /// Runs one measure / clone / perturb iteration against a snapshot of the walkers.
    pub fn tick<E>(&mut self, env: &E, sampler: ActionSampler<'_, S>) -> Result<TickReport>
    where
        E: Environment<State = S>,
    {
        let n = self.walkers.len();
        if self.terminal {
            return Ok(TickReport { terminal: true, ..Default::default() });
        }
        if self.tick_index >= self.params.ticks {
            return Err(FmcError::HorizonExhausted(self.params.ticks));
        }

        let parallel = self.params.parallel;

        // Measure.
        let walkers = &self.walkers;
        let root = &self.root;
        let measured: Vec<(bool, f64, f64)> = map_rngs(&mut self.rngs, parallel, |i, rng| {
            let j = companion(i, n, rng);
            let w = &walkers[i];
            let dead = env.is_dead(&w.state);
            let reward = if dead { 0.0 } else { env.reward(root, &w.state) };
            (dead, reward, env.distance(&w.state, &walkers[j].state))
        });

        let mut rewards: Vec<f64> = measured.iter().map(|m| m.1).collect();
        let mut distances: Vec<f64> = measured.iter().map(|m| m.2).collect();
        for (w, &(dead, r, d)) in self.walkers.iter_mut().zip(&measured) {
            w.dead = dead;
            w.raw_reward = r;
            w.scratch_distance = d;
        }
        let alive: Vec<usize> = (0..n).filter(|&i| !measured[i].0).collect();
        if alive.is_empty() {
            self.terminal = true;
            for w in &mut self.walkers {
                w.virtual_reward = 0.0;
            }
            return Ok(TickReport { terminal: true, ..Default::default() });
        }
        relativize_in_place(&mut rewards)?;
        relativize_in_place(&mut distances)?;
        let (alpha, beta) = (self.params.alpha, self.params.beta);
        for (i, w) in self.walkers.iter_mut().enumerate() {
            w.virtual_reward =
                if w.dead { 0.0 } else { virtual_reward(rewards[i], distances[i], alpha, beta) };
        }

        // Clone.
        let cloning = self.params.cloning;
        let clamp = self.params.clamp_clone_prob;
        let walkers = &self.walkers;
        let sources: Vec<Option<usize>> = map_rngs(&mut self.rngs, parallel, |i, rng| {
            let mut k = companion(i, n, rng);
            let me = &walkers[i];
            let prob = if me.dead {
                if walkers[k].dead {
                    k = alive[rng.random_range(0..alive.len())];
                }
                1.0
            } else {
                clone_probability(me.virtual_reward, walkers[k].virtual_reward, clamp)
            };
            let u = rng.random::<f64>();
            (cloning && u < prob).then_some(k)
        });

        // Perturb.
        let spec = env.action_spec();
        let first_tick = self.tick_index == 0;
        let dt = self.params.dt;
        let updates: Vec<(S, Action, Option<Action>, bool)> = map_rngs(&mut self.rngs, parallel, |i, rng| {
            if let Some(k) = sources[i] {
                let src = &walkers[k];
                return (src.state.clone(), src.initial_action.clone(), None, src.dead);
            }
            let w = &walkers[i];
            let action = if first_tick {
                w.initial_action.clone()
            } else {
                sampler.sample(spec, &w.state, rng)
            };
            let next = env.step(&w.state, &action, dt);
            let dead = env.is_dead(&next);
            (next, w.initial_action.clone(), Some(action), dead)
        });

        let mut actions = Vec::with_capacity(n);
        for (w, (state, initial, action, dead)) in self.walkers.iter_mut().zip(updates) {
            w.state = state;
            w.initial_action = initial;
            w.dead = dead;
            actions.push(action);
        }
        self.tick_index += 1;
        Ok(TickReport { cloned_from: sources, actions, alive: alive.len(), terminal: false })
    }

    /// Ticks until the horizon is exhausted or every walker is dead.
    pub fn run<E>(&mut self, env: &E, sampler: ActionSampler<'_, S>) -> Result<()>
    where
        E: Environment<State = S>,
    {
        while self.tick_index < self.params.ticks && !self.terminal {
            self.tick(env, sampler)?;
        }
        Ok(())
    }

    /// Reads the decision off the initial actions of the surviving walkers.
    pub fn decide(&self, spec: &ActionSpec, mode: DecisionMode) -> Decision {
        // Budget accounting: a scanned cone costs N * M samples even when
        // clones skip their simulation step or the swarm dies early.
        let samples_used = if self.tick_index == 0 { 0 } else { self.walkers.len() * self.params.ticks };
        let alive: Vec<&Walker<S>> = self.walkers.iter().filter(|w| !w.dead).collect();
        let degenerate = alive.is_empty();
        match spec {
            ActionSpec::Discrete { count } => {
                let weights = if degenerate {
                    vec![1.0 / *count as f64; *count]
                } else {
                    let mut counts = vec![0usize; *count];
                    for w in &alive {
                        if let Action::Discrete(a) = w.initial_action {
                            counts[a.min(count - 1)] += 1;
                        }
                    }
                    counts.iter().map(|&c| c as f64 / alive.len() as f64).collect()
                };
                let dist = Distribution::normalized(weights.clone())
                    .unwrap_or_else(|_| Distribution::uniform(*count));
                let chosen = match mode {
                    DecisionMode::Argmax => dist.argmax(),
                    DecisionMode::Sample => {
                        let mut rng = walker_rng(self.params.seed, DECISION_STREAM);
                        dist.sample_with(rng.random::<f64>())
                    }
                };
                Decision {
                    summary: DecisionSummary::Discrete(weights),
                    chosen: Action::Discrete(chosen),
                    samples_used,
                    degenerate,
                }
            }
            ActionSpec::Continuous { bounds } => {
                let mean: Vec<f64> = if degenerate {
                    bounds.iter().map(|&(lo, hi)| 0.5 * (lo + hi)).collect()
                } else {
                    let mut acc = vec![0.0; bounds.len()];
                    for w in &alive {
                        if let Action::Continuous(v) = &w.initial_action {
                            for (a, x) in acc.iter_mut().zip(v) {
                                *a += x;
                            }
                        }
                    }
                    acc.iter().map(|a| a / alive.len() as f64).collect()
                };
                let chosen = spec.clip(&Action::Continuous(mean.clone()));
                Decision {
                    summary: DecisionSummary::Continuous(mean),
                    chosen,
                    samples_used,
                    degenerate,
                }
            }
        }
    }
}

/// Builds a fresh cone at `root`, scans it and decides.
pub fn plan<E: Environment>(
    env: &E,
    root: &E::State,
    params: &FmcParams,
    sampler: ActionSampler<'_, E::State>,
) -> Result<Decision> {
    let mut swarm = Swarm::new(env, root.clone(), params.clone(), sampler)?;
    swarm.run(env, sampler)?;
    Ok(swarm.decide(env.action_spec(), params.decision_mode))
}
