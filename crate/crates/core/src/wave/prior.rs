//! External action priors and the credibility machinery that trusts them.

use std::collections::HashMap;

use tracing::warn;

use crate::dist::{dh_divergence, Distribution};
use crate::env::{DiscreteEnvironment, StateKey};
use crate::error::{FmcError, Result};

/// Supplies an a-priori action distribution for a state.
///
/// For discrete action specs the distribution is over action indices. For
/// continuous specs it is over the cells of a `resolution`-per-dimension grid
/// laid over the action box (see [`crate::ActionSpec::cell_count`]).
pub trait PriorProvider<S>: Sync {
    fn prior(&self, state: &S) -> Distribution;

    fn resolution(&self) -> usize {
        1
    }
}

#[derive(Debug, Clone)]
pub struct UniformPrior {
    cells: usize,
    resolution: usize,
}

impl UniformPrior {
    pub fn discrete(actions: usize) -> Self {
        Self { cells: actions, resolution: 1 }
    }

    pub fn grid(resolution: usize, dims: usize) -> Self {
        Self { cells: resolution.pow(dims as u32), resolution }
    }
}

impl<S> PriorProvider<S> for UniformPrior {
    fn prior(&self, _state: &S) -> Distribution {
        Distribution::uniform(self.cells)
    }

    fn resolution(&self) -> usize {
        self.resolution
    }
}

/// A lookup table of priors keyed by canonical state, uniform elsewhere.
pub struct TabularPrior<'e, E> {
    env: &'e E,
    table: HashMap<StateKey, Distribution>,
    actions: usize,
}

impl<'e, E: DiscreteEnvironment> TabularPrior<'e, E> {
    pub fn new(env: &'e E, table: HashMap<StateKey, Distribution>) -> Result<Self> {
        let actions = env.action_count();
        if let Some(d) = table.values().find(|d| d.len() != actions) {
            return Err(FmcError::LengthMismatch { left: d.len(), right: actions });
        }
        Ok(Self { env, table, actions })
    }

    /// Reads a JSON object mapping hex-encoded state keys to weight arrays.
    pub fn from_json(env: &'e E, json: &str) -> Result<Self> {
        let raw: HashMap<String, Distribution> = serde_json::from_str(json)
            .map_err(|e| FmcError::InvalidDistribution(format!("prior table: {e}")))?;
        let mut table = HashMap::with_capacity(raw.len());
        for (hex, dist) in raw {
            table.insert(decode_hex(&hex)?, dist);
        }
        Self::new(env, table)
    }
}

impl<E: DiscreteEnvironment> PriorProvider<E::State> for TabularPrior<'_, E> {
    fn prior(&self, state: &E::State) -> Distribution {
        self.table
            .get(&self.env.canonical_key(state))
            .cloned()
            .unwrap_or_else(|| Distribution::uniform(self.actions))
    }
}

fn decode_hex(hex: &str) -> Result<StateKey> {
    if !hex.len().is_multiple_of(2) {
        return Err(FmcError::InvalidDistribution(format!("odd-length state key {hex:?}")));
    }
    (0..hex.len())
        .step_by(2)
        .map(|i| {
            u8::from_str_radix(&hex[i..i + 2], 16)
                .map_err(|_| FmcError::InvalidDistribution(format!("bad state key {hex:?}")))
        })
        .collect()
}

/// Convex mixture `credibility * prior + (1 - credibility) * uniform`.
pub fn blend_prior(prior: &Distribution, credibility: f64) -> Distribution {
    let c = if (0.0..=1.0).contains(&credibility) {
        credibility
    } else {
        let clamped = if credibility.is_nan() { 0.0 } else { credibility.clamp(0.0, 1.0) };
        warn!(credibility, clamped, "credibility outside [0, 1]");
        clamped
    };
    let u = 1.0 / prior.len() as f64;
    let mixed: Vec<f64> = prior.weights().iter().map(|&p| c * p + (1.0 - c) * u).collect();
    Distribution::normalized(mixed).expect("mixture of valid distributions")
}

/// How far the prior can be trusted given the decision the swarm reached.
///
/// `1 - D_H(decision, prior) / D_H(decision, uniform)`, clamped to `[0, 1]`;
/// zero when the decision itself is uniform.
pub fn credibility(decision: &Distribution, prior: &Distribution) -> Result<f64> {
    let to_prior = dh_divergence(decision.weights(), prior.weights())?;
    let to_uniform =
        dh_divergence(decision.weights(), Distribution::uniform(decision.len()).weights())?;
    if to_uniform <= 0.0 {
        return Ok(0.0);
    }
    if to_prior.is_infinite() {
        return Ok(0.0);
    }
    Ok((1.0 - to_prior / to_uniform).clamp(0.0, 1.0))
}

/// Walkers to spend next step: `round(max * (1 - credibility))`, never below two.
pub fn walker_budget(max_walkers: usize, credibility: f64) -> usize {
    let c = credibility.clamp(0.0, 1.0);
    ((max_walkers as f64 * (1.0 - c)).round() as usize).max(2)
}
