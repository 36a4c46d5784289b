use std::collections::BTreeMap;

use super::metrics::entropy_share;
use crate::dist::{shannon_entropy, Distribution};
use crate::env::{DiscreteEnvironment, StateKey};
use crate::error::Result;
use crate::swarm::{ActionSampler, Decision, FmcParams, Swarm};

/// Walker frequencies of a swarm run, slice by slice.
#[derive(Debug, Clone)]
pub struct EmpiricalSlices {
    /// `ticks[t]`: share of walkers in each state after tick `t` (all walkers, dead included).
    pub ticks: Vec<BTreeMap<StateKey, f64>>,
    /// Final-state frequencies among the walkers holding each initial action.
    pub final_by_action: Vec<BTreeMap<StateKey, f64>>,
    pub action_share: Vec<f64>,
    pub decision: Decision,
}

impl EmpiricalSlices {
    pub fn final_slice(&self) -> &BTreeMap<StateKey, f64> {
        self.ticks.last().expect("tick 0 always recorded")
    }

    /// Entropy-weighted decision read off the per-action final frequencies.
    pub fn intelligent_decision(&self) -> Distribution {
        let entropies: Vec<f64> = self
            .final_by_action
            .iter()
            .map(|m| shannon_entropy(&m.values().copied().collect::<Vec<_>>()))
            .collect();
        entropy_share(&entropies)
    }
}

fn frequencies<'a>(keys: impl Iterator<Item = &'a StateKey>) -> BTreeMap<StateKey, f64> {
    let mut counts: BTreeMap<StateKey, usize> = BTreeMap::new();
    for k in keys {
        *counts.entry(k.clone()).or_default() += 1;
    }
    let n: usize = counts.values().sum();
    counts.into_iter().map(|(k, c)| (k, c as f64 / n.max(1) as f64)).collect()
}

/// Runs an FMC swarm at `root` and records where its walkers are after every tick.
pub fn empirical_slices<E: DiscreteEnvironment>(
    env: &E,
    root: &E::State,
    params: &FmcParams,
    sampler: ActionSampler<'_, E::State>,
) -> Result<EmpiricalSlices> {
    let mut swarm = Swarm::new(env, root.clone(), params.clone(), sampler)?;
    let key_of = |swarm: &Swarm<E::State>| -> Vec<StateKey> {
        swarm.walkers().iter().map(|w| env.canonical_key(&w.state)).collect()
    };
    let mut ticks = vec![frequencies(key_of(&swarm).iter())];
    while swarm.tick_index() < params.ticks && !swarm.is_terminal() {
        swarm.tick(env, sampler)?;
        ticks.push(frequencies(key_of(&swarm).iter()));
    }

    let n_actions = env.action_count();
    let keys = key_of(&swarm);
    let mut final_by_action = Vec::with_capacity(n_actions);
    let mut action_share = Vec::with_capacity(n_actions);
    for a in 0..n_actions {
        let mine: Vec<&StateKey> = swarm
            .walkers()
            .iter()
            .zip(&keys)
            .filter(|(w, _)| w.initial_action.index() == Some(a))
            .map(|(_, k)| k)
            .collect();
        action_share.push(mine.len() as f64 / keys.len() as f64);
        final_by_action.push(frequencies(mine.into_iter()));
    }
    let decision = swarm.decide(env.action_spec(), params.decision_mode);
    Ok(EmpiricalSlices { ticks, final_by_action, action_share, decision })
}

/// Half the L1 distance between two sparse distributions.
pub fn total_variation(a: &BTreeMap<StateKey, f64>, b: &BTreeMap<StateKey, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, &x) in a {
        sum += (x - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, &y) in b {
        if !a.contains_key(k) {
            sum += y.abs();
        }
    }
    0.5 * sum
}
