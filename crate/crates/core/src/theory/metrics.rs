use serde::{Deserialize, Serialize};

use super::cone::{enumerate_cone, SliceTable, TabularPolicy};
use super::empirical::EmpiricalSlices;
use crate::dist::{dh_divergence, shannon_entropy, Distribution};
use crate::env::DiscreteEnvironment;
use crate::error::{FmcError, Result};

/// `sum_{t=1..M} D_H(reward_t || scan_t) * dt`.
pub fn scan_score(table: &SliceTable) -> Result<f64> {
    let mut total = 0.0;
    for t in 1..=table.ticks() {
        total += dh_divergence(&table.reward_weights(t), &table.scan_weights(t))? * table.dt;
    }
    Ok(total)
}

/// `x / unit` with the conventions `0 / 0 = 0` and `x / 0 = inf` for `x > 0`.
fn in_units(x: f64, unit: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if unit == 0.0 {
        f64::INFINITY
    } else {
        x / unit
    }
}

/// Scan score of `policy` measured in units of the random policy's score.
pub fn scan_suboptimality<E: DiscreteEnvironment>(
    env: &E,
    x0: &E::State,
    ticks: usize,
    dt: f64,
    policy: &TabularPolicy,
) -> Result<f64> {
    let table = enumerate_cone(env, x0, ticks, dt, policy)?;
    let random = enumerate_cone(env, x0, ticks, dt, &TabularPolicy::uniform(env.action_count()))?;
    Ok(in_units(scan_score(&table)?, scan_score(&random)?))
}

/// Same ratio with walker frequencies standing in for the policy's scan density.
///
/// `random` must be the uniform-policy table of the same cone.
pub fn empirical_scan_suboptimality(random: &SliceTable, empirical: &EmpiricalSlices) -> Result<f64> {
    let ticks = random.ticks().min(empirical.ticks.len().saturating_sub(1));
    let mut raw = 0.0;
    for t in 1..=ticks {
        let slice = &random.slices[t];
        let freq = &empirical.ticks[t];
        let mut p = Vec::with_capacity(slice.len() + freq.len());
        let mut q = Vec::with_capacity(slice.len() + freq.len());
        for (k, e) in slice {
            p.push(e.reward_mass);
            q.push(freq.get(k).copied().unwrap_or(0.0));
        }
        for (k, &f) in freq {
            if !slice.contains_key(k) {
                p.push(0.0);
                q.push(f);
            }
        }
        raw += dh_divergence(&p, &q)? * random.dt;
    }
    Ok(in_units(raw, scan_score(random)?))
}

/// Entropies normalised to a distribution; uniform when every entropy is zero.
pub(crate) fn entropy_share(entropies: &[f64]) -> Distribution {
    let total: f64 = entropies.iter().sum();
    if total > 0.0 {
        Distribution::normalized(entropies.to_vec()).expect("positive entropy total")
    } else {
        Distribution::uniform(entropies.len())
    }
}

/// Actions weighted by the entropy of the final slice of their conditional cone.
pub fn intelligent_decision(table: &SliceTable) -> Distribution {
    let entropies: Vec<f64> = (0..table.actions)
        .map(|a| {
            table
                .final_conditional(a)
                .map(|c| shannon_entropy(&c.values().copied().collect::<Vec<_>>()))
                .unwrap_or(0.0)
        })
        .collect();
    entropy_share(&entropies)
}

/// `D_H(ID || pi_d) / D_H(ID || uniform)`.
pub fn decision_suboptimality(id: &Distribution, pi_d: &Distribution) -> Result<f64> {
    let num = dh_divergence(id.weights(), pi_d.weights())?;
    let unit = dh_divergence(id.weights(), Distribution::uniform(id.len()).weights())?;
    Ok(in_units(num, unit))
}

pub fn global_suboptimality(scan: f64, decision: f64) -> f64 {
    0.5 * (scan + decision)
}

/// Reciprocal of the global sub-optimality; infinite for an optimal policy.
pub fn iq(suboptimality: f64) -> f64 {
    if suboptimality == 0.0 {
        f64::INFINITY
    } else {
        1.0 / suboptimality
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyMetrics {
    pub scan: f64,
    pub decision: f64,
    pub global: f64,
    pub iq: f64,
}

impl PolicyMetrics {
    pub fn new(scan: f64, decision: f64) -> Self {
        let global = global_suboptimality(scan, decision);
        Self { scan, decision, global, iq: iq(global) }
    }

    /// Exact metrics of a tabular policy, which must carry a deciding distribution.
    pub fn exact<E: DiscreteEnvironment>(
        env: &E,
        x0: &E::State,
        ticks: usize,
        dt: f64,
        policy: &TabularPolicy,
    ) -> Result<Self> {
        let pi_d = policy
            .decide
            .as_ref()
            .ok_or_else(|| FmcError::InvalidParams("policy has no deciding distribution".into()))?;
        let table = enumerate_cone(env, x0, ticks, dt, policy)?;
        let random = enumerate_cone(env, x0, ticks, dt, &TabularPolicy::uniform(env.action_count()))?;
        let scan = in_units(scan_score(&table)?, scan_score(&random)?);
        let decision = decision_suboptimality(&intelligent_decision(&table), pi_d)?;
        Ok(Self::new(scan, decision))
    }
}
