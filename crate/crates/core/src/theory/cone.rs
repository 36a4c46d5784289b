use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::action::Action;
use crate::dist::Distribution;
use crate::env::{hex_key, DiscreteEnvironment, StateKey};
use crate::error::{FmcError, Result};

/// Largest number of state expansions an enumeration may perform.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// A scanning policy given as a table of action distributions per state.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TabularPolicy {
    pub scan: HashMap<StateKey, Distribution>,
    /// Used for states missing from `scan`.
    pub default: Option<Distribution>,
    /// Deciding distribution over the initial action.
    pub decide: Option<Distribution>,
}

impl TabularPolicy {
    /// The random policy: uniform scanning and uniform deciding.
    pub fn uniform(actions: usize) -> Self {
        Self {
            scan: HashMap::new(),
            default: Some(Distribution::uniform(actions)),
            decide: Some(Distribution::uniform(actions)),
        }
    }

    pub fn with_entry(mut self, key: StateKey, dist: Distribution) -> Self {
        self.scan.insert(key, dist);
        self
    }

    pub fn scan_at(&self, key: &StateKey) -> Result<&Distribution> {
        self.scan
            .get(key)
            .or(self.default.as_ref())
            .ok_or_else(|| FmcError::MissingPolicyEntry(hex_key(key)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SliceEntry {
    pub scan_mass: f64,
    pub reward: f64,
    pub reward_mass: f64,
    /// Action sequences of the full cone ending here.
    pub paths: u64,
}

/// One exported row of a slice table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SliceRow {
    pub tick: usize,
    pub state: String,
    pub scan_mass: f64,
    pub reward: f64,
    pub reward_mass: f64,
}

/// Every slice of a cone, tick 0 through M. Export goes through [`SliceTable::rows`].
#[derive(Debug, Clone, PartialEq)]
pub struct SliceTable {
    pub dt: f64,
    pub actions: usize,
    pub slices: Vec<BTreeMap<StateKey, SliceEntry>>,
    /// `conditional[a][t]`: joint scan mass of a state and initial action `a`.
    /// Empty at tick 0.
    pub conditional: Vec<Vec<BTreeMap<StateKey, f64>>>,
    /// Scan probability of each initial action at the root.
    pub initial_action_mass: Vec<f64>,
    pub expansions: usize,
}

impl SliceTable {
    pub fn ticks(&self) -> usize {
        self.slices.len() - 1
    }

    pub fn final_slice(&self) -> &BTreeMap<StateKey, SliceEntry> {
        self.slices.last().expect("tick 0 slice always present")
    }

    /// Final-slice distribution conditioned on the initial action, if that action was scanned.
    pub fn final_conditional(&self, action: usize) -> Option<BTreeMap<StateKey, f64>> {
        let mass = self.initial_action_mass[action];
        if mass <= 0.0 || self.ticks() == 0 {
            return None;
        }
        let joint = self.conditional[action].last()?;
        Some(joint.iter().map(|(k, &m)| (k.clone(), m / mass)).collect())
    }

    pub fn scan_weights(&self, t: usize) -> Vec<f64> {
        self.slices[t].values().map(|e| e.scan_mass).collect()
    }

    pub fn reward_weights(&self, t: usize) -> Vec<f64> {
        self.slices[t].values().map(|e| e.reward_mass).collect()
    }

    pub fn rows(&self) -> Vec<SliceRow> {
        self.slices
            .iter()
            .enumerate()
            .flat_map(|(tick, slice)| {
                slice.iter().map(move |(k, e)| SliceRow {
                    tick,
                    state: hex_key(k),
                    scan_mass: e.scan_mass,
                    reward: e.reward,
                    reward_mass: e.reward_mass,
                })
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows()).expect("slice rows serialise")
    }
}

pub fn enumerate_cone<E: DiscreteEnvironment>(
    env: &E,
    x0: &E::State,
    ticks: usize,
    dt: f64,
    policy: &TabularPolicy,
) -> Result<SliceTable> {
    enumerate_cone_with_budget(env, x0, ticks, dt, policy, DEFAULT_BUDGET)
}

struct Node<S> {
    state: S,
    mass: f64,
    paths: u64,
    by_action: Vec<f64>,
}

/// Propagates the scanning policy forward as a Markov chain over canonical states.
///
/// Slices hold every state reachable by some action sequence, so states the
/// policy never visits appear with zero scan mass.
pub fn enumerate_cone_with_budget<E: DiscreteEnvironment>(
    env: &E,
    x0: &E::State,
    ticks: usize,
    dt: f64,
    policy: &TabularPolicy,
    budget: usize,
) -> Result<SliceTable> {
    let n_actions = env.action_count();
    for d in policy.scan.values().chain(&policy.default) {
        if d.len() != n_actions {
            return Err(FmcError::LengthMismatch { left: d.len(), right: n_actions });
        }
    }
    let key0 = env.canonical_key(x0);
    let mut frontier: BTreeMap<StateKey, Node<E::State>> = BTreeMap::new();
    frontier.insert(key0, Node { state: x0.clone(), mass: 1.0, paths: 1, by_action: vec![0.0; n_actions] });

    let mut slices = Vec::with_capacity(ticks + 1);
    let mut conditional = vec![Vec::with_capacity(ticks + 1); n_actions];
    let mut initial_action_mass = vec![0.0; n_actions];
    let mut expansions = 0usize;

    slices.push(finish_slice(env, x0, &frontier));
    for c in conditional.iter_mut() {
        c.push(BTreeMap::new());
    }

    for t in 1..=ticks {
        let mut next: BTreeMap<StateKey, Node<E::State>> = BTreeMap::new();
        for (key, node) in &frontier {
            expansions += n_actions;
            if expansions > budget {
                return Err(FmcError::BudgetExceeded { count: expansions, budget });
            }
            let pi = policy.scan_at(key)?;
            for (a, &p) in pi.weights().iter().enumerate() {
                let s = env.step(&node.state, &Action::Discrete(a), dt);
                let k = env.canonical_key(&s);
                let entry = next.entry(k).or_insert_with(|| Node {
                    state: s,
                    mass: 0.0,
                    paths: 0,
                    by_action: vec![0.0; n_actions],
                });
                entry.mass += node.mass * p;
                entry.paths = entry.paths.saturating_add(node.paths);
                if t == 1 {
                    entry.by_action[a] += node.mass * p;
                    initial_action_mass[a] += node.mass * p;
                } else {
                    for (acc, &m) in entry.by_action.iter_mut().zip(&node.by_action) {
                        *acc += m * p;
                    }
                }
            }
        }
        frontier = next;
        slices.push(finish_slice(env, x0, &frontier));
        for (a, cond) in conditional.iter_mut().enumerate() {
            cond.push(
                frontier
                    .iter()
                    .filter(|(_, n)| n.by_action[a] > 0.0)
                    .map(|(k, n)| (k.clone(), n.by_action[a]))
                    .collect(),
            );
        }
    }

    Ok(SliceTable { dt, actions: n_actions, slices, conditional, initial_action_mass, expansions })
}

fn finish_slice<E: DiscreteEnvironment>(
    env: &E,
    root: &E::State,
    nodes: &BTreeMap<StateKey, Node<E::State>>,
) -> BTreeMap<StateKey, SliceEntry> {
    let rewards: Vec<f64> = nodes.values().map(|n| env.reward(root, &n.state)).collect();
    let total: f64 = rewards.iter().sum();
    let uniform = 1.0 / nodes.len() as f64;
    nodes
        .iter()
        .zip(rewards)
        .map(|((k, n), r)| {
            // a slice of dead states has no reward to follow: spread evenly
            let reward_mass = if total > 0.0 { r / total } else { uniform };
            (k.clone(), SliceEntry { scan_mass: n.mass, reward: r, reward_mass, paths: n.paths })
        })
        .collect()
}
