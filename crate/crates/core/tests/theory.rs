use std::collections::BTreeMap;

use fmc_core::env::{DiscreteEnvironment, GridLayout, GridWorld, StateKey};
use fmc_core::theory::{
    decision_suboptimality, empirical_slices, enumerate_cone, enumerate_cone_with_budget, global_suboptimality,
    intelligent_decision, iq, scan_score, scan_suboptimality, total_variation, PolicyMetrics, TabularPolicy,
};
use fmc_core::{
    shannon_entropy, Action, ActionSampler, ActionSpec, Distribution, Environment, FmcError, FmcParams, Observation,
    RewardComponent,
};

/// Binary tree of depth-indexed nodes: every action sequence ends somewhere new.
struct Tree {
    spec: ActionSpec,
}

impl Tree {
    fn new() -> Self {
        Self { spec: ActionSpec::Discrete { count: 2 } }
    }
}

impl Environment for Tree {
    type State = (u8, u8);

    fn action_spec(&self) -> &ActionSpec {
        &self.spec
    }

    fn initial_state(&self) -> (u8, u8) {
        (0, 0)
    }

    fn step(&self, s: &(u8, u8), a: &Action, _dt: f64) -> (u8, u8) {
        (s.0 + 1, s.1 * 2 + a.index().unwrap() as u8)
    }

    fn reward_components(&self, _root: &(u8, u8), _s: &(u8, u8)) -> Vec<RewardComponent> {
        vec![RewardComponent::unit(1.0)]
    }

    fn is_dead(&self, _s: &(u8, u8)) -> bool {
        false
    }

    fn distance(&self, a: &(u8, u8), b: &(u8, u8)) -> f64 {
        (a.1 as f64 - b.1 as f64).abs()
    }

    fn observe(&self, s: &(u8, u8)) -> Observation {
        Observation::Vector(vec![s.0 as f64, s.1 as f64])
    }
}

impl DiscreteEnvironment for Tree {
    fn canonical_key(&self, s: &(u8, u8)) -> StateKey {
        vec![s.0, s.1]
    }
}

/// Action 0 parks in a single absorbing state, action 1 opens a fork.
struct Fork {
    spec: ActionSpec,
}

const ROOT: u8 = 0;
const PARK: u8 = 1;
const FORK: u8 = 2;
const LEFT: u8 = 3;
const RIGHT: u8 = 4;

impl Environment for Fork {
    type State = u8;

    fn action_spec(&self) -> &ActionSpec {
        &self.spec
    }

    fn initial_state(&self) -> u8 {
        ROOT
    }

    fn step(&self, s: &u8, a: &Action, _dt: f64) -> u8 {
        let a = a.index().unwrap();
        match *s {
            ROOT if a == 0 => PARK,
            ROOT => FORK,
            FORK if a == 0 => LEFT,
            FORK => RIGHT,
            other => other,
        }
    }

    fn reward_components(&self, _root: &u8, _s: &u8) -> Vec<RewardComponent> {
        vec![RewardComponent::unit(1.0)]
    }

    fn is_dead(&self, _s: &u8) -> bool {
        false
    }

    fn distance(&self, a: &u8, b: &u8) -> f64 {
        (*a as f64 - *b as f64).abs()
    }

    fn observe(&self, s: &u8) -> Observation {
        Observation::Key(s.to_string())
    }
}

impl DiscreteEnvironment for Fork {
    fn canonical_key(&self, s: &u8) -> StateKey {
        vec![*s]
    }
}

/// Two cells; the action picks the next cell, and cell 1 pays three times more.
struct Biased {
    spec: ActionSpec,
}

impl Environment for Biased {
    type State = u8;

    fn action_spec(&self) -> &ActionSpec {
        &self.spec
    }

    fn initial_state(&self) -> u8 {
        0
    }

    fn step(&self, _s: &u8, a: &Action, _dt: f64) -> u8 {
        a.index().unwrap() as u8
    }

    fn reward_components(&self, _root: &u8, s: &u8) -> Vec<RewardComponent> {
        vec![RewardComponent::unit(if *s == 1 { 3.0 } else { 1.0 })]
    }

    fn is_dead(&self, _s: &u8) -> bool {
        false
    }

    fn distance(&self, a: &u8, b: &u8) -> f64 {
        (*a as f64 - *b as f64).abs()
    }

    fn observe(&self, s: &u8) -> Observation {
        Observation::Key(s.to_string())
    }
}

impl DiscreteEnvironment for Biased {
    fn canonical_key(&self, s: &u8) -> StateKey {
        vec![*s]
    }
}

fn two_actions() -> ActionSpec {
    ActionSpec::Discrete { count: 2 }
}

fn biased_policy(p1: f64) -> TabularPolicy {
    let d = Distribution::new(vec![1.0 - p1, p1]).unwrap();
    TabularPolicy { scan: Default::default(), default: Some(d.clone()), decide: Some(d) }
}

fn grid3() -> GridWorld {
    GridWorld::new(&GridLayout::three_by_three()).unwrap()
}

#[test]
fn zero_ticks_is_the_root_alone() {
    let env = Tree::new();
    let table = enumerate_cone(&env, &env.initial_state(), 0, 1.0, &TabularPolicy::uniform(2)).unwrap();
    assert_eq!(table.ticks(), 0);
    assert_eq!(table.final_slice().len(), 1);
    assert_eq!(table.final_slice()[&vec![0, 0]].scan_mass, 1.0);
}

#[test]
fn two_ticks_of_a_binary_tree_give_four_equal_leaves() {
    let env = Tree::new();
    let table = enumerate_cone(&env, &env.initial_state(), 2, 1.0, &TabularPolicy::uniform(2)).unwrap();
    let leaves = table.final_slice();
    assert_eq!(leaves.len(), 4);
    for e in leaves.values() {
        assert!((e.scan_mass - 0.25).abs() < 1e-12);
        assert_eq!(e.paths, 1);
    }
}

#[test]
fn slices_are_normalised() {
    let env = grid3();
    let table = enumerate_cone(&env, &env.initial_state(), 3, 1.0, &TabularPolicy::uniform(4)).unwrap();
    for t in 0..=3 {
        let scan: f64 = table.scan_weights(t).iter().sum();
        let reward: f64 = table.reward_weights(t).iter().sum();
        assert!((scan - 1.0).abs() < 1e-9, "tick {t} scan {scan}");
        assert!((reward - 1.0).abs() < 1e-9, "tick {t} reward {reward}");
    }
}

#[test]
fn conditional_cones_partition_each_slice() {
    let env = grid3();
    let table = enumerate_cone(&env, &env.initial_state(), 3, 1.0, &TabularPolicy::uniform(4)).unwrap();
    for t in 1..=3 {
        for (k, e) in &table.slices[t] {
            let sum: f64 = (0..4).map(|a| table.conditional[a][t].get(k).copied().unwrap_or(0.0)).sum();
            assert!((sum - e.scan_mass).abs() < 1e-9, "tick {t}");
        }
    }
}

#[test]
fn grid_cone_from_the_centre_has_at_most_sixteen_paths() {
    let env = grid3();
    let table = enumerate_cone(&env, &env.initial_state(), 2, 1.0, &TabularPolicy::uniform(4)).unwrap();
    let paths: u64 = table.final_slice().values().map(|e| e.paths).sum();
    assert!(paths <= 16, "{paths}");
}

#[test]
fn budget_guard_reports_the_count() {
    let env = grid3();
    let err = enumerate_cone_with_budget(&env, &env.initial_state(), 3, 1.0, &TabularPolicy::uniform(4), 3)
        .unwrap_err();
    assert!(matches!(err, FmcError::BudgetExceeded { budget: 3, .. }), "{err}");
}

#[test]
fn missing_policy_entry_is_an_error() {
    let env = Tree::new();
    let policy = TabularPolicy::default();
    assert!(matches!(
        enumerate_cone(&env, &env.initial_state(), 1, 1.0, &policy),
        Err(FmcError::MissingPolicyEntry(_))
    ));
}

#[test]
fn entropy_splits_over_the_initial_action() {
    // disjoint conditional cones: H(mixture) = H(action) + sum_a w_a H(cone | a)
    let env = Fork { spec: two_actions() };
    let table = enumerate_cone(&env, &ROOT, 2, 1.0, &TabularPolicy::uniform(2)).unwrap();
    let h_total = shannon_entropy(&table.scan_weights(2));
    let h_action = shannon_entropy(&table.initial_action_mass);
    let h_cond: f64 = (0..2)
        .map(|a| {
            let c: Vec<f64> = table.final_conditional(a).unwrap().values().copied().collect();
            table.initial_action_mass[a] * shannon_entropy(&c)
        })
        .sum();
    assert!((h_total - 1.5 * 2f64.ln()).abs() < 1e-12);
    assert!((h_total - (h_action + h_cond)).abs() < 1e-12);
}

#[test]
fn intelligent_decision_examples() {
    let fork = Fork { spec: two_actions() };
    let table = enumerate_cone(&fork, &ROOT, 2, 1.0, &TabularPolicy::uniform(2)).unwrap();
    assert_eq!(intelligent_decision(&table).weights(), &[0.0, 1.0]);

    let tree = Tree::new();
    let table = enumerate_cone(&tree, &tree.initial_state(), 3, 1.0, &TabularPolicy::uniform(2)).unwrap();
    let id = intelligent_decision(&table);
    assert!((id.weights()[0] - 0.5).abs() < 1e-12);

    let grid = grid3();
    let table = enumerate_cone(&grid, &grid.initial_state(), 3, 1.0, &TabularPolicy::uniform(4)).unwrap();
    let sum: f64 = intelligent_decision(&table).weights().iter().sum();
    assert!((sum - 1.0).abs() < 1e-12);
}

#[test]
fn random_policy_is_the_unit() {
    let env = grid3();
    let s = scan_suboptimality(&env, &env.initial_state(), 3, 1.0, &TabularPolicy::uniform(4)).unwrap();
    assert_eq!(s, 1.0);
}

#[test]
fn reward_matching_policy_scores_zero() {
    let env = Biased { spec: two_actions() };
    let s = scan_suboptimality(&env, &0, 3, 0.5, &biased_policy(0.75)).unwrap();
    assert_eq!(s, 0.0);
}

#[test]
fn biased_policy_lands_between() {
    let env = Biased { spec: two_actions() };
    let s = scan_suboptimality(&env, &0, 3, 0.5, &biased_policy(0.6)).unwrap();
    // D((.25,.75) || (.4,.6)) / D((.25,.75) || (.5,.5)), evaluated separately
    assert!((s - 0.38113278962081193).abs() < 1e-12, "{s}");
}

#[test]
fn never_reaching_a_rewarded_state_is_infinite() {
    let env = Biased { spec: two_actions() };
    let s = scan_suboptimality(&env, &0, 2, 1.0, &biased_policy(0.0)).unwrap();
    assert_eq!(s, f64::INFINITY);
}

#[test]
fn scan_score_ignores_tick_zero() {
    let env = Biased { spec: two_actions() };
    let table = enumerate_cone(&env, &0, 0, 1.0, &biased_policy(0.6)).unwrap();
    assert_eq!(scan_score(&table).unwrap(), 0.0);
}

#[test]
fn decision_and_global_examples() {
    let id = Distribution::new(vec![0.1, 0.9]).unwrap();
    assert_eq!(decision_suboptimality(&id, &id).unwrap(), 0.0);
    assert!((decision_suboptimality(&id, &Distribution::uniform(2)).unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(global_suboptimality(1.0, 1.0), 1.0);
    assert_eq!(iq(1.0), 1.0);
    assert_eq!(iq(0.0), f64::INFINITY);
    // uniform ID and uniform decision: 0/0 reads as optimal
    let u = Distribution::uniform(3);
    assert_eq!(decision_suboptimality(&u, &u).unwrap(), 0.0);
}

#[test]
fn exact_metrics_of_the_random_policy() {
    let env = grid3();
    let m = PolicyMetrics::exact(&env, &env.initial_state(), 3, 1.0, &TabularPolicy::uniform(4)).unwrap();
    assert_eq!(m.scan, 1.0);
    assert!((m.decision - 1.0).abs() < 1e-12 || m.decision == 0.0);
    assert!(m.iq > 0.0);
}

#[test]
fn walker_frequencies_approach_the_oracle() {
    let env = grid3();
    let table = enumerate_cone(&env, &env.initial_state(), 3, 1.0, &TabularPolicy::uniform(4)).unwrap();
    let params = FmcParams { n_walkers: 20_000, ticks: 3, dt: 1.0, cloning: false, seed: 11, ..Default::default() };
    let emp = empirical_slices(&env, &env.initial_state(), &params, ActionSampler::uniform()).unwrap();
    let oracle: BTreeMap<StateKey, f64> = table.final_slice().iter().map(|(k, e)| (k.clone(), e.scan_mass)).collect();
    let tv = total_variation(&oracle, emp.final_slice());
    assert!(tv < 0.02, "{tv}");
}

#[test]
fn slice_export_round_trips() {
    let env = grid3();
    let table = enumerate_cone(&env, &env.initial_state(), 2, 1.0, &TabularPolicy::uniform(4)).unwrap();
    let rows = table.rows();
    assert_eq!(rows.iter().filter(|r| r.tick == 0).count(), 1);
    let back: Vec<fmc_core::theory::SliceRow> = serde_json::from_str(&table.to_json()).unwrap();
    assert_eq!(back, rows);
}
