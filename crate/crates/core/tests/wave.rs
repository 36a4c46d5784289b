use std::collections::{HashSet, VecDeque};

use fmc_core::env::{GridLayout, GridState, GridWorld};
use fmc_core::wave::{swarm_wave, RolloutDataset};
use fmc_core::{Action, Environment, FmcParams};

fn grid3() -> GridWorld {
    GridWorld::new(&GridLayout::three_by_three()).unwrap()
}

fn wave_params(n: usize, seed: u64) -> FmcParams {
    FmcParams { n_walkers: n, dt: 1.0, seed, ..Default::default() }
}

/// Fewest moves from the start to the goal, by breadth-first search.
fn shortest_moves(env: &GridWorld) -> usize {
    let start = env.initial_state();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([(start, 0)]);
    while let Some((s, d)) = queue.pop_front() {
        if env.points(&s) > 0.0 {
            return d;
        }
        for a in 0..4 {
            let next = env.step(&s, &Action::Discrete(a), 1.0);
            if !env.is_dead(&next) && seen.insert(next) {
                queue.push_back((next, d + 1));
            }
        }
    }
    unreachable!("goal unreachable")
}

fn replay(env: &GridWorld, actions: &[Action]) -> Vec<GridState> {
    let mut s = env.initial_state();
    actions
        .iter()
        .map(|a| {
            s = env.step(&s, a, 1.0);
            s
        })
        .collect()
}

#[test]
fn target_already_met_returns_an_empty_path() {
    let env = grid3();
    let r = swarm_wave(&env, &env.initial_state(), 0.0, &wave_params(8, 0), 50).unwrap();
    assert!(r.path.is_empty());
    assert_eq!(r.ticks, 0);
    assert!(r.complete);
    assert_eq!(r.samples_used, 0);
}

#[test]
fn two_step_goal_is_found_in_two_moves() {
    let env = grid3();
    assert_eq!(shortest_moves(&env), 2);
    for seed in 0..5 {
        let r = swarm_wave(&env, &env.initial_state(), env.goal_bonus(), &wave_params(256, seed), 20).unwrap();
        assert!(r.complete);
        assert_eq!(r.path.len(), 2, "seed {seed}");
        assert_eq!(r.best_score(), env.goal_bonus());
    }
}

#[test]
fn best_path_replays_exactly() {
    let env = GridWorld::new(&GridLayout::five_by_five()).unwrap();
    let r = swarm_wave(&env, &env.initial_state(), env.goal_bonus(), &wave_params(64, 3), 200).unwrap();
    let states = replay(&env, &r.actions());
    assert_eq!(states.len(), r.path.len());
    for (node, s) in r.path.iter().zip(&states) {
        assert_eq!(&node.state, s);
    }
    for (i, node) in r.path.iter().enumerate() {
        assert_eq!(node.depth, i + 1);
    }
}

#[test]
fn samples_are_walkers_times_ticks() {
    let env = GridWorld::new(&GridLayout::five_by_five()).unwrap();
    for (n, seed) in [(4, 0), (16, 1), (32, 2)] {
        let r = swarm_wave(&env, &env.initial_state(), env.goal_bonus(), &wave_params(n, seed), 40).unwrap();
        assert_eq!(r.samples_used, n * r.ticks);
    }
}

#[test]
fn unreachable_target_is_flagged_incomplete() {
    let env = grid3();
    let r = swarm_wave(&env, &env.initial_state(), 1e9, &wave_params(8, 0), 10).unwrap();
    assert!(!r.complete);
    assert_eq!(r.ticks, 10);
    assert_eq!(r.samples_used, 80);
}

#[test]
fn dataset_leads_with_the_best_path() {
    let env = grid3();
    let r = swarm_wave(&env, &env.initial_state(), env.goal_bonus(), &wave_params(64, 7), 20).unwrap();
    let first: Vec<_> = r.dataset.rows.iter().filter(|row| row.episode == 0).collect();
    assert_eq!(first.len(), r.path.len());
    let actions: Vec<Action> = first.iter().map(|row| row.action.clone()).collect();
    assert_eq!(actions, r.actions());
    assert!(first.last().unwrap().done);
    let reward: f64 = first.iter().map(|row| row.reward).sum();
    assert_eq!(reward, r.best_score());
    assert!(r.dataset.episodes() >= 1);
}

#[test]
fn dataset_exports() {
    let env = grid3();
    let r = swarm_wave(&env, &env.initial_state(), env.goal_bonus(), &wave_params(16, 1), 20).unwrap();
    let csv = r.dataset.to_csv();
    let header = csv.lines().next().unwrap();
    assert_eq!(header, RolloutDataset::CSV_COLUMNS.join(","));
    assert_eq!(csv.lines().count(), r.dataset.len() + 1);
    let lines: Vec<serde_json::Value> =
        r.dataset.to_ndjson().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), r.dataset.len());
    assert!(lines[0].get("observation").is_some());
}
