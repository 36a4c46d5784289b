use std::collections::HashMap;

use fmc_core::env::{CartPole, CartPoleState, GridLayout, GridWorld};
use fmc_core::wave::prior::{blend_prior, credibility, walker_budget, TabularPrior, UniformPrior};
use fmc_core::{
    run_controller, run_episode, run_episode_from, vanilla_mc_decide, Action, DiscreteEnvironment, Distribution,
    Environment, FmcError, FmcParams, PriorSource,
};

fn cartpole_params() -> FmcParams {
    FmcParams { n_walkers: 50, ticks: 20, dt: 0.02, alpha: 1.0, ..Default::default() }
}

#[test]
fn zero_steps_is_rejected() {
    let env = CartPole::default();
    assert!(matches!(run_episode(&env, &cartpole_params(), 0, None), Err(FmcError::InvalidParams(_))));
}

#[test]
fn one_step_episode() {
    let env = CartPole::default();
    let t = run_episode(&env, &cartpole_params(), 1, None).unwrap();
    assert_eq!(t.len(), 1);
    assert_eq!(t.survival, 1);
}

#[test]
fn dead_start_gives_an_empty_trajectory() {
    let env = CartPole::default();
    let t = run_episode_from(&env, CartPoleState::new(3.0, 0.0, 0.0, 0.0), &cartpole_params(), 10, None).unwrap();
    assert!(t.is_empty());
    assert_eq!(t.survival, 0);
}

#[test]
fn every_step_costs_walkers_times_ticks() {
    let env = CartPole::default();
    let t = run_episode(&env, &cartpole_params(), 25, None).unwrap();
    assert_eq!(t.len(), 25);
    assert!(t.samples_per_step.iter().all(|&s| s == 1000));
    assert_eq!(t.mean_samples_per_action(), 1000.0);
}

#[test]
fn episodes_are_reproducible() {
    let env = CartPole::default();
    let p = FmcParams { seed: 99, ..cartpole_params() };
    let a = run_episode(&env, &p, 30, None).unwrap();
    let b = run_episode(&env, &FmcParams { parallel: true, ..p }, 30, None).unwrap();
    assert_eq!(a.actions, b.actions);
    assert_eq!(a.states, b.states);
}

#[test]
fn states_follow_the_recorded_actions() {
    let env = CartPole::default();
    let p = cartpole_params();
    let t = run_episode(&env, &p, 20, None).unwrap();
    let mut s = env.initial_state();
    for (a, next) in t.actions.iter().zip(&t.states) {
        s = env.step(&s, a, p.dt);
        assert_eq!(&s, next);
    }
}

#[test]
fn controller_errors_propagate() {
    let env = CartPole::default();
    let r = run_controller(&env, env.initial_state(), 0.02, 5, |_, _| {
        Err::<(Action, usize), _>(FmcError::Environment("boom".into()))
    });
    assert!(matches!(r, Err(FmcError::Environment(_))));
}

#[test]
fn vanilla_baseline_spends_the_same_budget() {
    let env = CartPole::default();
    let d = vanilla_mc_decide(&env, &env.initial_state(), &cartpole_params()).unwrap();
    assert_eq!(d.samples_used, 1000);
    assert!(env.action_spec().contains(&d.chosen));
}

#[test]
fn blend_and_budget_examples() {
    let prior = Distribution::new(vec![1.0, 0.0]).unwrap();
    assert_eq!(blend_prior(&prior, 0.0), Distribution::uniform(2));
    assert_eq!(blend_prior(&prior, 1.0), prior);
    assert_eq!(blend_prior(&prior, 0.5).weights(), &[0.75, 0.25]);
    let perfect = credibility(&prior, &prior).unwrap();
    assert_eq!(perfect, 1.0);
    assert!(walker_budget(100, perfect) >= 2);
    assert_eq!(walker_budget(100, 0.0), 100);
}

#[test]
fn prior_steers_the_swarm() {
    // a prior that always pushes right, fully trusted, makes every initial action right
    let env = GridWorld::new(&GridLayout::three_by_three()).unwrap();
    let right = Distribution::point(4, GridWorld::RIGHT);
    let table: HashMap<_, _> = [(env.canonical_key(&env.initial_state()), right)].into_iter().collect();
    let prior = TabularPrior::new(&env, table).unwrap();
    let source = PriorSource { provider: &prior, credibility: 1.0, adaptive: false };
    let p = FmcParams { n_walkers: 16, ticks: 1, dt: 1.0, ..Default::default() };
    let t = run_episode(&env, &p, 1, Some(&source)).unwrap();
    assert_eq!(t.actions[0], Action::Discrete(GridWorld::RIGHT));

    let uniform = UniformPrior::discrete(4);
    let source = PriorSource { provider: &uniform, credibility: 1.0, adaptive: true };
    assert!(run_episode(&env, &p, 2, Some(&source)).is_ok());
}

#[test]
fn vanilla_ties_go_to_the_first_walk() {
    // no goal and no cliffs: every final reward is equal
    let env = GridWorld::new(&GridLayout::new(&["...", ".S.", "..."], 0.0)).unwrap();
    let one = FmcParams { n_walkers: 1, ticks: 3, dt: 1.0, seed: 4, ..Default::default() };
    let many = FmcParams { n_walkers: 40, ..one.clone() };
    let a = vanilla_mc_decide(&env, &env.initial_state(), &one).unwrap();
    let b = vanilla_mc_decide(&env, &env.initial_state(), &many).unwrap();
    assert_eq!(a.chosen, b.chosen);
    assert_eq!(a.samples_used, 3);
}

#[test]
fn vanilla_finds_the_only_route() {
    // the goal is exactly two moves right; any other first move misses it
    let env = GridWorld::new(&GridLayout::new(&["S.G"], 4.0)).unwrap();
    for seed in 0..5 {
        let p = FmcParams { n_walkers: 1000, ticks: 2, dt: 1.0, seed, ..Default::default() };
        let d = vanilla_mc_decide(&env, &env.initial_state(), &p).unwrap();
        assert_eq!(d.chosen, Action::Discrete(GridWorld::RIGHT));
    }
}
