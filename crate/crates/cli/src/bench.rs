use std::time::Instant;

use fmc_core::env::{CartPole, GridLayout, GridWorld, Rocket};
use fmc_core::theory::{
    decision_suboptimality, empirical_scan_suboptimality, empirical_slices, enumerate_cone, intelligent_decision,
    PolicyMetrics, SliceTable, TabularPolicy,
};
use fmc_core::{
    random_action, run_controller, run_episode_from, step_seed, vanilla_mc_decide, ActionSampler, Decision,
    DiscreteEnvironment, Distribution, Environment, FmcParams, Trajectory,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{EnvId, Policy, RunConfig};
use crate::report::{Report, ReportRow};
use crate::CliError;

pub fn grid_world(id: EnvId) -> Option<GridWorld> {
    let layout = match id {
        EnvId::Grid3 => GridLayout::three_by_three(),
        EnvId::Grid5 => GridLayout::five_by_five(),
        _ => return None,
    };
    Some(GridWorld::new(&layout).expect("bundled boards parse"))
}

/// Runs every configured policy for every episode and writes the reports.
pub fn run_benchmark(config: &RunConfig) -> Result<Report, CliError> {
    let report = benchmark(config)?;
    report.write(&config.out)?;
    if let Some(env) = grid_world(config.env) {
        crate::slices::write_slices(&env, config.ticks, config.dt(), &config.out.join("slices.json"))?;
    }
    Ok(report)
}

/// Same as [`run_benchmark`] without touching the filesystem.
pub fn benchmark(config: &RunConfig) -> Result<Report, CliError> {
    config.validate()?;
    let jobs: Vec<(Policy, usize)> =
        config.policies.iter().flat_map(|&p| (0..config.episodes).map(move |e| (p, e))).collect();
    let rows = match config.env {
        EnvId::Grid3 | EnvId::Grid5 => {
            let env = grid_world(config.env).expect("grid id");
            let random = enumerate_cone(
                &env,
                &env.initial_state(),
                config.ticks,
                config.dt(),
                &TabularPolicy::uniform(env.action_count()),
            )?;
            run_jobs(&jobs, |p, e| {
                let mut row = episode(&env, config, p, e)?;
                let m = grid_metrics(&env, &random, config, p, row.seed)?;
                row.scan_subopt = Some(m.scan);
                row.decision_subopt = Some(m.decision);
                row.iq = Some(m.iq);
                Ok(row)
            })?
        }
        EnvId::Cartpole => {
            let env = CartPole::default();
            run_jobs(&jobs, |p, e| episode(&env, config, p, e))?
        }
        EnvId::Rocket => {
            let env = Rocket::default();
            run_jobs(&jobs, |p, e| episode(&env, config, p, e))?
        }
    };
    Ok(Report::new(config.clone(), rows))
}

fn run_jobs<F>(jobs: &[(Policy, usize)], f: F) -> Result<Vec<ReportRow>, CliError>
where
    F: Fn(Policy, usize) -> Result<ReportRow, CliError> + Sync,
{
    jobs.par_iter().map(|&(p, e)| f(p, e)).collect()
}

fn episode<E: Environment>(env: &E, config: &RunConfig, policy: Policy, episode: usize) -> Result<ReportRow, CliError> {
    let seed = config.episode_seed(episode);
    let params = config.params(seed);
    let start = env.initial_state();
    let t0 = Instant::now();
    let traj: Trajectory<E::State> = match policy {
        Policy::Fmc => run_episode_from(env, start, &params, config.max_steps, None)?,
        Policy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            run_controller(env, start, params.dt, config.max_steps, |_, _| {
                Ok((random_action(env.action_spec(), &mut rng), 0))
            })?
        }
        Policy::VanillaMc => run_controller(env, start, params.dt, config.max_steps, |step, s| {
            let step_params = FmcParams { seed: step_seed(seed, step), ..params.clone() };
            let d = vanilla_mc_decide(env, s, &step_params)?;
            Ok((d.chosen, d.samples_used))
        })?,
    };
    let wall_ms = config.timing.then(|| t0.elapsed().as_secs_f64() * 1e3);
    let samples: usize = traj.samples_per_step.iter().sum();
    Ok(ReportRow {
        run_id: config.run_id(),
        env: config.env.name().to_string(),
        policy: policy.name().to_string(),
        episode,
        seed,
        survival: traj.survival,
        score: traj.total_reward(),
        samples_per_action: if traj.is_empty() { 0 } else { samples / traj.len() },
        wall_ms,
        scan_subopt: None,
        decision_subopt: None,
        iq: None,
    })
}

/// Sub-optimality of the policy's first decision, measured on the cone at the start cell.
///
/// FMC and vanilla MC are measured from walker frequencies of one swarm run
/// with the episode seed; the random policy is the unit by construction.
fn grid_metrics(
    env: &GridWorld,
    random: &SliceTable,
    config: &RunConfig,
    policy: Policy,
    seed: u64,
) -> Result<PolicyMetrics, CliError> {
    let x0 = env.initial_state();
    let params = config.params(seed);
    let uniform = Distribution::uniform(env.action_count());
    let m = match policy {
        Policy::Random => PolicyMetrics::new(1.0, decision_suboptimality(&intelligent_decision(random), &uniform)?),
        Policy::Fmc => {
            let emp = empirical_slices(env, &x0, &params, ActionSampler::uniform())?;
            let scan = empirical_scan_suboptimality(random, &emp)?;
            let pi_d = emp.decision.distribution().unwrap_or(uniform);
            PolicyMetrics::new(scan, decision_suboptimality(&emp.intelligent_decision(), &pi_d)?)
        }
        Policy::VanillaMc => {
            // its walks are uniform random walks; only the decision differs from random
            let walks = FmcParams { cloning: false, ..params.clone() };
            let emp = empirical_slices(env, &x0, &walks, ActionSampler::uniform())?;
            let scan = empirical_scan_suboptimality(random, &emp)?;
            let d: Decision = vanilla_mc_decide(env, &x0, &params)?;
            let pi_d = d.distribution().unwrap_or(uniform);
            PolicyMetrics::new(scan, decision_suboptimality(&intelligent_decision(random), &pi_d)?)
        }
    };
    Ok(m)
}
