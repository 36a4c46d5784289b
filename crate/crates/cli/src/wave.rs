use std::path::{Path, PathBuf};

use fmc_core::env::Rocket;
use fmc_core::wave::{swarm_wave, WaveResult};
use fmc_core::{Action, Environment, FmcParams, Observation};
use serde::Serialize;

use crate::bench::grid_world;
use crate::config::EnvId;
use crate::report::write_file;
use crate::CliError;

#[derive(Debug, Clone)]
pub struct WaveConfig {
    pub env: EnvId,
    pub walkers: usize,
    pub max_ticks: usize,
    /// Defaults to one goal: the bonus cell on the boards, one delivery for the rocket.
    pub target: Option<f64>,
    pub alpha: f64,
    pub dt: Option<f64>,
    pub seed: u64,
    pub out: PathBuf,
}

#[derive(Debug, Serialize)]
pub struct PathStep {
    pub depth: usize,
    pub action: Option<Action>,
    pub observation: Observation,
    pub score: f64,
}

#[derive(Debug, Serialize)]
pub struct WaveSummary {
    pub env: &'static str,
    pub walkers: usize,
    pub seed: u64,
    pub target: f64,
    pub complete: bool,
    pub ticks: usize,
    pub samples_used: usize,
    pub best_score: f64,
    pub episodes: usize,
    pub path: Vec<PathStep>,
}

fn summarise<E: Environment>(env: &E, cfg: &WaveConfig, target: f64, r: &WaveResult<E::State>) -> WaveSummary {
    WaveSummary {
        env: cfg.env.name(),
        walkers: cfg.walkers,
        seed: cfg.seed,
        target,
        complete: r.complete,
        ticks: r.ticks,
        samples_used: r.samples_used,
        best_score: r.best_score(),
        episodes: r.dataset.episodes(),
        path: std::iter::once(&r.root)
            .chain(&r.path)
            .map(|n| PathStep {
                depth: n.depth,
                action: n.action.clone(),
                observation: env.observe(&n.state),
                score: n.score,
            })
            .collect(),
    }
}

fn grow<E: Environment>(env: &E, cfg: &WaveConfig, target: f64) -> Result<(WaveSummary, String, String), CliError> {
    let params = FmcParams {
        n_walkers: cfg.walkers,
        dt: cfg.dt.unwrap_or_else(|| cfg.env.default_dt()),
        alpha: cfg.alpha,
        seed: cfg.seed,
        parallel: true,
        ..Default::default()
    };
    let r = swarm_wave(env, &env.initial_state(), target, &params, cfg.max_ticks)?;
    Ok((summarise(env, cfg, target, &r), r.dataset.to_csv(), r.dataset.to_ndjson()))
}

/// Grows one swarm-wave cone and writes `wave.json`, `dataset.csv` and `dataset.ndjson`.
pub fn run_wave(cfg: &WaveConfig) -> Result<WaveSummary, CliError> {
    if cfg.walkers < 2 {
        return Err(CliError::Config(format!("need at least 2 walkers, got {}", cfg.walkers)));
    }
    let (summary, csv, ndjson) = match cfg.env {
        EnvId::Grid3 | EnvId::Grid5 => {
            let env = grid_world(cfg.env).expect("grid id");
            grow(&env, cfg, cfg.target.unwrap_or(env.goal_bonus()))?
        }
        EnvId::Rocket => grow(&Rocket::default(), cfg, cfg.target.unwrap_or(1.0))?,
        EnvId::Cartpole => {
            return Err(CliError::Config("cartpole scores no points, a wave has nothing to reach".into()))
        }
    };
    write_outputs(&cfg.out, &summary, &csv, &ndjson)?;
    Ok(summary)
}

fn write_outputs(dir: &Path, summary: &WaveSummary, csv: &str, ndjson: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let json = serde_json::to_string_pretty(summary).expect("summary serialises") + "\n";
    write_file(&dir.join("wave.json"), &json)?;
    write_file(&dir.join("dataset.csv"), csv)?;
    write_file(&dir.join("dataset.ndjson"), ndjson)
}
