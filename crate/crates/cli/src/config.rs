use std::path::{Path, PathBuf};

use fmc_core::{DecisionMode, FmcParams};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EnvId {
    /// 3x3 cliff board
    Grid3,
    /// 5x5 cliff board
    Grid5,
    Cartpole,
    Rocket,
}

impl EnvId {
    pub fn name(self) -> &'static str {
        match self {
            EnvId::Grid3 => "grid3",
            EnvId::Grid5 => "grid5",
            EnvId::Cartpole => "cartpole",
            EnvId::Rocket => "rocket",
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, EnvId::Grid3 | EnvId::Grid5)
    }

    /// Seconds per tick used when the config leaves `dt` out.
    pub fn default_dt(self) -> f64 {
        match self {
            EnvId::Grid3 | EnvId::Grid5 => 1.0,
            EnvId::Cartpole => 0.02,
            EnvId::Rocket => 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    Fmc,
    Random,
    #[value(name = "vanilla_mc")]
    VanillaMc,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Fmc => "fmc",
            Policy::Random => "random",
            Policy::VanillaMc => "vanilla_mc",
        }
    }
}

/// A benchmark run. Read from one flat JSON object; flags override fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub env: EnvId,
    pub walkers: usize,
    pub ticks: usize,
    /// Defaults per environment when absent.
    pub dt: Option<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub decision_mode: DecisionMode,
    pub episodes: usize,
    pub max_steps: usize,
    pub policies: Vec<Policy>,
    pub seed: u64,
    /// Left out of `report.json` so reports do not depend on where they were written.
    #[serde(skip_serializing)]
    pub out: PathBuf,
    /// Record wall-clock columns. Off by default so reruns stay byte-identical.
    pub timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            env: EnvId::Cartpole,
            walkers: 50,
            ticks: 20,
            dt: None,
            alpha: 1.0,
            beta: 1.0,
            decision_mode: DecisionMode::Argmax,
            episodes: 10,
            max_steps: 1000,
            policies: vec![Policy::Fmc, Policy::Random, Policy::VanillaMc],
            seed: 0,
            out: PathBuf::from("fmc-report"),
            timing: false,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn dt(&self) -> f64 {
        self.dt.unwrap_or_else(|| self.env.default_dt())
    }

    pub fn params(&self, seed: u64) -> FmcParams {
        FmcParams {
            n_walkers: self.walkers,
            ticks: self.ticks,
            dt: self.dt(),
            alpha: self.alpha,
            beta: self.beta,
            decision_mode: self.decision_mode,
            seed,
            parallel: true,
            ..Default::default()
        }
    }

    /// Seed of episode `episode`.
    pub fn episode_seed(&self, episode: usize) -> u64 {
        self.seed.wrapping_add(episode as u64)
    }

    pub fn run_id(&self) -> String {
        format!("{}-n{}-m{}-s{}", self.env.name(), self.walkers, self.ticks, self.seed)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.params(self.seed).validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.alpha > 2.0 {
            return bad(format!("alpha must lie in [0, 2], got {}", self.alpha));
        }
        if self.episodes == 0 {
            return bad("episodes must be >= 1".into());
        }
        if self.max_steps == 0 {
            return bad("max_steps must be >= 1".into());
        }
        if self.policies.is_empty() {
            return bad("at least one policy is required".into());
        }
        let mut seen = self.policies.clone();
        seen.sort_by_key(|p| p.name());
        seen.dedup();
        if seen.len() != self.policies.len() {
            return bad("policies must not repeat".into());
        }
        if self.decision_mode == DecisionMode::Sample && self.env == EnvId::Rocket {
            return bad(format!("decision_mode sample needs discrete actions, {} is continuous", self.env.name()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn partial_json_keeps_defaults() {
        let c = RunConfig::from_json(r#"{"env": "grid3", "walkers": 8, "policies": ["random"]}"#).unwrap();
        assert_eq!(c.env, EnvId::Grid3);
        assert_eq!(c.walkers, 8);
        assert_eq!(c.ticks, 20);
        assert_eq!(c.dt(), 1.0);
        assert_eq!(c.policies, vec![Policy::Random]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(RunConfig::from_json(r#"{"walkres": 8}"#), Err(CliError::Config(_))));
    }

    #[test]
    fn bad_values_are_rejected() {
        for c in [
            RunConfig { walkers: 1, ..Default::default() },
            RunConfig { dt: Some(0.0), ..Default::default() },
            RunConfig { alpha: 3.0, ..Default::default() },
            RunConfig { episodes: 0, ..Default::default() },
            RunConfig { policies: vec![], ..Default::default() },
            RunConfig { policies: vec![Policy::Fmc, Policy::Fmc], ..Default::default() },
            RunConfig { env: EnvId::Rocket, decision_mode: DecisionMode::Sample, ..Default::default() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn episode_seeds_count_up() {
        let c = RunConfig { seed: 40, ..Default::default() };
        assert_eq!(c.episode_seed(0), 40);
        assert_eq!(c.episode_seed(3), 43);
    }
}
