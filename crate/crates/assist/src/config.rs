use fmc_core::{DecisionMode, FmcParams};
use serde::{Deserialize, Serialize};

use crate::AssistError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SessionConfig {
    /// 0 is the goal-less autopilot: walkers only chase diversity, which keeps the rocket flying.
    pub alpha: f64,
    pub beta: f64,
    pub walkers: usize,
    pub ticks: usize,
    /// Seconds simulated per walker tick.
    pub dt: f64,
    /// Frames per second; each frame advances the live rocket by `1 / fps` seconds.
    pub fps: f64,
    /// A steering message with strength `s` is applied with strength `s * max_strength`.
    /// Below one, some walkers always explore off the steered cell, so the swarm
    /// can still find and prefer the safe way out.
    pub max_strength: f64,
    /// When fewer than this share of walkers survive the steered cone the
    /// steering is crash-bound, and the frame is replanned without it.
    pub veto_below: f64,
    /// Seconds a crashed rocket stays on screen before the session resets.
    pub reset_after: f64,
    pub seed: u64,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            beta: 1.0,
            walkers: 100,
            ticks: 15,
            dt: 0.1,
            fps: 10.0,
            max_strength: 0.8,
            veto_below: 0.9,
            reset_after: 3.0,
            seed: 0,
        }
    }
}

impl SessionConfig {
    pub fn params(&self, seed: u64) -> FmcParams {
        FmcParams {
            n_walkers: self.walkers,
            ticks: self.ticks,
            dt: self.dt,
            alpha: self.alpha,
            beta: self.beta,
            decision_mode: DecisionMode::Argmax,
            seed,
            parallel: true,
            ..Default::default()
        }
    }

    pub fn frame_dt(&self) -> f64 {
        1.0 / self.fps
    }

    /// Frames a crashed rocket is held before reset.
    pub fn reset_frames(&self) -> u64 {
        (self.reset_after * self.fps).round().max(1.0) as u64
    }

    pub fn validate(&self) -> Result<(), AssistError> {
        self.params(self.seed).validate()?;
        if !(self.fps.is_finite() && self.fps > 0.0) {
            return Err(AssistError::Config(format!("fps must be positive, got {}", self.fps)));
        }
        if !(0.0..=1.0).contains(&self.max_strength) {
            return Err(AssistError::Config(format!("max_strength must be in [0, 1], got {}", self.max_strength)));
        }
        if !(0.0..=1.0).contains(&self.veto_below) {
            return Err(AssistError::Config(format!("veto_below must be in [0, 1], got {}", self.veto_below)));
        }
        if !(self.reset_after.is_finite() && self.reset_after >= 0.0) {
            return Err(AssistError::Config(format!("reset_after must be >= 0, got {}", self.reset_after)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SessionConfig::default();
        c.validate().unwrap();
        assert_eq!(c.reset_frames(), 30);
        assert_eq!(c.params(5).seed, 5);
    }

    #[test]
    fn rejects_bad_values() {
        for c in [
            SessionConfig { walkers: 1, ..Default::default() },
            SessionConfig { fps: 0.0, ..Default::default() },
            SessionConfig { max_strength: 1.5, ..Default::default() },
            SessionConfig { dt: -0.1, ..Default::default() },
        ] {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
