use fmc_core::env::RocketState;
use fmc_core::wave::{blend_prior, PriorProvider};
use fmc_core::{ActionSpec, Distribution};
use serde::{Deserialize, Serialize};

use crate::AssistError;

/// Cells per action dimension. The rocket box is (main thrust, side torque),
/// so the prior lives on 3 x 3 = 9 cells, row-major with thrust most significant.
pub const RESOLUTION: usize = 3;
pub const CELLS: usize = RESOLUTION * RESOLUTION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    #[default]
    None,
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    /// Action cell a direction pushes toward.
    ///
    /// Positive side torque raises the heading, which tilts the thrust vector
    /// toward -x, so "left" is positive torque.
    pub fn cell(self) -> Option<usize> {
        let cell = |thrust: usize, torque: usize| thrust * RESOLUTION + torque;
        match self {
            Direction::None => None,
            Direction::Up => Some(cell(2, 1)),
            Direction::Down => Some(cell(0, 1)),
            Direction::Left => Some(cell(1, 2)),
            Direction::Right => Some(cell(1, 0)),
        }
    }
}

/// The `type` tag of a steering message; anything but `"steer"` is rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SteerTag {
    #[default]
    Steer,
}

/// Inbound `{"type":"steer", ...}` message.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SteeringMessage {
    #[serde(rename = "type")]
    pub kind: SteerTag,
    #[serde(default)]
    pub direction: Direction,
    #[serde(default)]
    pub strength: f64,
    /// Raw weights over the 9 action cells; overrides `direction` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior: Option<Vec<f64>>,
}

impl SteeringMessage {
    pub fn new(direction: Direction, strength: f64) -> Self {
        Self { kind: SteerTag::Steer, direction, strength, prior: None }
    }
}

/// A validated steering command, ready to bias walker sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct SteeringPrior {
    /// The human's prior before blending.
    pub prior: Distribution,
    /// Credibility given to it.
    pub strength: f64,
}

impl SteeringPrior {
    pub fn uniform() -> Self {
        Self { prior: Distribution::uniform(CELLS), strength: 0.0 }
    }

    /// Whether walkers can skip the prior and sample uniformly.
    pub fn is_neutral(&self) -> bool {
        self.strength == 0.0 || self.prior.is_uniform()
    }

    /// What walkers actually sample from.
    pub fn blended(&self) -> Distribution {
        blend_prior(&self.prior, self.strength)
    }
}

impl PriorProvider<RocketState> for SteeringPrior {
    fn prior(&self, _state: &RocketState) -> Distribution {
        self.prior.clone()
    }

    fn resolution(&self) -> usize {
        RESOLUTION
    }
}

/// Turns a steering message into a prior over the 9 action cells.
///
/// `max_strength` rescales the user's [0, 1] strength. The steered cell gets
/// `1/9 + s * 8/9` and the other eight share the rest.
pub fn apply_steering(msg: &SteeringMessage, spec: &ActionSpec, max_strength: f64) -> Result<SteeringPrior, AssistError> {
    if spec.cell_count(RESOLUTION) != CELLS {
        return Err(AssistError::Steering(format!("action box has {} cells, expected {CELLS}", spec.cell_count(RESOLUTION))));
    }
    if !(0.0..=1.0).contains(&msg.strength) {
        return Err(AssistError::Steering(format!("strength must be in [0, 1], got {}", msg.strength)));
    }
    let strength = msg.strength * max_strength.clamp(0.0, 1.0);
    let prior = match (&msg.prior, msg.direction.cell()) {
        (Some(raw), _) => {
            if raw.len() != CELLS {
                return Err(AssistError::Steering(format!("prior needs {CELLS} weights, got {}", raw.len())));
            }
            Distribution::new(raw.clone()).map_err(|e| AssistError::Steering(e.to_string()))?
        }
        (None, None) => return Ok(SteeringPrior::uniform()),
        (None, Some(cell)) => {
            let u = 1.0 / CELLS as f64;
            let w = u + strength * (1.0 - u);
            let rest = (1.0 - w) / (CELLS - 1) as f64;
            let weights = (0..CELLS).map(|i| if i == cell { w } else { rest }).collect();
            Distribution::normalized(weights).expect("weights are positive")
        }
    };
    Ok(SteeringPrior { prior, strength })
}
