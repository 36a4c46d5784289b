use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{FmcError, Result};

/// The set of actions an environment accepts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionSpec {
    Discrete { count: usize },
    Continuous { bounds: Vec<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Action {
    Discrete(usize),
    Continuous(Vec<f64>),
}

impl Action {
    pub fn index(&self) -> Option<usize> {
        match self {
            Action::Discrete(i) => Some(*i),
            Action::Continuous(_) => None,
        }
    }

    pub fn vector(&self) -> Option<&[f64]> {
        match self {
            Action::Discrete(_) => None,
            Action::Continuous(v) => Some(v),
        }
    }
}

impl ActionSpec {
    pub fn discrete(count: usize) -> Result<Self> {
        let spec = ActionSpec::Discrete { count };
        spec.validate()?;
        Ok(spec)
    }

    pub fn continuous(bounds: Vec<(f64, f64)>) -> Result<Self> {
        let spec = ActionSpec::Continuous { bounds };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ActionSpec::Discrete { count } if *count < 2 => Err(FmcError::InvalidActionSpec(
                format!("discrete action count must be >= 2, got {count}"),
            )),
            ActionSpec::Continuous { bounds } if bounds.is_empty() => Err(
                FmcError::InvalidActionSpec("continuous spec needs at least one dimension".into()),
            ),
            ActionSpec::Continuous { bounds } => {
                for (k, &(lo, hi)) in bounds.iter().enumerate() {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(FmcError::InvalidActionSpec(format!(
                            "dimension {k} has invalid bounds [{lo}, {hi}]"
                        )));
                    }
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(self, ActionSpec::Discrete { .. })
    }

    /// Number of discrete actions, or `None` for continuous specs.
    pub fn count(&self) -> Option<usize> {
        match self {
            ActionSpec::Discrete { count } => Some(*count),
            ActionSpec::Continuous { .. } => None,
        }
    }

    pub fn dims(&self) -> usize {
        match self {
            ActionSpec::Discrete { .. } => 1,
            ActionSpec::Continuous { bounds } => bounds.len(),
        }
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Action {
        match self {
            ActionSpec::Discrete { count } => Action::Discrete(rng.random_range(0..*count)),
            ActionSpec::Continuous { bounds } => Action::Continuous(
                bounds
                    .iter()
                    .map(|&(lo, hi)| lo + (hi - lo) * rng.random::<f64>())
                    .collect(),
            ),
        }
    }

    /// Clips an action into the spec. Discrete indices are clamped to the last action.
    pub fn clip(&self, action: &Action) -> Action {
        match (self, action) {
            (ActionSpec::Discrete { count }, Action::Discrete(i)) => {
                Action::Discrete((*i).min(count - 1))
            }
            (ActionSpec::Continuous { bounds }, Action::Continuous(v)) => Action::Continuous(
                v.iter()
                    .zip(bounds)
                    .map(|(&x, &(lo, hi))| x.clamp(lo, hi))
                    .collect(),
            ),
            _ => action.clone(),
        }
    }

    pub fn contains(&self, action: &Action) -> bool {
        match (self, action) {
            (ActionSpec::Discrete { count }, Action::Discrete(i)) => i < count,
            (ActionSpec::Continuous { bounds }, Action::Continuous(v)) => {
                v.len() == bounds.len()
                    && v.iter().zip(bounds).all(|(&x, &(lo, hi))| x >= lo && x <= hi)
            }
            _ => false,
        }
    }

    /// Partitions a continuous box into `per_dim` equal cells along every
    /// dimension and returns the cell count. Discrete specs have one cell per action.
    pub fn cell_count(&self, per_dim: usize) -> usize {
        match self {
            ActionSpec::Discrete { count } => *count,
            ActionSpec::Continuous { bounds } => per_dim.pow(bounds.len() as u32),
        }
    }

    /// Center point of a cell of the `per_dim`-grid, row-major with dimension 0 most significant.
    pub fn cell_center(&self, per_dim: usize, cell: usize) -> Action {
        match self {
            ActionSpec::Discrete { .. } => Action::Discrete(cell),
            ActionSpec::Continuous { bounds } => {
                let idx = cell_digits(cell, per_dim, bounds.len());
                Action::Continuous(
                    bounds
                        .iter()
                        .zip(idx)
                        .map(|(&(lo, hi), i)| {
                            let w = (hi - lo) / per_dim as f64;
                            lo + w * (i as f64 + 0.5)
                        })
                        .collect(),
                )
            }
        }
    }

    /// Uniform sample inside one grid cell.
    pub fn sample_in_cell<R: Rng + ?Sized>(&self, per_dim: usize, cell: usize, rng: &mut R) -> Action {
        match self {
            ActionSpec::Discrete { .. } => Action::Discrete(cell),
            ActionSpec::Continuous { bounds } => {
                let idx = cell_digits(cell, per_dim, bounds.len());
                Action::Continuous(
                    bounds
                        .iter()
                        .zip(idx)
                        .map(|(&(lo, hi), i)| {
                            let w = (hi - lo) / per_dim as f64;
                            lo + w * (i as f64 + rng.random::<f64>())
                        })
                        .collect(),
                )
            }
        }
    }
}

fn cell_digits(mut cell: usize, per_dim: usize, dims: usize) -> Vec<usize> {
    let mut digits = vec![0; dims];
    for d in (0..dims).rev() {
        digits[d] = cell % per_dim;
        cell /= per_dim;
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_degenerate_specs() {
        assert!(ActionSpec::discrete(1).is_err());
        assert!(ActionSpec::continuous(vec![]).is_err());
        assert!(ActionSpec::continuous(vec![(1.0, 1.0)]).is_err());
        assert!(ActionSpec::continuous(vec![(0.0, 1.0), (-1.0, 1.0)]).is_ok());
    }

    #[test]
    fn uniform_samples_stay_in_bounds() {
        let spec = ActionSpec::continuous(vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            assert!(spec.contains(&spec.sample_uniform(&mut rng)));
        }
    }

    #[test]
    fn cell_layout_is_row_major() {
        let spec = ActionSpec::continuous(vec![(0.0, 1.0), (-1.0, 1.0)]).unwrap();
        assert_eq!(spec.cell_count(3), 9);
        let c = spec.cell_center(3, 7);
        let v = c.vector().unwrap();
        assert!((v[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!(v[1].abs() < 1e-12);
    }
}
