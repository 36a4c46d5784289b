//! Reward shaping: relativize and multiplicative goal composition.

use serde::{Deserialize, Serialize};

use crate::error::{FmcError, Result};

/// Maps arbitrary finite values onto a strictly positive, scale-free range.
///
/// Values are standardised with the population mean and standard deviation,
/// then `z <= 0` maps to `exp(z)` and `z > 0` to `1 + ln(1 + z)`. A zero
/// spread maps every value to 1.
pub fn relativize(values: &[f64]) -> Result<Vec<f64>> {
    let mut out = values.to_vec();
    relativize_in_place(&mut out)?;
    Ok(out)
}

pub fn relativize_in_place(values: &mut [f64]) -> Result<()> {
    if values.is_empty() {
        return Err(FmcError::Empty);
    }
    if let Some(index) = values.iter().position(|v| !v.is_finite()) {
        return Err(FmcError::NonFinite { index });
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt();
    if std == 0.0 || !std.is_normal() {
        values.iter_mut().for_each(|v| *v = 1.0);
        return Ok(());
    }
    for v in values.iter_mut() {
        let z = (*v - mean) / std;
        *v = if z <= 0.0 { z.exp() } else { 1.0 + z.ln_1p() };
    }
    Ok(())
}

/// One goal of a composite reward: its value and its exponent weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardComponent {
    pub value: f64,
    pub weight: f64,
}

impl RewardComponent {
    pub fn new(value: f64, weight: f64) -> Self {
        Self { value, weight }
    }

    pub fn unit(value: f64) -> Self {
        Self { value, weight: 1.0 }
    }
}

/// `prod(value_i ^ weight_i)`; a zero value with positive weight zeroes the product.
pub fn compose_reward(components: &[RewardComponent]) -> Result<f64> {
    let mut total = 1.0;
    for (index, c) in components.iter().enumerate() {
        if c.value < 0.0 || c.value.is_nan() {
            return Err(FmcError::NegativeReward { index, value: c.value });
        }
        if c.weight < 0.0 || !c.weight.is_finite() {
            return Err(FmcError::InvalidParams(format!(
                "reward weight {index} must be a finite nonnegative number, got {}",
                c.weight
            )));
        }
        if c.weight == 0.0 {
            continue;
        }
        if c.value == 0.0 {
            return Ok(0.0);
        }
        total *= if c.weight == 1.0 { c.value } else { c.value.powf(c.weight) };
    }
    Ok(total)
}
