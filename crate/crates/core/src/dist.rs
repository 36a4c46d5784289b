//! Discrete probability distributions and the Gibbs divergence.

use serde::{Deserialize, Serialize};

use crate::error::{FmcError, Result};

const SUM_TOLERANCE: f64 = 1e-9;

/// Nonnegative weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Distribution(Vec<f64>);

impl Distribution {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(FmcError::InvalidDistribution("no weights".into()));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(FmcError::InvalidDistribution(format!(
                "weight {i} = {} is not a finite nonnegative number",
                weights[i]
            )));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(FmcError::InvalidDistribution(format!("weights sum to {sum}")));
        }
        Ok(Self(weights))
    }

    /// Scales nonnegative weights to unit mass.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum.is_finite() && sum > 0.0) {
            return Err(FmcError::InvalidDistribution(format!(
                "cannot normalise weights with total {sum}"
            )));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0, "uniform distribution over zero outcomes");
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point(n: usize, at: usize) -> Self {
        let mut w = vec![0.0; n];
        w[at] = 1.0;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the largest weight, lowest index on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &w) in self.0.iter().enumerate() {
            if w > self.0[best] {
                best = i;
            }
        }
        best
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.0.len() as f64;
        self.0.iter().all(|w| (w - u).abs() <= SUM_TOLERANCE)
    }

    /// Inverse-CDF draw from a uniform variate in `[0, 1)`.
    pub fn sample_with(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, &w) in self.0.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        // rounding left some mass past the end: take the last supported outcome
        self.0.iter().rposition(|&w| w > 0.0).unwrap_or(0)
    }
}

impl TryFrom<Vec<f64>> for Distribution {
    type Error = FmcError;

    fn try_from(value: Vec<f64>) -> Result<Self> {
        Distribution::new(value)
    }
}

impl From<Distribution> for Vec<f64> {
    fn from(value: Distribution) -> Self {
        value.0
    }
}

/// `D_H(p || q) = sum_{p_i > 0} p_i (ln p_i - ln q_i)`.
///
/// Returns `f64::INFINITY` when `p` puts mass where `q` has none.
pub fn dh_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(FmcError::LengthMismatch { left: p.len(), right: q.len() });
    }
    let mut total = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return Ok(f64::INFINITY);
        }
        total += pi * (pi.ln() - qi.ln());
    }
    // Gibbs: the exact value is >= 0; clear rounding noise around zero.
    Ok(total.max(0.0))
}

pub fn shannon_entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&w| w > 0.0).map(|&w| w * w.ln()).sum::<f64>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::LN_2;

    #[test]
    fn divergence_examples() {
        assert_eq!(dh_divergence(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!((dh_divergence(&[1.0, 0.0], &[0.5, 0.5]).unwrap() - LN_2).abs() < 1e-15);
        assert_eq!(dh_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap(), f64::INFINITY);
        assert!(matches!(
            dh_divergence(&[1.0], &[0.5, 0.5]),
            Err(FmcError::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn entropy_closed_forms() {
        assert_eq!(shannon_entropy(&[1.0, 0.0, 0.0]), 0.0);
        assert!((shannon_entropy(&[0.25; 4]) - 4f64.ln()).abs() < 1e-15);
        assert!((shannon_entropy(&[0.5, 0.5]) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn distribution_validation() {
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
        assert!(Distribution::new(vec![]).is_err());
        assert_eq!(Distribution::normalized(vec![1.0, 3.0]).unwrap().weights(), &[0.25, 0.75]);
        assert_eq!(Distribution::new(vec![0.2, 0.4, 0.4]).unwrap().argmax(), 1);
    }

    #[test]
    fn serde_rejects_invalid() {
        let ok: Distribution = serde_json::from_str("[0.5,0.5]").unwrap();
        assert!(ok.is_uniform());
        assert!(serde_json::from_str::<Distribution>("[0.5,0.4]").is_err());
    }

    fn distribution(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], n).prop_filter_map(
            "zero mass",
            |w| {
                let s: f64 = w.iter().sum();
                (s > 0.0).then(|| w.iter().map(|x| x / s).collect())
            },
        )
    }

    proptest! {
        #[test]
        fn divergence_axioms((p, q) in (2usize..8).prop_flat_map(|n| (distribution(n), distribution(n)))) {
            let d = dh_divergence(&p, &q).unwrap();
            prop_assert!(d >= 0.0);
            prop_assert!(dh_divergence(&p, &p).unwrap().abs() < 1e-9);
            let escapes = p.iter().zip(&q).any(|(&a, &b)| a > 0.0 && b == 0.0);
            prop_assert_eq!(d.is_infinite(), escapes);
            if !escapes && p.iter().zip(&q).any(|(a, b)| (a - b).abs() > 1e-3) {
                prop_assert!(d > 0.0);
            }
        }
    }
}
