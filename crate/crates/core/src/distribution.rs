//! Ambiguity densities over (0, 1).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density of prompt ambiguity across the user population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AmbiguityDistribution {
    Uniform {
        min: f64,
        max: f64,
    },
    /// Piecewise-linear density through `(knots[i], values[i])`, zero outside
    /// the knot range. Values are renormalized at construction so the density
    /// integrates to one.
    Tabulated {
        knots: Vec<f64>,
        values: Vec<f64>,
    },
}

impl AmbiguityDistribution {
    pub fn uniform(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && 0.0 <= min && min < max && max <= 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "uniform bounds must satisfy 0 <= min < max <= 1, got [{min}, {max}]"
            )));
        }
        Ok(Self::Uniform { min, max })
    }

    pub fn tabulated(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 || knots.len() != values.len() {
            return Err(Error::InvalidDistribution(
                "tabulated density needs at least two knots and one value per knot".into(),
            ));
        }
        if knots.iter().any(|k| !(0.0..=1.0).contains(k)) {
            return Err(Error::InvalidDistribution(
                "knots must lie in [0, 1]".into(),
            ));
        }
        if knots.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidDistribution(
                "knots must be strictly ascending".into(),
            ));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidDistribution(
                "density values must be finite and non-negative".into(),
            ));
        }
        let area: f64 = knots
            .windows(2)
            .zip(values.windows(2))
            .map(|(k, v)| 0.5 * (v[0] + v[1]) * (k[1] - k[0]))
            .sum();
        if area <= 0.0 {
            return Err(Error::InvalidDistribution(
                "density has zero total mass".into(),
            ));
        }
        let values = values.into_iter().map(|v| v / area).collect();
        Ok(Self::Tabulated { knots, values })
    }

    /// Closed support `[lo, hi]`.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Uniform { min, max } => (*min, *max),
            Self::Tabulated { knots, .. } => (knots[0], knots[knots.len() - 1]),
        }
    }

    pub fn density(&self, eps: f64) -> f64 {
        match self {
            Self::Uniform { min, max } => {
                if (*min..=*max).contains(&eps) {
                    1.0 / (max - min)
                } else {
                    0.0
                }
            }
            Self::Tabulated { knots, values } => {
                let (lo, hi) = (knots[0], knots[knots.len() - 1]);
                if !(lo..=hi).contains(&eps) {
                    return 0.0;
                }
                let i = knots
                    .partition_point(|k| *k <= eps)
                    .clamp(1, knots.len() - 1);
                let (k0, k1) = (knots[i - 1], knots[i]);
                let t = (eps - k0) / (k1 - k0);
                values[i - 1] + t * (values[i] - values[i - 1])
            }
        }
    }

    /// Probability mass on `[a, b]`, computed exactly for both families.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match self {
            Self::Uniform { min, max } => {
                let lo = a.max(*min);
                let hi = b.min(*max);
                if hi > lo {
                    (hi - lo) / (max - min)
                } else {
                    0.0
                }
            }
            Self::Tabulated { knots, .. } => {
                let mut total = 0.0;
                for w in knots.windows(2) {
                    let lo = a.max(w[0]);
                    let hi = b.min(w[1]);
                    if hi > lo {
                        // trapezoid is exact on a linear piece
                        total += 0.5 * (self.density(lo) + self.density(hi)) * (hi - lo);
                    }
                }
                total
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_bounds_checked() {
        assert!(AmbiguityDistribution::uniform(0.0, 1.0).is_ok());
        assert!(AmbiguityDistribution::uniform(0.5, 0.5).is_err());
        assert!(AmbiguityDistribution::uniform(-0.1, 0.5).is_err());
        assert!(AmbiguityDistribution::uniform(0.2, 1.1).is_err());
    }

    #[test]
    fn tabulated_is_renormalized() {
        let d = AmbiguityDistribution::tabulated(vec![0.0, 0.5, 1.0], vec![1.0, 3.0, 1.0]).unwrap();
        assert!((d.mass(0.0, 1.0) - 1.0).abs() < 1e-12);
        // triangle-on-plateau: area before scaling is 2
        assert!((d.density(0.5) - 1.5).abs() < 1e-12);
        assert!((d.density(0.25) - 1.0).abs() < 1e-12);
        assert_eq!(d.density(1.5), 0.0);
    }

    #[test]
    fn tabulated_rejects_bad_input() {
        assert!(AmbiguityDistribution::tabulated(vec![0.0], vec![1.0]).is_err());
        assert!(AmbiguityDistribution::tabulated(vec![0.5, 0.2], vec![1.0, 1.0]).is_err());
        assert!(AmbiguityDistribution::tabulated(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(AmbiguityDistribution::tabulated(vec![0.0, 1.0], vec![-1.0, 2.0]).is_err());
    }

    #[test]
    fn uniform_mass_clips_to_support() {
        let d = AmbiguityDistribution::uniform(0.2, 0.6).unwrap();
        assert!((d.mass(0.0, 0.4) - 0.5).abs() < 1e-12);
        assert_eq!(d.mass(0.7, 0.9), 0.0);
        assert!((d.mass(0.0, 1.0) - 1.0).abs() < 1e-12);
    }
}
