//! Domain types shared by the user-side and platform-side solvers.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generative model offered by the platform.
///
/// `utility` is the value a user obtains when the model fulfils the intended
/// task; `cost` is what one prompt costs the platform. Both live on the same
/// dimensionless scale as prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaiModel {
    id: String,
    utility: f64,
    cost: f64,
}

impl GaiModel {
    pub fn new(id: impl Into<String>, utility: f64, cost: f64) -> Result<Self> {
        let id = id.into();
        if !(utility.is_finite() && utility > 0.0) {
            return Err(Error::InvalidModel {
                id,
                reason: format!("utility must be positive and finite, got {utility}"),
            });
        }
        if !(cost.is_finite() && cost >= 0.0) {
            return Err(Error::InvalidModel {
                id,
                reason: format!("cost must be non-negative and finite, got {cost}"),
            });
        }
        Ok(Self { id, utility, cost })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn utility(&self) -> f64 {
        self.utility
    }

    pub fn cost(&self) -> f64 {
        self.cost
    }
}

/// Ordered, non-empty set of models with distinct ids.
///
/// A two-model set is read as `(low, high)` and must satisfy
/// `utility(low) < utility(high)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSet {
    models: Vec<GaiModel>,
}

impl ModelSet {
    pub fn new(models: Vec<GaiModel>) -> Result<Self> {
        if models.is_empty() {
            return Err(Error::EmptyModelSet);
        }
        for (i, m) in models.iter().enumerate() {
            if models[..i].iter().any(|other| other.id == m.id) {
                return Err(Error::DuplicateModelId(m.id.clone()));
            }
        }
        if let [low, high] = models.as_slice() {
            if low.utility >= high.utility {
                return Err(Error::ModelOrder {
                    low: low.utility,
                    high: high.utility,
                });
            }
        }
        Ok(Self { models })
    }

    /// Convenience constructor for the `{M_L, M_H}` case.
    pub fn pair(low: GaiModel, high: GaiModel) -> Result<Self> {
        Self::new(vec![low, high])
    }

    pub fn single(model: GaiModel) -> Self {
        Self {
            models: vec![model],
        }
    }

    pub fn models(&self) -> &[GaiModel] {
        &self.models
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&GaiModel> {
        self.models.iter().find(|m| m.id == id)
    }

    /// `(M_L, M_H)` when the set holds exactly two models.
    pub fn as_pair(&self) -> Option<(&GaiModel, &GaiModel)> {
        match self.models.as_slice() {
            [low, high] => Some((low, high)),
            _ => None,
        }
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GaiModel> {
        self.models.iter()
    }
}

impl<'a> IntoIterator for &'a ModelSet {
    type Item = &'a GaiModel;
    type IntoIter = std::slice::Iter<'a, GaiModel>;

    fn into_iter(self) -> Self::IntoIter {
        self.models.iter()
    }
}

/// Per-prompt price for each model, keyed by model id.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PriceSchedule {
    prices: BTreeMap<String, f64>,
}

impl PriceSchedule {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a schedule aligned with `models`, one price per model in order.
    pub fn for_models(models: &ModelSet, prices: &[f64]) -> Result<Self> {
        if prices.len() != models.len() {
            return Err(Error::ConfigError(format!(
                "expected {} prices, got {}",
                models.len(),
                prices.len()
            )));
        }
        let mut schedule = Self::new();
        for (m, &p) in models.iter().zip(prices) {
            schedule.set(m.id(), p)?;
        }
        Ok(schedule)
    }

    pub fn set(&mut self, id: impl Into<String>, price: f64) -> Result<()> {
        let id = id.into();
        if !(price.is_finite() && price >= 0.0) {
            return Err(Error::InvalidPrice { id, price });
        }
        self.prices.insert(id, price);
        Ok(())
    }

    pub fn price(&self, id: &str) -> Result<f64> {
        self.prices
            .get(id)
            .copied()
            .ok_or_else(|| Error::SchedulePriceMissing(id.to_string()))
    }

    /// Checks that every model in `models` has a price.
    pub fn covers(&self, models: &ModelSet) -> Result<()> {
        for m in models {
            self.price(m.id())?;
        }
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.prices.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// Prompt ambiguity, strictly inside (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Ambiguity(f64);

impl Ambiguity {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value < 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::InvalidAmbiguity(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Ambiguity {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Self::new(value)
    }
}

impl fmt::Display for Ambiguity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_validation() {
        assert!(GaiModel::new("a", 1.0, 0.0).is_ok());
        assert!(GaiModel::new("a", 0.0, 0.1).is_err());
        assert!(GaiModel::new("a", 1.0, -0.1).is_err());
        assert!(GaiModel::new("a", f64::NAN, 0.1).is_err());
    }

    #[test]
    fn model_set_rules() {
        let low = GaiModel::new("L", 1.0, 0.02).unwrap();
        let high = GaiModel::new("H", 1.8, 0.04).unwrap();
        assert!(ModelSet::new(vec![]).is_err());
        assert!(ModelSet::pair(low.clone(), high.clone()).is_ok());
        assert!(matches!(
            ModelSet::pair(high.clone(), low.clone()),
            Err(Error::ModelOrder { .. })
        ));
        let dup = GaiModel::new("L", 2.0, 0.0).unwrap();
        assert_eq!(
            ModelSet::pair(low, dup),
            Err(Error::DuplicateModelId("L".into()))
        );
    }

    #[test]
    fn schedule_lookup() {
        let set = ModelSet::single(GaiModel::new("m", 1.0, 0.1).unwrap());
        let s = PriceSchedule::for_models(&set, &[0.4]).unwrap();
        assert_eq!(s.price("m").unwrap(), 0.4);
        assert_eq!(s.price("x"), Err(Error::SchedulePriceMissing("x".into())));
        assert!(PriceSchedule::for_models(&set, &[-1.0]).is_err());
    }

    #[test]
    fn ambiguity_is_open_interval() {
        assert!(Ambiguity::new(0.0).is_err());
        assert!(Ambiguity::new(1.0).is_err());
        assert!(Ambiguity::new(0.5).is_ok());
    }
}
