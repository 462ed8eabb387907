//! Platform pricing when users' ambiguity follows a distribution.

mod benchmarks;
mod bound;
mod opp;
mod oracle;
mod single;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::Serialize;

pub use benchmarks::{cost_based_pricing, utility_based_pricing, BENCHMARK_STEP};
pub use bound::{preference_threshold, price_upper_bound};
pub use opp::{opp, opp_with_trace, OppConfig, OppTraceRow, GAIN_GRID_POINTS};
pub use oracle::{grid_oracle, MIN_ORACLE_GRID};
pub use single::{segment_roots, single_model_price, SegmentRoots};

use crate::distribution::AmbiguityDistribution;
use crate::error::{Error, Result};
use crate::model::{GaiModel, ModelSet, PriceSchedule};
use crate::numeric::QuadratureConfig;
use crate::user_strategy::{compare_candidates, ln_ratio, payoff_at, EpsLogs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    /// Payoff of a caller-supplied schedule.
    Fixed,
    SingleModel,
    Opp,
    UtilityBased,
    CostBased,
    GridOracle,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Self::Fixed => "fixed",
            Self::SingleModel => "single_model",
            Self::Opp => "opp",
            Self::UtilityBased => "utility_based",
            Self::CostBased => "cost_based",
            Self::GridOracle => "grid_oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricingOutcome {
    pub schedule: PriceSchedule,
    pub platform_payoff: f64,
    /// Expected prompts per model, `N_m`.
    pub prompt_volume: BTreeMap<String, f64>,
    pub method: Method,
}

impl PricingOutcome {
    /// `sum_m (p_m - C_m) N_m`, recomputed from the schedule.
    pub fn recomputed_payoff(&self, models: &ModelSet) -> Result<f64> {
        let mut total = 0.0;
        for m in models {
            let p = self.schedule.price(m.id())?;
            let n = self.prompt_volume.get(m.id()).copied().unwrap_or(0.0);
            total += (p - m.cost()) * n;
        }
        Ok(total)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PopNode {
    pub weight: f64,
    pub logs: EpsLogs,
}

/// Quadrature nodes with their ambiguity logarithms precomputed.
#[derive(Debug, Clone)]
pub(crate) struct Population {
    pub nodes: Vec<PopNode>,
}

#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub payoff: f64,
    pub volumes: Vec<f64>,
}

impl Population {
    pub fn new(dist: &AmbiguityDistribution, quad: &QuadratureConfig) -> Self {
        let nodes = quad
            .nodes(dist)
            .into_iter()
            .filter(|n| n.weight > 0.0)
            .map(|n| PopNode {
                weight: n.weight,
                logs: EpsLogs::new(n.eps),
            })
            .collect();
        Self { nodes }
    }

    /// Platform payoff for strictly positive `prices`, aligned with `models`.
    ///
    /// Each node runs the same selection rule as
    /// [`select_model`](crate::user_strategy::select_model).
    pub fn evaluate(&self, models: &[GaiModel], prices: &[f64]) -> Evaluation {
        let ln_r: Vec<f64> = models
            .iter()
            .zip(prices)
            .map(|(m, &p)| ln_ratio(p, m.utility()))
            .collect();
        let mut volumes = vec![0.0; models.len()];
        for node in &self.nodes {
            let mut best: Option<(usize, u64, f64)> = None;
            for (j, m) in models.iter().enumerate() {
                let n = node.logs.count(ln_r[j]);
                let payoff = payoff_at(m.utility(), prices[j], node.logs.eps, n);
                let better = match best {
                    None => true,
                    Some((bj, _, bp)) => {
                        compare_candidates((m, payoff), (&models[bj], bp)) == Ordering::Greater
                    }
                };
                if better {
                    best = Some((j, n, payoff));
                }
            }
            if let Some((j, n, _)) = best {
                volumes[j] += node.weight * n as f64;
            }
        }
        let payoff = models
            .iter()
            .zip(prices)
            .zip(&volumes)
            .map(|((m, p), n)| (p - m.cost()) * n)
            .sum();
        Evaluation { payoff, volumes }
    }
}

pub(crate) fn outcome_from(
    models: &ModelSet,
    prices: &[f64],
    eval: Evaluation,
    method: Method,
) -> Result<PricingOutcome> {
    let schedule = PriceSchedule::for_models(models, prices)?;
    if !eval.payoff.is_finite() {
        return Err(Error::NonFinite {
            index: 0,
            eps: f64::NAN,
            value: eval.payoff,
        });
    }
    let prompt_volume = models
        .iter()
        .zip(eval.volumes)
        .map(|(m, n)| (m.id().to_string(), n))
        .collect();
    Ok(PricingOutcome {
        schedule,
        platform_payoff: eval.payoff,
        prompt_volume,
        method,
    })
}

pub(crate) fn schedule_prices(models: &ModelSet, schedule: &PriceSchedule) -> Result<Vec<f64>> {
    models
        .iter()
        .map(|m| {
            let p = schedule.price(m.id())?;
            if p == 0.0 {
                Err(Error::UnboundedDemand(m.id().to_string()))
            } else {
                Ok(p)
            }
        })
        .collect()
}

/// Expected platform payoff `sum_m (p_m - C_m) N_m` of a fixed schedule.
pub fn platform_payoff(
    models: &ModelSet,
    schedule: &PriceSchedule,
    dist: &AmbiguityDistribution,
    quad: &QuadratureConfig,
) -> Result<PricingOutcome> {
    let prices = schedule_prices(models, schedule)?;
    let pop = Population::new(dist, quad);
    let eval = pop.evaluate(models.models(), &prices);
    outcome_from(models, &prices, eval, Method::Fixed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Ambiguity;
    use crate::user_strategy::{select_model, PromptCount};

    fn pair() -> ModelSet {
        ModelSet::pair(
            GaiModel::new("L", 1.0, 0.02).unwrap(),
            GaiModel::new("H", 1.8, 0.04).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn prohibitive_prices_earn_nothing() {
        let set = pair();
        let s = PriceSchedule::for_models(&set, &[1.0, 1.8]).unwrap();
        let d = AmbiguityDistribution::uniform(0.0, 1.0).unwrap();
        let out = platform_payoff(&set, &s, &d, &QuadratureConfig::default()).unwrap();
        assert_eq!(out.platform_payoff, 0.0);
        assert!(out.prompt_volume.values().all(|&n| n == 0.0));
    }

    #[test]
    fn zero_margin_earns_nothing() {
        let set = pair();
        let s = PriceSchedule::for_models(&set, &[0.02, 0.04]).unwrap();
        let d = AmbiguityDistribution::uniform(0.0, 1.0).unwrap();
        let out = platform_payoff(&set, &s, &d, &QuadratureConfig::default()).unwrap();
        assert_eq!(out.platform_payoff, 0.0);
        assert!(out.prompt_volume["H"] > 0.0);
    }

    #[test]
    fn zero_price_is_rejected() {
        let set = pair();
        let s = PriceSchedule::for_models(&set, &[0.0, 0.5]).unwrap();
        let d = AmbiguityDistribution::uniform(0.0, 1.0).unwrap();
        assert_eq!(
            platform_payoff(&set, &s, &d, &QuadratureConfig::default()),
            Err(Error::UnboundedDemand("L".into()))
        );
    }

    #[test]
    fn fast_path_agrees_with_select_model() {
        let set = pair();
        let d = AmbiguityDistribution::uniform(0.05, 0.95).unwrap();
        let q = QuadratureConfig::new(301).unwrap();
        for &(pl, ph) in &[(0.1, 0.3), (0.3, 0.6), (0.05, 0.9), (0.5, 0.5)] {
            let s = PriceSchedule::for_models(&set, &[pl, ph]).unwrap();
            let out = platform_payoff(&set, &s, &d, &q).unwrap();
            let mut vol = BTreeMap::new();
            for node in q.nodes(&d) {
                let dec = select_model(&set, &s, Ambiguity::new(node.eps).unwrap()).unwrap();
                if let (Some(id), PromptCount::Finite(n)) = (dec.selected_model, dec.prompt_count) {
                    *vol.entry(id).or_insert(0.0) += node.weight * n as f64;
                }
            }
            for m in &set {
                let a = out.prompt_volume[m.id()];
                let b = vol.get(m.id()).copied().unwrap_or(0.0);
                assert!((a - b).abs() < 1e-12, "{pl} {ph} {}: {a} vs {b}", m.id());
            }
            assert!((out.recomputed_payoff(&set).unwrap() - out.platform_payoff).abs() < 1e-9);
        }
    }

    #[test]
    fn single_model_volume_matches_monte_carlo() {
        // U = 1, C = 0.2, p = 0.6 on Uniform(0, 1): only eps < 0.4 buys.
        let m = GaiModel::new("m", 1.0, 0.2).unwrap();
        let set = ModelSet::single(m.clone());
        let s = PriceSchedule::for_models(&set, &[0.6]).unwrap();
        let d = AmbiguityDistribution::uniform(0.0, 1.0).unwrap();
        let out = platform_payoff(&set, &s, &d, &QuadratureConfig::default()).unwrap();

        // deterministic low-discrepancy sample of 10^6 users
        let samples = 1_000_000u64;
        let mut total = 0u64;
        let mut x = 0.5f64;
        let golden = 0.618_033_988_749_894_9;
        for _ in 0..samples {
            x = (x + golden).fract();
            if x <= 0.0 {
                continue;
            }
            // argmax of (1 - x^n) - 0.6 n by enumeration
            let mut best = 0;
            let mut best_v = 0.0;
            for n in 1..20u64 {
                let v = 1.0 - x.powi(n as i32) - 0.6 * n as f64;
                if v > best_v + 1e-12 {
                    best = n;
                    best_v = v;
                }
            }
            total += best;
        }
        let mc = total as f64 / samples as f64;
        assert!(
            (out.prompt_volume["m"] - mc).abs() < 1e-3,
            "{} vs {mc}",
            out.prompt_volume["m"]
        );
        assert!((out.platform_payoff - 0.4 * mc).abs() < 1e-3);
    }
}
