//! Proportional pricing baselines: one shared multiplier for every model.

use super::{outcome_from, Evaluation, Method, Population, PricingOutcome};
use crate::distribution::AmbiguityDistribution;
use crate::error::{Error, Result};
use crate::model::ModelSet;
use crate::numeric::QuadratureConfig;

/// Grid step for the shared multiplier.
pub const BENCHMARK_STEP: f64 = 1e-3;

fn best_over<I>(
    models: &ModelSet,
    pop: &Population,
    schedules: I,
    method: Method,
) -> Result<PricingOutcome>
where
    I: Iterator<Item = Vec<f64>>,
{
    let mut best: Option<(Vec<f64>, Evaluation)> = None;
    for prices in schedules {
        let eval = pop.evaluate(models.models(), &prices);
        if best.as_ref().is_none_or(|(_, b)| eval.payoff > b.payoff) {
            best = Some((prices, eval));
        }
    }
    let (prices, eval) = best.expect("multiplier grids are never empty");
    outcome_from(models, &prices, eval, method)
}

/// `p_m = beta U_m` with `beta` on a `1e-3` grid over `(0, 1)`.
pub fn utility_based_pricing(
    models: &ModelSet,
    dist: &AmbiguityDistribution,
    quad: &QuadratureConfig,
) -> Result<PricingOutcome> {
    let pop = Population::new(dist, quad);
    let steps = (1.0 / BENCHMARK_STEP).round() as usize;
    let schedules = (1..steps).map(|i| {
        let beta = i as f64 * BENCHMARK_STEP;
        models.iter().map(|m| beta * m.utility()).collect()
    });
    best_over(models, &pop, schedules, Method::UtilityBased)
}

/// `p_m = (1 + mu) C_m` with `mu` on a `1e-3` grid over `[0, U_max / C_min]`.
///
/// The scan stops once every price reaches its utility, past which no user
/// buys anything.
pub fn cost_based_pricing(
    models: &ModelSet,
    dist: &AmbiguityDistribution,
    quad: &QuadratureConfig,
) -> Result<PricingOutcome> {
    if let Some(m) = models.iter().find(|m| m.cost() == 0.0) {
        return Err(Error::DegenerateCostBase(format!(
            "model `{}` has zero cost, so cost-proportional prices are all zero",
            m.id()
        )));
    }
    let pop = Population::new(dist, quad);
    let u_max = models.iter().map(|m| m.utility()).fold(0.0, f64::max);
    let c_min = models
        .iter()
        .map(|m| m.cost())
        .fold(f64::INFINITY, f64::min);
    let steps = ((u_max / c_min) / BENCHMARK_STEP + 1e-9).floor() as usize;
    let schedules = (0..=steps)
        .map(|i| i as f64 * BENCHMARK_STEP)
        .take_while(|&mu| mu == 0.0 || models.iter().any(|m| (1.0 + mu) * m.cost() < m.utility()))
        .map(|mu| models.iter().map(|m| (1.0 + mu) * m.cost()).collect());
    best_over(models, &pop, schedules, Method::CostBased)
}
