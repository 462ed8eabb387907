//! Exhaustive price lattice, used to check the two-model search.

use rayon::prelude::*;

use super::{outcome_from, Method, Population, PricingOutcome};
use crate::distribution::AmbiguityDistribution;
use crate::error::{Error, Result};
use crate::model::{GaiModel, ModelSet};
use crate::numeric::QuadratureConfig;

pub const MIN_ORACLE_GRID: usize = 50;

/// `grid_n` prices on `(C, U]`, or just `U` when the model cannot profit.
fn axis(m: &GaiModel, grid_n: usize) -> Vec<f64> {
    let (u, c) = (m.utility(), m.cost());
    if c >= u {
        return vec![u];
    }
    (1..=grid_n)
        .map(|j| c + (u - c) * j as f64 / grid_n as f64)
        .collect()
}

/// Best lattice point over `(C_L, U_L] x (C_H, U_H]`. Ties keep the lowest
/// `p_L`, then the lowest `p_H`.
pub fn grid_oracle(
    models: &ModelSet,
    dist: &AmbiguityDistribution,
    grid_n: usize,
    quad: &QuadratureConfig,
) -> Result<PricingOutcome> {
    let Some((low, high)) = models.as_pair() else {
        return Err(Error::ConfigError(format!(
            "grid oracle needs exactly two models, got {}",
            models.len()
        )));
    };
    if grid_n < MIN_ORACLE_GRID {
        return Err(Error::ConfigError(format!(
            "oracle grid needs at least {MIN_ORACLE_GRID} points per axis, got {grid_n}"
        )));
    }
    let pop = Population::new(dist, quad);
    let ms = models.models();
    let (low_axis, high_axis) = (axis(low, grid_n), axis(high, grid_n));

    let rows: Vec<(f64, f64, f64)> = low_axis
        .par_iter()
        .map(|&p_low| {
            let mut best = (p_low, high_axis[0], f64::NEG_INFINITY);
            for &p_high in &high_axis {
                let v = pop.evaluate(ms, &[p_low, p_high]).payoff;
                if v > best.2 {
                    best = (p_low, p_high, v);
                }
            }
            best
        })
        .collect();
    let mut best = rows[0];
    for &r in &rows[1..] {
        if r.2 > best.2 {
            best = r;
        }
    }
    let prices = [best.0, best.1];
    let eval = pop.evaluate(ms, &prices);
    outcome_from(models, &prices, eval, Method::GridOracle)
}
