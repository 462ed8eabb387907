//! Closed-form platform pricing when every user shares one ambiguity level.
//!
//! For each model the platform picks the prompt count `sigma` that maximizes
//! `(eps^(sigma-1) (1-eps) U - C) * sigma`; the price
//! `eps^(sigma-1) (1-eps) U` is the highest at which a user still values the
//! `sigma`-th prompt. The best model is served at that price and every other
//! model is priced at its utility, which no user with `eps > 0` pays.
//!
//! Users break exact indifference toward fewer prompts, so this price is the
//! supremum of prices inducing `sigma` prompts: any price an arbitrarily small
//! amount below it induces exactly `sigma`.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::Result;
use crate::model::{Ambiguity, GaiModel, ModelSet, PriceSchedule};
use crate::user_strategy::{optimal_prompt_count, PromptCount, TIE_TOLERANCE};

/// Scan cap for `sigma`; only reachable for `eps` extremely close to one.
pub const DEFAULT_SIGMA_CAP: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Sigma {
    pub count: u64,
    /// The ascending scan hit the cap before the stopping condition held.
    pub capped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneousSolution {
    pub schedule: PriceSchedule,
    /// `None` when `sigma = 0` for the best model (no trade).
    pub served_model: Option<String>,
    /// The model the closed form singles out, served or not.
    pub best_model: String,
    pub sigma: u64,
    pub capped: bool,
    pub platform_payoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CostShape {
    Increasing,
    InverseUShaped,
    Decreasing,
    AlwaysZero,
}

/// `sigma(m, eps) = min { k >= 0 : (k+1) eps^k - k eps^(k-1) < C / ((1-eps) U) }`.
pub fn sigma(model: &GaiModel, eps: Ambiguity) -> Sigma {
    sigma_with_cap(model, eps, DEFAULT_SIGMA_CAP)
}

pub fn sigma_with_cap(model: &GaiModel, eps: Ambiguity, cap: u64) -> Sigma {
    let e = eps.value();
    let rhs = model.cost() / ((1.0 - e) * model.utility());
    let mut k = 0u64;
    // lhs(k) = eps^(k-1) ((k+1) eps - k), with lhs(0) = 1
    while k < cap {
        let lhs = if k == 0 {
            1.0
        } else {
            e.powf(k as f64 - 1.0) * ((k + 1) as f64 * e - k as f64)
        };
        if lhs < rhs - TIE_TOLERANCE {
            return Sigma {
                count: k,
                capped: false,
            };
        }
        k += 1;
    }
    Sigma {
        count: cap,
        capped: true,
    }
}

/// `eps^(sigma-1) (1-eps) U`.
pub fn closed_form_price(model: &GaiModel, eps: Ambiguity, sigma: u64) -> f64 {
    let e = eps.value();
    e.powf(sigma as f64 - 1.0) * (1.0 - e) * model.utility()
}

pub fn optimal_homogeneous_price(models: &ModelSet, eps: Ambiguity) -> HomogeneousSolution {
    let mut best: Option<(&GaiModel, Sigma, f64, f64)> = None;
    for m in models {
        let s = sigma(m, eps);
        let price = closed_form_price(m, eps, s.count);
        let payoff = if s.count == 0 {
            0.0
        } else {
            (price - m.cost()) * s.count as f64
        };
        let better = match &best {
            None => true,
            Some((bm, _, _, bp)) => {
                crate::user_strategy::compare_candidates((m, payoff), (bm, *bp))
                    == Ordering::Greater
            }
        };
        if better {
            best = Some((m, s, price, payoff));
        }
    }
    let (star, s, star_price, payoff) = best.expect("model sets are never empty");

    let mut schedule = PriceSchedule::new();
    for m in models {
        let p = if m.id() == star.id() {
            star_price
        } else {
            m.utility()
        };
        schedule
            .set(m.id(), p)
            .expect("closed-form prices are finite and non-negative");
    }
    HomogeneousSolution {
        schedule,
        served_model: (s.count > 0).then(|| star.id().to_string()),
        best_model: star.id().to_string(),
        sigma: s.count,
        capped: s.capped,
        platform_payoff: payoff.max(0.0),
    }
}

pub fn classify_cost_shape(model: &GaiModel) -> CostShape {
    let (u, c) = (model.utility(), model.cost());
    if c == 0.0 {
        CostShape::Increasing
    } else if c <= u / 8.0 {
        CostShape::InverseUShaped
    } else if c < u {
        CostShape::Decreasing
    } else {
        CostShape::AlwaysZero
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogeneousPoint {
    pub eps: f64,
    pub best_model: String,
    pub served_model: Option<String>,
    pub price: f64,
    pub sigma: u64,
    pub capped: bool,
    /// The user's optimal count at exactly the closed-form price.
    pub prompt_count: u64,
    pub payoff: f64,
}

/// Closed-form solution along an ascending ambiguity grid.
pub fn homogeneous_payoff_curve(
    models: &ModelSet,
    eps_grid: &[Ambiguity],
) -> Result<Vec<HomogeneousPoint>> {
    if eps_grid.windows(2).any(|w| w[0].value() >= w[1].value()) {
        return Err(crate::Error::ConfigError(
            "ambiguity grid must be strictly ascending".into(),
        ));
    }
    eps_grid
        .iter()
        .map(|&eps| {
            let sol = optimal_homogeneous_price(models, eps);
            let model = models
                .get(&sol.best_model)
                .expect("best model comes from the set");
            let price = sol.schedule.price(model.id())?;
            let prompt_count = match optimal_prompt_count(model, price, eps)? {
                PromptCount::Finite(n) => n,
                PromptCount::Unbounded => sol.sigma,
            };
            Ok(HomogeneousPoint {
                eps: eps.value(),
                best_model: sol.best_model,
                served_model: sol.served_model,
                price,
                sigma: sol.sigma,
                capped: sol.capped,
                prompt_count,
                payoff: sol.platform_payoff,
            })
        })
        .collect()
}
