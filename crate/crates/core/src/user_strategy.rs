//! Stage-2 solver: how many prompts a user sends and which model they pick.
//!
//! A user with ambiguity `eps` who sends `n` prompts to model `s` at price
//! `p_s` earns `(1 - eps^n) * U_s - n * p_s`. The `k`-th prompt adds
//! `eps^(k-1) * (1 - eps) * U_s - p_s`, which is strictly decreasing in `k`,
//! so the optimum is the last prompt with a strictly positive margin:
//!
//! ```text
//! n* = floor(log_eps(eps * p / ((1 - eps) * U)))      if p <= (1 - eps) * U
//! n* = 0                                              otherwise
//! ```
//!
//! Exactly on a boundary `p = eps^(k-1) (1 - eps) U` the user is indifferent
//! between `k - 1` and `k` prompts; ties resolve to the smaller count.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Ambiguity, GaiModel, ModelSet, PriceSchedule};

/// Absolute tolerance for comparing payoffs against analytic thresholds.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Distance from an integer inside which `log_eps(..)` counts as a boundary.
pub const BOUNDARY_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PromptCount {
    Finite(u64),
    /// Zero price: the user keeps prompting forever.
    Unbounded,
}

impl PromptCount {
    pub fn finite(self) -> Option<u64> {
        match self {
            Self::Finite(n) => Some(n),
            Self::Unbounded => None,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Self::Finite(0)
    }
}

impl std::fmt::Display for PromptCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Finite(n) => write!(f, "{n}"),
            Self::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UserDecision {
    /// `None` when the user buys nothing.
    pub selected_model: Option<String>,
    pub prompt_count: PromptCount,
    pub payoff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PromptShape {
    AlwaysInfinite,
    InverseUShaped,
    Decreasing,
    AlwaysZero,
}

/// Logarithms of one ambiguity level, reused across many price evaluations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EpsLogs {
    pub eps: f64,
    /// `ln(eps) - ln(1 - eps)`
    shift: f64,
    inv_ln_eps: f64,
}

impl EpsLogs {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            shift: eps.ln() - (-eps).ln_1p(),
            inv_ln_eps: 1.0 / eps.ln(),
        }
    }

    /// Optimal prompt count for a positive price, given `ln(p) - ln(U)`.
    ///
    /// `v = log_eps(eps p / ((1 - eps) U))`; within `BOUNDARY_SNAP` of an
    /// integer `k` the user is indifferent and buys `k - 1`, otherwise
    /// `floor(v)`.
    #[inline]
    pub fn count(&self, ln_price_over_utility: f64) -> u64 {
        let v = (ln_price_over_utility + self.shift) * self.inv_ln_eps;
        if v < 1.0 - BOUNDARY_SNAP {
            return 0;
        }
        // v >= 1 - snap here; a fractional part just below one floors to
        // `whole`, which is also round(v) - 1
        let whole = v as u64;
        if v - whole as f64 <= BOUNDARY_SNAP {
            whole - 1
        } else {
            whole
        }
    }
}

#[inline]
pub(crate) fn ln_ratio(price: f64, utility: f64) -> f64 {
    price.ln() - utility.ln()
}

fn check_price(model: &GaiModel, price: f64) -> Result<()> {
    if price.is_finite() && price >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidPrice {
            id: model.id().to_string(),
            price,
        })
    }
}

pub fn optimal_prompt_count(model: &GaiModel, price: f64, eps: Ambiguity) -> Result<PromptCount> {
    check_price(model, price)?;
    if price == 0.0 {
        return Ok(PromptCount::Unbounded);
    }
    let logs = EpsLogs::new(eps.value());
    Ok(PromptCount::Finite(
        logs.count(ln_ratio(price, model.utility())),
    ))
}

/// `(1 - eps^n) * U - n * p`.
pub fn user_payoff(model: &GaiModel, price: f64, eps: Ambiguity, n: u64) -> f64 {
    payoff_at(model.utility(), price, eps.value(), n)
}

#[inline]
pub(crate) fn payoff_at(utility: f64, price: f64, eps: f64, n: u64) -> f64 {
    let eps_n = if n <= i32::MAX as u64 {
        eps.powi(n as i32)
    } else {
        eps.powf(n as f64)
    };
    (1.0 - eps_n) * utility - n as f64 * price
}

fn payoff_of(utility: f64, price: f64, eps: f64, count: PromptCount) -> f64 {
    match count {
        PromptCount::Finite(n) => payoff_at(utility, price, eps, n),
        PromptCount::Unbounded => utility,
    }
}

/// Ordering used for model selection: payoff (with tolerance), then higher
/// utility, then lower id. `Greater` means `a` is preferred.
pub(crate) fn compare_candidates(a: (&GaiModel, f64), b: (&GaiModel, f64)) -> Ordering {
    if a.1 > b.1 + TIE_TOLERANCE {
        return Ordering::Greater;
    }
    if b.1 > a.1 + TIE_TOLERANCE {
        return Ordering::Less;
    }
    a.0.utility()
        .partial_cmp(&b.0.utility())
        .unwrap_or(Ordering::Equal)
        .then_with(|| b.0.id().cmp(a.0.id()))
}

pub fn select_model(
    models: &ModelSet,
    prices: &PriceSchedule,
    eps: Ambiguity,
) -> Result<UserDecision> {
    let mut best: Option<(&GaiModel, PromptCount, f64)> = None;
    for m in models {
        let p = prices.price(m.id())?;
        let count = optimal_prompt_count(m, p, eps)?;
        let payoff = payoff_of(m.utility(), p, eps.value(), count);
        let better = match &best {
            None => true,
            Some((bm, _, bp)) => compare_candidates((m, payoff), (bm, *bp)) == Ordering::Greater,
        };
        if better {
            best = Some((m, count, payoff));
        }
    }
    let (m, count, payoff) = best.ok_or(Error::EmptyModelSet)?;
    if count.is_zero() {
        return Ok(UserDecision {
            selected_model: None,
            prompt_count: PromptCount::Finite(0),
            payoff: 0.0,
        });
    }
    Ok(UserDecision {
        selected_model: Some(m.id().to_string()),
        prompt_count: count,
        payoff,
    })
}

pub fn optimal_user_payoff(
    models: &ModelSet,
    prices: &PriceSchedule,
    eps: Ambiguity,
) -> Result<f64> {
    select_model(models, prices, eps).map(|d| d.payoff)
}

/// `k^k / (k+1)^(k+1)`, the largest price-to-utility ratio at which some
/// ambiguity level still buys `k + 1` prompts.
pub(crate) fn max_ratio_for_next_prompt(k: u64) -> f64 {
    let kf = k as f64;
    (kf / (kf + 1.0)).powf(kf) / (kf + 1.0)
}

/// Largest prompt count any ambiguity level can reach at this price:
/// `min { k >= 1 : k^k / (k+1)^(k+1) < p / U }`.
pub fn prompt_upper_bound(model: &GaiModel, price: f64) -> Result<u64> {
    if !(price.is_finite() && price > 0.0) {
        return Err(Error::InvalidPrice {
            id: model.id().to_string(),
            price,
        });
    }
    let ratio = price / model.utility();
    if max_ratio_for_next_prompt(1) < ratio {
        return Ok(1);
    }
    // the ratio sequence is strictly decreasing, so the first hit can be
    // located by doubling then bisecting instead of a linear scan
    let mut lo = 1u64; // fails
    let mut hi = 2u64;
    while max_ratio_for_next_prompt(hi) >= ratio {
        lo = hi;
        hi = hi.saturating_mul(2);
        if hi == u64::MAX {
            break;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if max_ratio_for_next_prompt(mid) < ratio {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

pub fn classify_prompt_shape(model: &GaiModel, price: f64) -> Result<PromptShape> {
    check_price(model, price)?;
    let u = model.utility();
    Ok(if price == 0.0 {
        PromptShape::AlwaysInfinite
    } else if price <= u / 4.0 {
        PromptShape::InverseUShaped
    } else if price < u {
        PromptShape::Decreasing
    } else {
        PromptShape::AlwaysZero
    })
}
