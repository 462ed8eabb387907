//! Highest price at which a user still prefers a model over a rival.

use crate::error::{Error, Result};
use crate::model::{Ambiguity, GaiModel};
use crate::user_strategy::{optimal_prompt_count, payoff_at, PromptCount};

/// Steps of the linear scan before switching to doubling and bisection.
const LINEAR_SCAN: u64 = 64;

#[inline]
fn threshold_rhs(utility: f64, eps: f64, eps_k: f64, k: u64) -> f64 {
    utility * (1.0 - eps_k * (1.0 + k as f64 * (1.0 - eps)))
}

/// `tau = min { k >= 1 : A' < U (1 - eps^k (1 + k (1 - eps))) }` for a rival
/// payoff `A'`. The right side increases to `U`, so `None` iff `A' >= U`.
pub(crate) fn threshold(utility: f64, eps: f64, rival_payoff: f64) -> Option<u64> {
    if rival_payoff >= utility {
        return None;
    }
    let mut eps_k = 1.0;
    for k in 1..=LINEAR_SCAN {
        eps_k *= eps;
        if rival_payoff < threshold_rhs(utility, eps, eps_k, k) {
            return Some(k);
        }
    }
    let holds = |k: u64| rival_payoff < threshold_rhs(utility, eps, eps.powf(k as f64), k);
    let mut lo = LINEAR_SCAN;
    let mut hi = 2 * LINEAR_SCAN;
    while !holds(hi) {
        lo = hi;
        hi = hi.checked_mul(2)?;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// `((1 - eps^tau) U - A') / tau`, clamped at zero; zero without a threshold.
pub(crate) fn bound_from_payoff(utility: f64, eps: f64, rival_payoff: f64) -> f64 {
    match threshold(utility, eps, rival_payoff) {
        Some(tau) => {
            let gain = (1.0 - eps.powf(tau as f64)) * utility - rival_payoff;
            (gain / tau as f64).max(0.0)
        }
        None => 0.0,
    }
}

fn rival_payoff(m_prime: &GaiModel, price_m_prime: f64, eps: Ambiguity) -> Result<f64> {
    if !(price_m_prime.is_finite() && price_m_prime > 0.0) {
        return Err(Error::InvalidPrice {
            id: m_prime.id().to_string(),
            price: price_m_prime,
        });
    }
    let n = match optimal_prompt_count(m_prime, price_m_prime, eps)? {
        PromptCount::Finite(n) => n,
        PromptCount::Unbounded => unreachable!("price is positive"),
    };
    Ok(payoff_at(m_prime.utility(), price_m_prime, eps.value(), n))
}

/// Prompt count `tau` at which `m` first beats the rival's optimal payoff.
pub fn preference_threshold(
    m: &GaiModel,
    m_prime: &GaiModel,
    price_m_prime: f64,
    eps: Ambiguity,
) -> Result<u64> {
    let a = rival_payoff(m_prime, price_m_prime, eps)?;
    threshold(m.utility(), eps.value(), a).ok_or_else(|| {
        Error::NoPreferenceBound(format!(
            "{} never beats {} at price {price_m_prime} and eps {eps}",
            m.id(),
            m_prime.id()
        ))
    })
}

/// Largest price of `m` at which a user with ambiguity `eps` still picks `m`
/// over `m_prime` priced at `price_m_prime`. Zero when `m` cannot win.
pub fn price_upper_bound(
    m: &GaiModel,
    m_prime: &GaiModel,
    price_m_prime: f64,
    eps: Ambiguity,
) -> Result<f64> {
    let a = rival_payoff(m_prime, price_m_prime, eps)?;
    Ok(bound_from_payoff(m.utility(), eps.value(), a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelSet, PriceSchedule};
    use crate::user_strategy::select_model;

    fn low() -> GaiModel {
        GaiModel::new("L", 1.0, 0.02).unwrap()
    }

    fn high() -> GaiModel {
        GaiModel::new("H", 1.8, 0.04).unwrap()
    }

    fn picks_high(p_l: f64, p_h: f64, eps: f64) -> bool {
        let set = ModelSet::pair(low(), high()).unwrap();
        let s = PriceSchedule::for_models(&set, &[p_l, p_h]).unwrap();
        let d = select_model(&set, &s, Ambiguity::new(eps).unwrap()).unwrap();
        d.selected_model.as_deref() == Some("H")
    }

    /// Independent oracle: `max_n ((1 - eps^n) U - A') / n`.
    fn best_line_crossing(u: f64, e: f64, a: f64) -> f64 {
        (1..10_000)
            .map(|n| ((1.0 - e.powi(n)) * u - a) / n as f64)
            .fold(0.0, f64::max)
    }

    #[test]
    fn bound_is_the_flip_point() {
        let eps = 0.5;
        let bar = price_upper_bound(&high(), &low(), 0.3, Ambiguity::new(eps).unwrap()).unwrap();
        assert!(bar > 0.0);
        assert!(picks_high(0.3, bar - 1e-6, eps));
        assert!(!picks_high(0.3, bar + 1e-6, eps));
    }

    #[test]
    fn small_ambiguity_needs_one_prompt() {
        let e = Ambiguity::new(1e-3).unwrap();
        assert_eq!(preference_threshold(&high(), &low(), 0.3, e).unwrap(), 1);
        let bar = price_upper_bound(&high(), &low(), 0.3, e).unwrap();
        // rival buys one prompt: A' = (1 - eps) - 0.3
        let a = (1.0 - 1e-3) - 0.3;
        assert!((bar - ((1.0 - 1e-3) * 1.8 - a)).abs() < 1e-12);
    }

    #[test]
    fn dominated_model_gets_zero_bound() {
        let weak = GaiModel::new("w", 0.5, 0.0).unwrap();
        let strong = GaiModel::new("s", 2.0, 0.0).unwrap();
        let e = Ambiguity::new(0.1).unwrap();
        assert_eq!(price_upper_bound(&weak, &strong, 1e-3, e).unwrap(), 0.0);
        assert!(matches!(
            preference_threshold(&weak, &strong, 1e-3, e),
            Err(Error::NoPreferenceBound(_))
        ));
    }

    #[test]
    fn matches_line_crossing_oracle() {
        for i in 1..100 {
            let e = i as f64 / 100.0;
            for j in 1..40 {
                let a = j as f64 * 0.045;
                let got = bound_from_payoff(1.8, e, a);
                let want = best_line_crossing(1.8, e, a);
                assert!((got - want).abs() < 1e-12, "eps={e} a={a}: {got} vs {want}");
            }
        }
    }

    #[test]
    fn long_scans_fall_back_to_bisection() {
        let e = 0.9999;
        let a = 1.8 * (1.0 - 1e-7);
        let tau = threshold(1.8, e, a).unwrap();
        assert!(tau > LINEAR_SCAN);
        let rhs = |k: u64| threshold_rhs(1.8, e, e.powf(k as f64), k);
        assert!(a < rhs(tau));
        assert!(a >= rhs(tau - 1));
    }

    #[test]
    fn rejects_zero_rival_price() {
        let e = Ambiguity::new(0.5).unwrap();
        assert!(price_upper_bound(&high(), &low(), 0.0, e).is_err());
    }
}
