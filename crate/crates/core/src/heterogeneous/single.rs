//! Single-model pricing under an ambiguity distribution.
//!
//! A user buys at least `k` prompts iff `eps^(k-1) (1-eps) U >= p`, so expected
//! demand is `N(p) = F(1 - p/U) + sum_{k>=2} F[lambda1(k), lambda2(k)]`. Each
//! term switches on when `p/U` falls below the peak of `eps^(k-1)(1-eps)`,
//! which splits `(C, U]` into smooth segments.

use serde::Serialize;

use super::{outcome_from, Evaluation, Method, Population, PricingOutcome};
use crate::distribution::AmbiguityDistribution;
use crate::error::Result;
use crate::model::{GaiModel, ModelSet};
use crate::numeric::{find_root_bracketed, golden_section_max, QuadratureConfig};
use crate::user_strategy::{max_ratio_for_next_prompt, prompt_upper_bound};

/// Grid points per segment before the golden-section polish.
const SEGMENT_SAMPLES: usize = 64;
const MAX_SEGMENTS: u64 = 200;
/// Lowest searched price as a fraction of utility when the cost is zero.
const MIN_PRICE_RATIO: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SegmentRoots {
    pub k: u64,
    pub lambda1: f64,
    pub lambda2: f64,
}

/// Ambiguity levels where `eps^(k-1) (1 - eps) U = p`, or `None` when the
/// price is above the curve's peak at `(k-1)/k`.
pub fn segment_roots(model: &GaiModel, price: f64, k: u64) -> Option<SegmentRoots> {
    if k < 2 || !(price.is_finite() && price > 0.0) {
        return None;
    }
    let u = model.utility();
    let g = |e: f64| e.powi(k as i32 - 1) * (1.0 - e) * u - price;
    let mode = (k - 1) as f64 / k as f64;
    let peak = g(mode);
    let tangent_tol = 1e-14 * u;
    if peak < -tangent_tol {
        return None;
    }
    if peak <= tangent_tol {
        return Some(SegmentRoots {
            k,
            lambda1: mode,
            lambda2: mode,
        });
    }
    let lambda1 = find_root_bracketed(g, 0.0, mode, 1e-15).ok()?;
    let lambda2 = find_root_bracketed(g, mode, 1.0, 1e-15).ok()?;
    Some(SegmentRoots {
        k,
        lambda1,
        lambda2,
    })
}

/// `N(p)` from exact distribution masses.
pub(crate) fn expected_prompts(model: &GaiModel, price: f64, dist: &AmbiguityDistribution) -> f64 {
    let u = model.utility();
    let mut total = dist.mass(0.0, 1.0 - price / u);
    let Ok(n_bar) = prompt_upper_bound(model, price) else {
        return total;
    };
    for k in 2..=n_bar {
        match segment_roots(model, price, k) {
            Some(r) => total += dist.mass(r.lambda1, r.lambda2),
            None => break,
        }
    }
    total
}

pub fn single_model_price(
    model: &GaiModel,
    dist: &AmbiguityDistribution,
    quad: &QuadratureConfig,
) -> Result<PricingOutcome> {
    let set = ModelSet::single(model.clone());
    let (u, c) = (model.utility(), model.cost());
    if c >= u {
        let eval = Evaluation {
            payoff: 0.0,
            volumes: vec![0.0],
        };
        return outcome_from(&set, &[u], eval, Method::SingleModel);
    }
    let objective = |p: f64| (p - c) * expected_prompts(model, p, dist);
    let lo = c.max(MIN_PRICE_RATIO * u);

    // segment edges: U, then the peaks U k^k/(k+1)^(k+1) above `lo`
    let mut edges = vec![u];
    for k in 1..MAX_SEGMENTS {
        let b = u * max_ratio_for_next_prompt(k);
        if b <= lo {
            break;
        }
        edges.push(b);
    }
    edges.push(lo);

    let mut best = (u, objective(u));
    for w in edges.windows(2) {
        let (hi, a) = (w[0], w[1]);
        let step = (hi - a) / (SEGMENT_SAMPLES - 1) as f64;
        let (mut bi, mut bv) = (0, f64::NEG_INFINITY);
        for i in 0..SEGMENT_SAMPLES {
            let v = objective(a + i as f64 * step);
            if v > bv {
                bi = i;
                bv = v;
            }
        }
        let left = a + bi.saturating_sub(1) as f64 * step;
        let right = (a + (bi + 1) as f64 * step).min(hi);
        let (x, fx) = golden_section_max(objective, left, right, 1e-12 * u);
        if fx > best.1 {
            best = (x, fx);
        }
    }

    let pop = Population::new(dist, quad);
    let eval = pop.evaluate(set.models(), &[best.0]);
    outcome_from(&set, &[best.0], eval, Method::SingleModel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heterogeneous::platform_payoff;
    use crate::model::PriceSchedule;

    fn model(c: f64) -> GaiModel {
        GaiModel::new("m", 1.0, c).unwrap()
    }

    #[test]
    fn roots_examples() {
        assert_eq!(segment_roots(&model(0.0), 0.3, 2), None);
        let r = segment_roots(&model(0.0), 0.1, 2).unwrap();
        let s = 0.6f64.sqrt();
        assert!((r.lambda1 - (1.0 - s) / 2.0).abs() < 1e-10);
        assert!((r.lambda2 - (1.0 + s) / 2.0).abs() < 1e-10);
        let r = segment_roots(&model(0.0), 4.0 / 27.0, 3).unwrap();
        assert!((r.lambda1 - 2.0 / 3.0).abs() < 1e-6);
        assert!((r.lambda2 - 2.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn roots_solve_the_curve() {
        for k in 2..12u64 {
            for &p in &[0.001, 0.01, 0.05, 0.1] {
                if let Some(r) = segment_roots(&model(0.0), p, k) {
                    let g = |e: f64| e.powi(k as i32 - 1) * (1.0 - e) - p;
                    assert!(g(r.lambda1).abs() < 1e-10 && g(r.lambda2).abs() < 1e-10);
                    let mode = (k - 1) as f64 / k as f64;
                    assert!(r.lambda1 <= mode && mode <= r.lambda2);
                }
            }
        }
    }

    #[test]
    fn uniform_closed_form() {
        let d = AmbiguityDistribution::uniform(0.0, 1.0).unwrap();
        for &c in &[0.1, 0.2, 0.4] {
            let out = single_model_price(&model(c), &d, &QuadratureConfig::default()).unwrap();
            let p = out.schedule.price("m").unwrap();
            assert!((p - (1.0 + c) / 2.0).abs() < 1e-3, "c={c}: {p}");
        }
    }

    #[test]
    fn expected_prompts_matches_quadrature() {
        let d = AmbiguityDistribution::uniform(0.1, 0.95).unwrap();
        let q = QuadratureConfig::new(20_001).unwrap();
        let m = model(0.0);
        for &p in &[0.02, 0.07, 0.15, 0.3, 0.6] {
            let s = PriceSchedule::for_models(&ModelSet::single(m.clone()), &[p]).unwrap();
            let n_quad = platform_payoff(&ModelSet::single(m.clone()), &s, &d, &q)
                .unwrap()
                .prompt_volume["m"];
            let n_exact = expected_prompts(&m, p, &d);
            assert!(
                (n_quad - n_exact).abs() < 1e-3,
                "p={p}: {n_quad} vs {n_exact}"
            );
        }
    }

    #[test]
    fn matches_fine_price_grid() {
        let m = model(0.2);
        let d = AmbiguityDistribution::uniform(0.5, 0.9).unwrap();
        let q = QuadratureConfig::default();
        let out = single_model_price(&m, &d, &q).unwrap();
        let p = out.schedule.price("m").unwrap();

        // exhaustive 1e-4 grid over (C, U] on the exact objective
        let mut grid_best = (0.0, f64::NEG_INFINITY);
        for i in 1..=8000 {
            let x = 0.2 + i as f64 * 1e-4;
            let v = (x - 0.2) * expected_prompts(&m, x, &d);
            if v > grid_best.1 {
                grid_best = (x, v);
            }
        }
        assert!((p - grid_best.0).abs() <= 2e-4, "{p} vs {}", grid_best.0);

        // and on the quadrature payoff the platform actually reports
        let set = ModelSet::single(m.clone());
        let pop = Population::new(&d, &q);
        let quad_best = (1..=8000)
            .map(|i| pop.evaluate(set.models(), &[0.2 + i as f64 * 1e-4]).payoff)
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((out.platform_payoff - quad_best).abs() < 1e-3);
    }

    #[test]
    fn unprofitable_model_priced_at_utility() {
        let d = AmbiguityDistribution::uniform(0.0, 1.0).unwrap();
        let out = single_model_price(&model(1.0), &d, &QuadratureConfig::default()).unwrap();
        assert_eq!(out.platform_payoff, 0.0);
        assert_eq!(out.schedule.price("m").unwrap(), 1.0);
    }
}
