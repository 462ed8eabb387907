//! Two-model price search: a grid over the low model's price, and for each
//! grid price a search over the high model's price on the gain function.
//!
//! For a fixed `p_L` every user has a threshold `pbar(eps)`: they pick the
//! high model iff `p_H <= pbar(eps)`. Relative to serving everyone with the
//! low model, pricing the high model at `p_H` changes the platform payoff by
//!
//! `G(p_H) = sum_i w_i 1[p_H <= pbar_i] ((p_H - C_H) n_H,i - (p_L - C_L) n_L,i)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bound::bound_from_payoff;
use super::{outcome_from, Method, PopNode, Population, PricingOutcome};
use crate::distribution::AmbiguityDistribution;
use crate::error::{Error, Result};
use crate::model::{GaiModel, ModelSet};
use crate::numeric::{golden_section_max, QuadratureConfig};
use crate::user_strategy::{ln_ratio, payoff_at, EpsLogs};

/// Points on the `p_H` grid used to locate stationary points of `G`.
pub const GAIN_GRID_POINTS: usize = 1000;
/// Stationary points polished per `p_L`, best grid value first.
const POLISHED_CANDIDATES: usize = 8;
/// Stand-in for the vanishing-ambiguity limit of the price bound.
const EPS_NEAR_ZERO: f64 = 1e-6;
/// Users within this distance of their threshold count as high-model users.
const BOUNDARY_SNAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OppConfig {
    pub step_alpha: f64,
    /// Golden-section polish of `p_L` around the best grid point.
    pub refinement: bool,
    pub quad: QuadratureConfig,
}

impl OppConfig {
    /// `alpha = 1e-3 U_L`, refinement on, default quadrature.
    pub fn for_models(models: &ModelSet) -> Self {
        let u_low = models.models()[0].utility();
        Self {
            step_alpha: 1e-3 * u_low,
            refinement: true,
            quad: QuadratureConfig::default(),
        }
    }
}

/// Best high-model price found for one low-model price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OppTraceRow {
    pub p_low: f64,
    pub p_high: f64,
    pub platform_payoff: f64,
    /// Payoff if every user took the low model at `p_low`.
    pub low_only_payoff: f64,
    pub candidates: usize,
}

#[derive(Debug, Clone, Copy)]
struct GainNode {
    weight: f64,
    logs: EpsLogs,
    /// `(p_L - C_L) n_L` for this user.
    low_margin: f64,
    bar: f64,
}

/// The inner problem for a fixed `p_L`.
pub(crate) struct Gain<'a> {
    high: &'a GaiModel,
    nodes: Vec<GainNode>,
    /// Payoff when every user takes the low model.
    pub low_payoff: f64,
}

impl<'a> Gain<'a> {
    pub fn new(pop: &Population, low: &GaiModel, high: &'a GaiModel, p_low: f64) -> Self {
        let ln_r = ln_ratio(p_low, low.utility());
        let margin = p_low - low.cost();
        let mut low_payoff = 0.0;
        let nodes = pop
            .nodes
            .iter()
            .map(|&PopNode { weight, logs }| {
                let n = logs.count(ln_r);
                let rival = payoff_at(low.utility(), p_low, logs.eps, n);
                let low_margin = margin * n as f64;
                low_payoff += weight * low_margin;
                GainNode {
                    weight,
                    logs,
                    low_margin,
                    bar: bound_from_payoff(high.utility(), logs.eps, rival),
                }
            })
            .collect();
        Self {
            high,
            nodes,
            low_payoff,
        }
    }

    pub fn max_bar(&self) -> f64 {
        self.nodes.iter().map(|n| n.bar).fold(0.0, f64::max)
    }

    /// Exact `G(p_H)` over the quadrature nodes.
    pub fn value(&self, p_high: f64) -> f64 {
        let ln_r = ln_ratio(p_high, self.high.utility());
        let margin = p_high - self.high.cost();
        let mut total = 0.0;
        for node in &self.nodes {
            if p_high <= node.bar + BOUNDARY_SNAP {
                let n = node.logs.count(ln_r);
                total += node.weight * (margin * n as f64 - node.low_margin);
            }
        }
        total
    }

    /// Maximizer of `G` on `[a, b]`.
    ///
    /// On the quadrature nodes `G(p) = (p - C_H) A(p) - B(p)` with step
    /// functions `A`, `B` that change only at breakpoints, so the supremum on
    /// any piece is the left limit at its right end. A user's switching
    /// price can coincide with one of its prompt thresholds, so every
    /// breakpoint is scored from just below, once per distinct price.
    pub fn max_on(&self, a: f64, b: f64) -> (f64, f64) {
        #[derive(Clone, Copy)]
        enum Event {
            Leave(usize),
            DropPrompt(usize),
        }
        impl Event {
            fn node(self) -> usize {
                match self {
                    Self::Leave(i) | Self::DropPrompt(i) => i,
                }
            }
        }
        let u = self.high.utility();
        let c = self.high.cost();
        let ln_a = ln_ratio(a, u);
        let (mut prompts, mut low) = (0.0, 0.0);
        let mut events: Vec<(f64, Event)> = Vec::new();
        for (i, node) in self.nodes.iter().enumerate() {
            let cutoff = node.bar + BOUNDARY_SNAP;
            if cutoff < a {
                continue;
            }
            let n = node.logs.count(ln_a);
            prompts += node.weight * n as f64;
            low += node.weight * node.low_margin;
            if cutoff < b {
                events.push((node.bar, Event::Leave(i)));
            }
            // thresholds eps^(k-1) (1 - eps) U for k = n, n-1, ..., 1
            let e = node.logs.eps;
            if n > 0 {
                let mut t = e.powi(n as i32 - 1) * (1.0 - e) * u;
                for _ in 0..n {
                    if t > b || t > cutoff {
                        break;
                    }
                    if t > a {
                        events.push((t, Event::DropPrompt(i)));
                    }
                    t /= e;
                }
            }
        }
        events.sort_by(|x, y| x.0.total_cmp(&y.0));

        let mut dropped = vec![0u64; self.nodes.len()];
        let mut gone = vec![false; self.nodes.len()];
        let mut best = (a, (a - c) * prompts - low);
        let mut prev = f64::NAN;
        for &(x, ev) in &events {
            if x != prev {
                // left limit, far enough below `x` to clear the count snap
                let at = x * (1.0 - 2e-8 * (1.0 + self.nodes[ev.node()].logs.eps.ln().abs()));
                let value = (at - c) * prompts - low;
                if value > best.1 && at >= a {
                    best = (at, value);
                }
                prev = x;
            }
            match ev {
                Event::Leave(i) => {
                    let node = &self.nodes[i];
                    let n = node.logs.count(ln_a) - dropped[i];
                    prompts -= node.weight * n as f64;
                    low -= node.weight * node.low_margin;
                    gone[i] = true;
                }
                Event::DropPrompt(i) => {
                    if !gone[i] {
                        prompts -= self.nodes[i].weight;
                        dropped[i] += 1;
                    }
                }
            }
        }
        let end = (b - c) * prompts - low;
        if end > best.1 {
            best = (b, end);
        }
        // rescore on the nodes so the sweep's bookkeeping never leaks out
        (best.0, self.value(best.0))
    }

    /// `G` on `points` evenly spaced prices over `[lo, hi]`.
    ///
    /// Each user adds a constant over the prefix of the grid at or below its
    /// threshold, and one weight per prompt over the prefix where that prompt
    /// is still bought, so the sweep costs one pass over prompts, not prices.
    pub fn on_grid(&self, lo: f64, hi: f64, points: usize) -> Vec<f64> {
        let h = (hi - lo) / (points - 1) as f64;
        // last grid index with price <= x, or None when x < lo
        let last_at_or_below = |x: f64| -> Option<usize> {
            if x < lo {
                None
            } else {
                Some((((x - lo) / h).floor() as usize).min(points - 1))
            }
        };
        let mut d_prompts = vec![0.0; points + 1];
        let mut d_low = vec![0.0; points + 1];
        let u = self.high.utility();
        for node in &self.nodes {
            let Some(j_bar) = last_at_or_below(node.bar + BOUNDARY_SNAP) else {
                continue;
            };
            d_low[0] += node.weight * node.low_margin;
            d_low[j_bar + 1] -= node.weight * node.low_margin;
            // prompt k is bought iff p < eps^(k-1) (1 - eps) U
            let e = node.logs.eps;
            let mut t = (1.0 - e) * u;
            while t > lo {
                let mut j = last_at_or_below(t).unwrap_or(0);
                if lo + j as f64 * h >= t {
                    if j == 0 {
                        break;
                    }
                    j -= 1;
                }
                let end = j.min(j_bar);
                d_prompts[0] += node.weight;
                d_prompts[end + 1] -= node.weight;
                t *= e;
            }
        }
        let c = self.high.cost();
        let (mut prompts, mut low) = (0.0, 0.0);
        (0..points)
            .map(|j| {
                prompts += d_prompts[j];
                low += d_low[j];
                let p = lo + j as f64 * h;
                (p - c) * prompts - low
            })
            .collect()
    }
}

struct InnerBest {
    p_high: f64,
    payoff: f64,
    low_only_payoff: f64,
    candidates: usize,
}

fn push_candidate(cands: &mut Vec<f64>, p: f64, high: &GaiModel) {
    if p.is_finite() && p > 0.0 && p <= high.utility() {
        cands.push(p);
    }
}

/// Best `p_H` for a fixed `p_L`, scored by the direct two-model payoff.
fn solve_inner(pop: &Population, models: &[GaiModel], p_low: f64) -> InnerBest {
    let (low, high) = (&models[0], &models[1]);
    let mut cands = Vec::new();
    let gain = Gain::new(pop, low, high, p_low);
    if high.cost() >= high.utility() {
        cands.push(high.utility());
    } else {
        push_candidate(&mut cands, high.cost(), high);
        let near_zero = EpsLogs::new(EPS_NEAR_ZERO);
        let n = near_zero.count(ln_ratio(p_low, low.utility()));
        let rival = payoff_at(low.utility(), p_low, EPS_NEAR_ZERO, n);
        let bar_zero = bound_from_payoff(high.utility(), EPS_NEAR_ZERO, rival);
        push_candidate(&mut cands, bar_zero, high);

        let lo = high.cost().max(1e-12 * high.utility());
        let hi = gain.max_bar().max(bar_zero).min(high.utility());
        if hi > lo {
            let g = gain.on_grid(lo, hi, GAIN_GRID_POINTS);
            let h = (hi - lo) / (GAIN_GRID_POINTS - 1) as f64;
            let last = g.len() - 1;
            let mut peaks: Vec<usize> = (0..g.len())
                .filter(|&j| {
                    let left = if j == 0 { f64::NEG_INFINITY } else { g[j - 1] };
                    let right = if j == last {
                        f64::NEG_INFINITY
                    } else {
                        g[j + 1]
                    };
                    g[j] >= left && g[j] > right
                })
                .collect();
            // the full-range sweep is exact on the nodes; the grid peaks
            // keep candidates alive when it lands on a rounding artifact
            push_candidate(&mut cands, gain.max_on(lo, hi).0, high);
            peaks.sort_by(|&a, &b| g[b].total_cmp(&g[a]).then(a.cmp(&b)));
            peaks.truncate(POLISHED_CANDIDATES);
            for j in peaks {
                let p_j = lo + j as f64 * h;
                push_candidate(&mut cands, p_j, high);
                let a = (p_j - h).max(lo);
                let b = (p_j + h).min(hi);
                let (x, _) = gain.max_on(a, b);
                push_candidate(&mut cands, x, high);
            }
        }
        if cands.is_empty() {
            cands.push(high.utility());
        }
    }
    let mut best = InnerBest {
        p_high: cands[0],
        payoff: f64::NEG_INFINITY,
        low_only_payoff: gain.low_payoff,
        candidates: cands.len(),
    };
    for &p in &cands {
        let v = pop.evaluate(models, &[p_low, p]).payoff;
        if v > best.payoff {
            best.p_high = p;
            best.payoff = v;
        }
    }
    best
}

fn low_price_grid(low: &GaiModel, alpha: f64) -> Vec<f64> {
    let (u, c) = (low.utility(), low.cost());
    if c >= u {
        return vec![u];
    }
    let steps = ((u - c) / alpha + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|j| c + j as f64 * alpha)
        .filter(|&p| p > 0.0)
        .collect();
    if grid.last().is_none_or(|&p| u - p > 1e-12 * u) {
        grid.push(u);
    }
    grid
}

fn check(models: &ModelSet, cfg: &OppConfig) -> Result<()> {
    let Some((low, _)) = models.as_pair() else {
        return Err(Error::ConfigError(format!(
            "price search needs exactly two models, got {}",
            models.len()
        )));
    };
    if !(cfg.step_alpha > 0.0 && cfg.step_alpha < low.utility()) {
        return Err(Error::ConfigError(format!(
            "step_alpha must lie in (0, U_L = {}), got {}",
            low.utility(),
            cfg.step_alpha
        )));
    }
    Ok(())
}

pub fn opp(
    models: &ModelSet,
    dist: &AmbiguityDistribution,
    cfg: &OppConfig,
) -> Result<PricingOutcome> {
    opp_with_trace(models, dist, cfg).map(|(out, _)| out)
}

/// [`opp`] plus the best `p_H` and payoff for every grid `p_L`.
pub fn opp_with_trace(
    models: &ModelSet,
    dist: &AmbiguityDistribution,
    cfg: &OppConfig,
) -> Result<(PricingOutcome, Vec<OppTraceRow>)> {
    check(models, cfg)?;
    let pop = Population::new(dist, &cfg.quad);
    let ms = models.models();
    let low = &ms[0];

    let grid = low_price_grid(low, cfg.step_alpha);
    let trace: Vec<OppTraceRow> = grid
        .par_iter()
        .map(|&p_low| {
            let b = solve_inner(&pop, ms, p_low);
            OppTraceRow {
                p_low,
                p_high: b.p_high,
                platform_payoff: b.payoff,
                low_only_payoff: b.low_only_payoff,
                candidates: b.candidates,
            }
        })
        .collect();

    let mut best = trace[0];
    for row in &trace[1..] {
        if row.platform_payoff > best.platform_payoff {
            best = *row;
        }
    }
    let (mut p_low, mut p_high) = (best.p_low, best.p_high);
    if cfg.refinement && grid.len() > 1 {
        let a = (p_low - cfg.step_alpha)
            .max(low.cost())
            .max(1e-12 * low.utility());
        let b = (p_low + cfg.step_alpha).min(low.utility());
        let (x, fx) = golden_section_max(
            |p| solve_inner(&pop, ms, p).payoff,
            a,
            b,
            1e-9 * low.utility(),
        );
        if fx > best.platform_payoff {
            p_low = x;
            p_high = solve_inner(&pop, ms, x).p_high;
        }
    }
    let prices = [p_low, p_high];
    let eval = pop.evaluate(ms, &prices);
    let out = outcome_from(models, &prices, eval, Method::Opp)?;
    Ok((out, trace))
}
