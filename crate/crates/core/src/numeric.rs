//! Quadrature, bracketed root finding and bracketed 1-D maximization.

use serde::{Deserialize, Serialize};

use crate::distribution::AmbiguityDistribution;
use crate::error::{Error, Result};

pub const DEFAULT_NODE_COUNT: usize = 2001;

/// Composite midpoint rule over the distribution's support.
///
/// Nodes are open-interval midpoints, so the endpoints 0 and 1 are never
/// evaluated even when the support touches them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    node_count: usize,
}

impl QuadratureConfig {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::InvalidQuadrature(format!(
                "node_count must be at least 3, got {node_count}"
            )));
        }
        Ok(Self { node_count })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// `(eps_i, weight_i)` pairs where `weight_i = f(eps_i) * h`.
    pub fn nodes(&self, dist: &AmbiguityDistribution) -> Vec<QuadNode> {
        let (lo, hi) = dist.support();
        let h = (hi - lo) / self.node_count as f64;
        (0..self.node_count)
            .map(|i| {
                let eps = lo + (i as f64 + 0.5) * h;
                QuadNode {
                    eps,
                    weight: dist.density(eps) * h,
                }
            })
            .collect()
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            node_count: DEFAULT_NODE_COUNT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadNode {
    pub eps: f64,
    pub weight: f64,
}

/// `sum_i f(eps_i) * density(eps_i) * h` over the midpoint nodes.
pub fn integrate<F>(f: F, dist: &AmbiguityDistribution, quad: &QuadratureConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let mut total = 0.0;
    for (index, node) in quad.nodes(dist).into_iter().enumerate() {
        let value = f(node.eps);
        if !value.is_finite() {
            return Err(Error::NonFinite {
                index,
                eps: node.eps,
                value,
            });
        }
        total += value * node.weight;
    }
    Ok(total)
}

/// Bisection on a sign-changing bracket. The result always lies in `[lo, hi]`.
pub fn find_root_bracketed<G>(g: G, lo: f64, hi: f64, tol: f64) -> Result<f64>
where
    G: Fn(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() {
        return Err(Error::NoBracket {
            lo: a,
            hi: b,
            g_lo: ga,
            g_hi: gb,
        });
    }
    // 200 halvings exhaust f64 resolution on any finite bracket
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let gm = g(mid);
        if gm.abs() < tol || b - a < tol {
            return Ok(mid);
        }
        if gm.signum() == ga.signum() {
            a = mid;
            ga = gm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a maximum of `f` on `[lo, hi]`.
///
/// Returns `(x, f(x))`; the endpoints are also compared so a monotone
/// objective returns its better boundary.
pub fn golden_section_max<F>(f: F, lo: f64, hi: f64, xtol: f64) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iter = 0;
    while b - a > xtol && iter < 200 {
        iter += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc >= fd { (c, fc) } else { (d, fd) };
    for x in [lo.min(hi), lo.max(hi)] {
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform(a: f64, b: f64) -> AmbiguityDistribution {
        AmbiguityDistribution::uniform(a, b).unwrap()
    }

    #[test]
    fn integrate_constant_and_mean() {
        let q = QuadratureConfig::default();
        let d = uniform(0.0, 1.0);
        assert!((integrate(|_| 1.0, &d, &q).unwrap() - 1.0).abs() < 1e-9);
        assert!((integrate(|e| e, &d, &q).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn integrate_square_on_subinterval() {
        // (0.8^3 - 0.2^3) / 3 / 0.6 = 0.28
        let v = integrate(|e| e * e, &uniform(0.2, 0.8), &QuadratureConfig::default()).unwrap();
        assert!((v - 0.28).abs() < 1e-6, "{v}");
    }

    #[test]
    fn integrate_reports_bad_node() {
        let q = QuadratureConfig::new(11).unwrap();
        let err = integrate(
            |e| if e > 0.45 { f64::NAN } else { 1.0 },
            &uniform(0.0, 1.0),
            &q,
        )
        .unwrap_err();
        match err {
            Error::NonFinite { index, eps, .. } => {
                assert_eq!(index, 5);
                assert!((eps - 0.5).abs() < 0.05 + 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn nodes_avoid_endpoints() {
        let q = QuadratureConfig::new(5).unwrap();
        let nodes = q.nodes(&uniform(0.0, 1.0));
        assert!(nodes.iter().all(|n| n.eps > 0.0 && n.eps < 1.0));
        assert!(QuadratureConfig::new(2).is_err());
    }

    #[test]
    fn roots() {
        let r = find_root_bracketed(|x| x - 0.5, 0.0, 1.0, 1e-12).unwrap();
        assert!((r - 0.5).abs() < 1e-12);
        let low = find_root_bracketed(|e| e * (1.0 - e) - 0.1, 0.0, 0.5, 1e-14).unwrap();
        let high = find_root_bracketed(|e| e * (1.0 - e) - 0.1, 0.5, 1.0, 1e-14).unwrap();
        let s = 0.6f64.sqrt();
        assert!((low - (1.0 - s) / 2.0).abs() < 1e-12);
        assert!((high - (1.0 + s) / 2.0).abs() < 1e-12);
        assert!(matches!(
            find_root_bracketed(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoBracket { .. })
        ));
    }

    #[test]
    fn golden_section_finds_interior_and_boundary() {
        let (x, _) = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        let (x, _) = golden_section_max(|x| x, 0.0, 1.0, 1e-10);
        assert_eq!(x, 1.0);
    }

    #[test]
    fn doubling_nodes_barely_moves_step_integrals() {
        let d = uniform(0.1, 0.9);
        let f = |e: f64| (1.0 / e).floor().min(20.0);
        let a = integrate(f, &d, &QuadratureConfig::new(2001).unwrap()).unwrap();
        let b = integrate(f, &d, &QuadratureConfig::new(4002).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn constant_integrates_to_one(lo in 0.0f64..0.9, width in 0.01f64..1.0, n in 3usize..3000) {
            let hi = (lo + width).min(1.0);
            prop_assume!(hi > lo);
            let q = QuadratureConfig::new(n).unwrap();
            let v = integrate(|_| 1.0, &uniform(lo, hi), &q).unwrap();
            prop_assert!((v - 1.0).abs() < 1e-6);
        }

        #[test]
        fn tabulated_constant_integrates_to_one(v0 in 0.0f64..5.0, v1 in 0.1f64..5.0, v2 in 0.0f64..5.0) {
            let d = AmbiguityDistribution::tabulated(vec![0.0, 0.4, 1.0], vec![v0, v1, v2]).unwrap();
            let v = integrate(|_| 1.0, &d, &QuadratureConfig::default()).unwrap();
            prop_assert!((v - 1.0).abs() < 1e-6);
        }

        #[test]
        fn root_stays_in_bracket(c in -0.9f64..0.9, lo in -2.0f64..-1.0, hi in 1.0f64..2.0) {
            let x = find_root_bracketed(|x| x - c, lo, hi, 1e-12).unwrap();
            prop_assert!(lo <= x && x <= hi);
            prop_assert!((x - c).abs() < 1e-9);
        }
    }
}
