//! The expectile functional.
//!
//! `e_tau(X)` is the unique minimiser of the asymmetric quadratic score
//! `phi(l) = tau E[((X - l)^+)^2] + (1 - tau) E[((l - X)^+)^2]`. Its first
//! order condition is
//!
//! ```text
//! g(l) = (1 - tau) E[(l - X)^+] - tau E[(X - l)^+] = 0
//! ```
//!
//! `g` is piecewise linear with kinks at the support points, nondecreasing,
//! and changes sign on `[ess_inf, ess_sup]`. [`expectile`] bisects on `g`;
//! [`expectile_argmin`] minimises `phi` directly by golden-section search and
//! serves as an independent cross-check.

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl SolverConfig {
    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !(abs_tol > 0.0) {
            return Err(Error::InvalidSolverConfig(format!(
                "abs_tol must be positive, got {abs_tol}"
            )));
        }
        if max_iter == 0 {
            return Err(Error::InvalidSolverConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(Self { abs_tol, max_iter })
    }

    /// `abs_tol = 1e-12 * max(1, |ess_inf|, |ess_sup|)`, 200 iterations.
    pub fn for_distribution(d: &DiscreteDistribution) -> Self {
        let scale = 1f64.max(d.ess_inf().abs()).max(d.ess_sup().abs());
        Self {
            abs_tol: 1e-12 * scale,
            max_iter: 200,
        }
    }
}

/// Orientation of the first-order condition.
///
/// `Standard` is the condition of the minimisation problem. `Printed` swaps
/// the roles of `tau` and `1 - tau`, i.e. it solves for the upper expectile
/// `e_{1-tau}`; it exists only so audits can demonstrate that the swap is
/// detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FocOrientation {
    #[default]
    Standard,
    Printed,
}

/// `tau E[((X-l)^+)^2] + (1-tau) E[((l-X)^+)^2]`.
pub fn phi_score(d: &DiscreteDistribution, level: RiskLevel, l: f64) -> f64 {
    let tau = level.tau();
    d.outcomes()
        .iter()
        .zip(d.probs())
        .map(|(&v, &p)| {
            let t = v - l;
            if t > 0.0 {
                p * tau * t * t
            } else {
                p * (1.0 - tau) * t * t
            }
        })
        .sum()
}

/// `phi(b) - phi(a)`, evaluated atom by atom so that the difference keeps
/// its relative accuracy when `a` and `b` are close.
fn phi_difference(d: &DiscreteDistribution, tau: f64, a: f64, b: f64) -> f64 {
    let weight = |t: f64| if t > 0.0 { tau } else { 1.0 - tau };
    d.outcomes()
        .iter()
        .zip(d.probs())
        .map(|(&v, &p)| {
            let (ta, tb) = (v - a, v - b);
            let (wa, wb) = (weight(ta), weight(tb));
            if wa == wb {
                // tb^2 - ta^2 = (tb - ta)(tb + ta) = (a - b)(2v - a - b)
                p * wa * (a - b) * (tb + ta)
            } else {
                p * (wb * tb * tb - wa * ta * ta)
            }
        })
        .sum()
}

/// First-order condition `g(l) = (1-tau) E[(l-X)^+] - tau E[(X-l)^+]`.
pub fn foc(d: &DiscreteDistribution, level: RiskLevel, l: f64) -> f64 {
    foc_oriented(d, level, l, FocOrientation::Standard)
}

pub fn foc_oriented(
    d: &DiscreteDistribution,
    level: RiskLevel,
    l: f64,
    orientation: FocOrientation,
) -> f64 {
    let (below, above) = match orientation {
        FocOrientation::Standard => (1.0 - level.tau(), level.tau()),
        FocOrientation::Printed => (level.tau(), 1.0 - level.tau()),
    };
    d.outcomes()
        .iter()
        .zip(d.probs())
        .map(|(&v, &p)| {
            if l > v {
                p * below * (l - v)
            } else {
                -p * above * (v - l)
            }
        })
        .sum()
}

/// `tau E[X^+] - (1-tau) E[X^-]`; `X` is acceptable iff this is `>= 0`.
pub fn acceptance_margin(d: &DiscreteDistribution, level: RiskLevel) -> f64 {
    let tau = level.tau();
    d.outcomes()
        .iter()
        .zip(d.probs())
        .map(|(&v, &p)| {
            if v > 0.0 {
                p * tau * v
            } else {
                p * (1.0 - tau) * v
            }
        })
        .sum()
}

/// Expectile by bisection on the first-order condition.
pub fn expectile(d: &DiscreteDistribution, level: RiskLevel, cfg: &SolverConfig) -> Result<f64> {
    expectile_oriented(d, level, cfg, FocOrientation::Standard)
}

/// Expectile with the default [`SolverConfig`] for `d`.
///
/// The default configuration needs about 45 halvings of the support width,
/// far below its iteration cap, so this cannot fail.
pub fn expectile_value(d: &DiscreteDistribution, level: RiskLevel) -> f64 {
    expectile(d, level, &SolverConfig::for_distribution(d))
        .expect("default solver configuration always converges")
}

pub fn expectile_oriented(
    d: &DiscreteDistribution,
    level: RiskLevel,
    cfg: &SolverConfig,
    orientation: FocOrientation,
) -> Result<f64> {
    if d.is_point_mass() {
        return Ok(d.ess_inf());
    }
    let g = |l: f64| foc_oriented(d, level, l, orientation);
    // invariant: g(lo) < 0 <= g(hi)
    let mut lo = d.ess_inf();
    let mut hi = d.ess_sup();
    if g(lo) >= 0.0 {
        return Ok(lo);
    }
    let mut iter = 0;
    while hi - lo > cfg.abs_tol {
        if iter == cfg.max_iter {
            return Err(Error::MaxIterExceeded {
                abs_tol: cfg.abs_tol,
                max_iter: cfg.max_iter,
            });
        }
        iter += 1;
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(polish(d, level, orientation, lo, hi).unwrap_or(lo + 0.5 * (hi - lo)))
}

/// Solves the linear piece of `g` that contains the root once the bracket
/// is narrow. Returns `None` when no piece overlapping `[lo, hi]` has its
/// zero inside the bracket.
fn polish(
    d: &DiscreteDistribution,
    level: RiskLevel,
    orientation: FocOrientation,
    lo: f64,
    hi: f64,
) -> Option<f64> {
    let (below, above) = match orientation {
        FocOrientation::Standard => (1.0 - level.tau(), level.tau()),
        FocOrientation::Printed => (level.tau(), 1.0 - level.tau()),
    };
    let xs = d.outcomes();
    let ps = d.probs();
    // rounding in the piece's closed form may land a few ulps outside
    let slop = 8.0 * f64::EPSILON * 1f64.max(lo.abs()).max(hi.abs());
    // the piece [xs[k-1], xs[k]] holds lo; atoms 0..k sit at or below it
    let mut k = xs.partition_point(|&v| v <= lo);
    loop {
        let left = if k == 0 { f64::NEG_INFINITY } else { xs[k - 1] };
        if left > hi {
            return None;
        }
        let right = xs.get(k).copied().unwrap_or(f64::INFINITY);
        let (mut num, mut den) = (0.0, 0.0);
        for (i, (&v, &p)) in xs.iter().zip(ps).enumerate() {
            let w = if i < k { below } else { above };
            num += w * p * v;
            den += w * p;
        }
        let root = num / den;
        if root >= left.max(lo) - slop && root <= right.min(hi) + slop {
            return Some(root);
        }
        if k == xs.len() || right > hi {
            return None;
        }
        k += 1;
    }
}

/// Expectile as the minimiser of `phi`, by golden-section search.
pub fn expectile_argmin(
    d: &DiscreteDistribution,
    level: RiskLevel,
    cfg: &SolverConfig,
) -> Result<f64> {
    if d.is_point_mass() {
        return Ok(d.ess_inf());
    }
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let tau = level.tau();
    let mut a = d.ess_inf();
    let mut b = d.ess_sup();
    let mut iter = 0;
    while b - a > cfg.abs_tol {
        if iter == cfg.max_iter {
            return Err(Error::MaxIterExceeded {
                abs_tol: cfg.abs_tol,
                max_iter: cfg.max_iter,
            });
        }
        iter += 1;
        let c = b - INV_PHI * (b - a);
        let e = a + INV_PHI * (b - a);
        if !(a < c && c < e && e < b) {
            break;
        }
        if phi_difference(d, tau, c, e) > 0.0 {
            // phi(e) > phi(c): minimiser left of e
            b = e;
        } else {
            a = c;
        }
    }
    Ok(a + 0.5 * (b - a))
}

/// `(tau, e_tau)` for each level, in input order.
pub fn expectile_curve(d: &DiscreteDistribution, taus: &[RiskLevel]) -> Result<Vec<(f64, f64)>> {
    if taus.is_empty() {
        return Err(Error::OutOfRange {
            name: "taus.len",
            value: 0.0,
            range: "[1, inf)",
        });
    }
    let cfg = SolverConfig::for_distribution(d);
    taus.iter()
        .map(|&level| Ok((level.tau(), expectile(d, level, &cfg)?)))
        .collect()
}
