//! Kusuoka representation of the expectile.
//!
//! `e_tau(X) = inf { int u_alpha(X) nu(d alpha) }` over probabilities `nu` on
//! `(0, 1]` with `int (1/alpha) nu(d alpha) <= beta nu({1})`. Each mixture of
//! tail expectations is itself a Choquet integral for the piecewise-linear
//! distortion `f(y) = int_{[1-y, 1]} (alpha + y - 1) / alpha nu(d alpha)`.
//!
//! The admissible set is a polytope in the weights; its extreme points are
//! `delta_1` and two-point measures `lambda delta_alpha + (1 - lambda) delta_1`
//! with the constraint active. The mixture value of such a measure equals the
//! quantile-scale objective `g(alpha)`, so scanning `alpha` over the
//! cumulative probabilities recovers `e_tau`.

use std::sync::Arc;

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::distortion::{is_grid_convex, Distortion};
use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// A finite probability measure on `(0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct KusuokaMeasure {
    /// `(alpha, weight)` with `alpha < 1`, sorted by alpha, weights positive.
    inner: Vec<(f64, f64)>,
    /// `nu({1})`, possibly zero.
    at_one: f64,
}

impl KusuokaMeasure {
    /// Merges repeated alphas; rejects alphas outside `(0, 1]`, negative
    /// weights and weights not summing to 1 within 1e-12.
    pub fn new(atoms: &[(f64, f64)]) -> Result<Self> {
        let mut inner: Vec<(f64, f64)> = Vec::new();
        let mut at_one = 0.0;
        for &(alpha, weight) in atoms {
            if !(alpha > 0.0 && alpha <= 1.0) {
                return Err(Error::InvalidMeasure(format!(
                    "alpha {alpha} outside (0, 1]"
                )));
            }
            if !(weight >= 0.0) || !weight.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "weight {weight} is negative"
                )));
            }
            if weight == 0.0 {
                continue;
            }
            if alpha == 1.0 {
                at_one += weight;
            } else {
                inner.push((alpha, weight));
            }
        }
        inner.sort_by(|a, b| a.0.total_cmp(&b.0));
        inner.dedup_by(|next, kept| {
            if next.0 == kept.0 {
                kept.1 += next.1;
                true
            } else {
                false
            }
        });
        let total = at_one + inner.iter().map(|a| a.1).sum::<f64>();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        Ok(Self { inner, at_one })
    }

    pub fn dirac(alpha: f64) -> Result<Self> {
        Self::new(&[(alpha, 1.0)])
    }

    /// Atoms with `alpha < 1`, ascending.
    pub fn inner_atoms(&self) -> &[(f64, f64)] {
        &self.inner
    }

    pub fn mass_at_one(&self) -> f64 {
        self.at_one
    }

    /// All atoms including `alpha = 1` when it carries mass.
    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let one = (self.at_one > 0.0).then_some((1.0, self.at_one));
        self.inner.iter().copied().chain(one)
    }

    /// `int (1/alpha) nu(d alpha)`.
    pub fn inverse_moment(&self) -> f64 {
        self.inner.iter().map(|(a, w)| w / a).sum::<f64>() + self.at_one
    }
}

/// `int (1/alpha) nu(d alpha) <= beta nu({1})` (within 1e-12).
pub fn is_admissible(nu: &KusuokaMeasure, level: RiskLevel) -> bool {
    nu.inverse_moment() <= level.beta() * nu.at_one + 1e-12
}

/// `sum_i w_i u_{alpha_i}(d)`.
pub fn mixture_value(d: &DiscreteDistribution, nu: &KusuokaMeasure) -> f64 {
    nu.atoms()
        .map(|(alpha, w)| w * d.tail_expectation(alpha).expect("alpha in (0, 1]"))
        .sum()
}

/// The distortion whose Choquet integral equals [`mixture_value`].
pub fn distortion_from_measure(nu: &KusuokaMeasure) -> Distortion {
    let atoms: Vec<(f64, f64)> = nu.atoms().collect();
    let label = format!("kusuoka({} atoms)", atoms.len());
    let atoms = Arc::new(atoms);
    let f = move |y: f64| {
        atoms
            .iter()
            .filter(|(alpha, _)| *alpha >= 1.0 - y)
            .map(|(alpha, w)| w * (alpha + y - 1.0) / alpha)
            .sum::<f64>()
    };
    Distortion::new(label, f).expect("mixtures of tail expectations are convex distortions")
}

/// `lambda delta_alpha + (1 - lambda) delta_1` with
/// `lambda = (beta - 1) alpha / (1 + (beta - 1) alpha)`, the admissible
/// two-point measure with the constraint active.
pub fn two_point_measure(alpha: f64, level: RiskLevel) -> Result<KusuokaMeasure> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, 1)",
        });
    }
    let bm1 = level.beta() - 1.0;
    let lambda = bm1 * alpha / (1.0 + bm1 * alpha);
    let inner = if lambda > 0.0 {
        vec![(alpha, lambda)]
    } else {
        Vec::new()
    };
    Ok(KusuokaMeasure {
        inner,
        at_one: 1.0 - lambda,
    })
}

/// Minimiser over the two-point family.
#[derive(Debug, Clone, PartialEq)]
pub struct KusuokaMinimum {
    pub value: f64,
    pub measure: KusuokaMeasure,
}

/// Scans `alpha` over the cumulative probabilities below 1 plus `delta_1`.
/// Ties go to the smallest alpha.
pub fn kusuoka_minimum(d: &DiscreteDistribution, level: RiskLevel) -> KusuokaMinimum {
    let mut best = KusuokaMinimum {
        value: d.mean(),
        measure: KusuokaMeasure {
            inner: Vec::new(),
            at_one: 1.0,
        },
    };
    let mut best_alpha = 1.0;
    for &alpha in d.cumulative().iter().filter(|&&c| c < 1.0) {
        let nu = two_point_measure(alpha, level).expect("alpha in (0, 1)");
        let value = mixture_value(d, &nu);
        if value < best.value || (value == best.value && alpha < best_alpha) {
            best = KusuokaMinimum { value, measure: nu };
            best_alpha = alpha;
        }
    }
    best
}

pub fn expectile_via_kusuoka(d: &DiscreteDistribution, level: RiskLevel) -> f64 {
    kusuoka_minimum(d, level).value
}

/// Step for the one-sided difference quotients at the endpoints.
pub const ENDPOINT_STEP: f64 = 1e-7;
pub const ENDPOINT_TOL: f64 = 1e-6;

/// Endpoint slopes `(f'(0+), f'(1-))` by one-sided difference quotients.
pub fn endpoint_slopes(f: &Distortion) -> (f64, f64) {
    let h = ENDPOINT_STEP;
    let right0 = (f.eval(h) - f.eval(0.0)) / h;
    let left1 = (f.eval(1.0) - f.eval(1.0 - h)) / h;
    (right0, left1)
}

/// Membership in `F_beta`: a convex distortion with `f'(1) <= beta f'(0)`.
pub fn in_f_beta(f: &Distortion, level: RiskLevel) -> bool {
    if !is_grid_convex(|y| f.eval(y)) {
        return false;
    }
    let (d0, d1) = endpoint_slopes(f);
    d1 <= level.beta() * d0 + ENDPOINT_TOL
}
