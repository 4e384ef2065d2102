//! Distortions and Choquet integrals.
//!
//! A distortion is a convex `f: [0,1] -> [0,1]` with `f(0) = 0`, `f(1) = 1`.
//! On a finite law with ascending outcomes `v_1 < ... < v_n` and cumulative
//! probabilities `0 = p_0 < p_1 < ... < p_n = 1` the Choquet value is
//!
//! ```text
//! sum_i v_i (f(1 - p_{i-1}) - f(1 - p_i))
//! ```
//!
//! which is the quantile form `int_0^1 q(u) f'(1 - u) du` evaluated exactly.
//! Only the `n + 1` values `f(1 - p_i)` are ever queried, so closed-form and
//! piecewise-linear distortions go through the same code path.

use std::fmt;
use std::sync::Arc;

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::error::{Error, Result};
use crate::expectile::expectile_value;

/// Grid size for the convexity check.
pub const CONVEXITY_GRID: usize = 1001;
pub const CONVEXITY_TOL: f64 = 1e-10;

type EvalFn = dyn Fn(f64) -> f64 + Send + Sync;

#[derive(Clone)]
pub struct Distortion {
    label: String,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for Distortion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Distortion")
            .field("label", &self.label)
            .finish()
    }
}

impl Distortion {
    /// Validates endpoints and grid convexity.
    pub fn new(
        label: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        let d = Self {
            label: label.into(),
            eval: Arc::new(eval),
        };
        d.validate()?;
        Ok(d)
    }

    fn invalid(&self, reason: String) -> Error {
        Error::InvalidDistortion {
            label: self.label.clone(),
            reason,
        }
    }

    fn validate(&self) -> Result<()> {
        let (f0, f1) = (self.eval(0.0), self.eval(1.0));
        if f0.abs() > CONVEXITY_TOL || (f1 - 1.0).abs() > CONVEXITY_TOL {
            return Err(self.invalid(format!("f(0) = {f0}, f(1) = {f1}")));
        }
        if !is_grid_convex(|y| self.eval(y)) {
            return Err(self.invalid("not convex on the check grid".into()));
        }
        Ok(())
    }

    pub fn identity() -> Self {
        Self {
            label: "identity".into(),
            eval: Arc::new(|y| y),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.eval)(y)
    }
}

/// Second differences on an equispaced grid are `>= -1e-10`.
pub fn is_grid_convex(f: impl Fn(f64) -> f64) -> bool {
    let n = CONVEXITY_GRID - 1;
    let vals: Vec<f64> = (0..=n).map(|k| f(k as f64 / n as f64)).collect();
    vals.windows(3)
        .all(|w| w[2] - 2.0 * w[1] + w[0] >= -CONVEXITY_TOL)
}

/// `f(x) = x / (beta - (beta - 1) x)`, the distortion with `f(P[C]) = e_tau(1_C)`.
pub fn f_tau(level: RiskLevel) -> Distortion {
    let beta = level.beta();
    Distortion {
        label: format!("f_tau(beta={beta})"),
        eval: Arc::new(move |x| x / (beta - (beta - 1.0) * x)),
    }
}

/// `f'(x) = beta / (beta - (beta - 1) x)^2`; `1/beta` at 0 and `beta` at 1.
pub fn f_tau_derivative(level: RiskLevel, x: f64) -> f64 {
    let beta = level.beta();
    let den = beta - (beta - 1.0) * x;
    beta / (den * den)
}

/// `f(y) = max(y - (1 - alpha), 0) / alpha`: the tail expectation `u_alpha`.
pub fn cvar_distortion(alpha: f64) -> Result<Distortion> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::OutOfRange {
            name: "alpha",
            value: alpha,
            range: "(0, 1]",
        });
    }
    Ok(Distortion {
        label: format!("cvar(alpha={alpha})"),
        eval: Arc::new(move |y| (y - (1.0 - alpha)).max(0.0) / alpha),
    })
}

/// Per-outcome Choquet weights `f(1 - p_{i-1}) - f(1 - p_i)`.
pub fn choquet_weights(d: &DiscreteDistribution, f: &Distortion) -> Vec<f64> {
    let mut prev = f.eval(1.0);
    d.cumulative()
        .iter()
        .map(|&c| {
            let next = f.eval(1.0 - c);
            let w = prev - next;
            prev = next;
            w
        })
        .collect()
}

pub fn choquet_value(d: &DiscreteDistribution, f: &Distortion) -> f64 {
    choquet_weights(d, f)
        .iter()
        .zip(d.outcomes())
        .map(|(w, v)| w * v)
        .sum()
}

/// The comonotone minorant `v` of `e_tau`.
pub fn comonotone_utility_v(d: &DiscreteDistribution, level: RiskLevel) -> f64 {
    choquet_value(d, &f_tau(level))
}

/// `sigma` with `(1 - sigma) / sigma = beta^2`.
pub fn sigma_of_tau(level: RiskLevel) -> RiskLevel {
    let beta = level.beta();
    RiskLevel::from_beta(beta * beta).expect("beta^2 >= 1")
}

/// `e_sigma <= v <= e_tau` together with the tail-expectation bound
/// `u_{1/beta} <= e_tau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sandwich {
    pub e_tau: f64,
    pub v: f64,
    pub e_sigma: f64,
    pub cvar_lb: f64,
}

impl Sandwich {
    /// Smallest slack across the three inequalities; negative means violated.
    pub fn worst_slack(&self) -> f64 {
        (self.e_tau - self.v)
            .min(self.v - self.e_sigma)
            .min(self.e_tau - self.cvar_lb)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.worst_slack() >= -tol
    }
}

pub fn sandwich_report(d: &DiscreteDistribution, level: RiskLevel) -> Sandwich {
    let cvar_lb = d
        .tail_expectation(1.0 / level.beta())
        .expect("1/beta lies in (0, 1]");
    Sandwich {
        e_tau: expectile_value(d, level),
        v: comonotone_utility_v(d, level),
        e_sigma: expectile_value(d, sigma_of_tau(level)),
        cvar_lb,
    }
}
