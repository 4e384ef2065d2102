//! `d_1` between laws on the line and Lipschitz certification of `e_tau`.
//!
//! On the line the optimal coupling is the comonotone one, so
//! `d_1(mu, nu) = int_0^1 |q_mu(u) - q_nu(u)| du`, integrated exactly over
//! the merged cumulative-probability grid. `e_tau` is `beta`-Lipschitz for
//! `d_1`, and `(beta - 1)/2`-Lipschitz between laws with equal means.

use crate::dist::{DiscreteDistribution, FiniteProbabilitySpace, RandomVariable, RiskLevel};
use crate::error::{Error, Result};
use crate::expectile::expectile_value;

/// Means closer than this select the equal-mean constant.
pub const EQUAL_MEAN_TOL: f64 = 1e-9;
pub const LIPSCHITZ_SLACK: f64 = 1e-9;

/// Calls `visit(len, q_mu, q_nu)` for every nonempty cell of the merged grid.
fn merged_cells(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    mut visit: impl FnMut(f64, f64, f64),
) {
    let (cm, cn) = (mu.cumulative(), nu.cumulative());
    let (xm, xn) = (mu.outcomes(), nu.outcomes());
    let (mut i, mut j) = (0, 0);
    let mut prev = 0.0;
    while i < cm.len() && j < cn.len() {
        let next = cm[i].min(cn[j]);
        if next > prev {
            visit(next - prev, xm[i], xn[j]);
            prev = next;
        }
        if cm[i] == next {
            i += 1;
        }
        if cn[j] == next {
            j += 1;
        }
    }
}

pub fn d1(mu: &DiscreteDistribution, nu: &DiscreteDistribution) -> f64 {
    let mut acc = 0.0;
    merged_cells(mu, nu, |len, a, b| acc += len * (a - b).abs());
    acc
}

/// The comonotone coupling realised on a common finite space.
pub fn comonotone_coupling(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
) -> (RandomVariable, RandomVariable) {
    let (mut probs, mut xs, mut ys) = (Vec::new(), Vec::new(), Vec::new());
    merged_cells(mu, nu, |len, a, b| {
        probs.push(len);
        xs.push(a);
        ys.push(b);
    });
    let space = FiniteProbabilitySpace::new(probs).expect("cell lengths partition (0, 1]");
    (
        RandomVariable::new(space.clone(), xs).expect("one value per cell"),
        RandomVariable::new(space, ys).expect("one value per cell"),
    )
}

/// Which Lipschitz constant an audit asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LipschitzBound {
    /// `(beta - 1)/2` when the means agree within 1e-9, otherwise `beta`.
    #[default]
    Auto,
    /// Always `beta`.
    Beta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzAudit {
    pub d1: f64,
    pub delta_e: f64,
    /// `|delta_e| / d1`, or 0 when `d1 = 0`.
    pub ratio: f64,
    pub bound: f64,
    pub equal_means: bool,
}

impl LipschitzAudit {
    /// `bound * d1 + slack - |delta_e|`.
    pub fn slack(&self) -> f64 {
        self.bound * self.d1 + LIPSCHITZ_SLACK - self.delta_e.abs()
    }
}

pub fn lipschitz_audit(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    level: RiskLevel,
) -> Result<LipschitzAudit> {
    lipschitz_audit_with(mu, nu, level, LipschitzBound::Auto)
}

pub fn lipschitz_audit_with(
    mu: &DiscreteDistribution,
    nu: &DiscreteDistribution,
    level: RiskLevel,
    mode: LipschitzBound,
) -> Result<LipschitzAudit> {
    let dist = d1(mu, nu);
    let delta_e = expectile_value(mu, level) - expectile_value(nu, level);
    let equal_means = (mu.mean() - nu.mean()).abs() <= EQUAL_MEAN_TOL;
    let beta = level.beta();
    let bound = match mode {
        LipschitzBound::Auto if equal_means => (beta - 1.0) / 2.0,
        _ => beta,
    };
    let ratio = if dist > 0.0 {
        delta_e.abs() / dist
    } else {
        0.0
    };
    let audit = LipschitzAudit {
        d1: dist,
        delta_e,
        ratio,
        bound,
        equal_means,
    };
    if audit.slack() < 0.0 {
        return Err(Error::BoundViolated {
            delta_e,
            d1: dist,
            bound,
        });
    }
    Ok(audit)
}

/// Near-extremal pairs for both constants.
///
/// The first pair is `-1_C` against `0` with `P[C] = eps`, with ratio
/// `beta / (1 + (beta - 1) eps)`. The second is the centered indicator
/// `1_C - c` against `0` with `c = 1 - eps`, with ratio
/// `(beta - 1) / (2 (1 + (beta - 1) eps))`.
pub fn tightness_witness(level: RiskLevel, eps: f64) -> Result<(LipschitzAudit, LipschitzAudit)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            name: "eps",
            value: eps,
            range: "(0, 1)",
        });
    }
    let zero = DiscreteDistribution::point_mass(0.0);
    let neg = DiscreteDistribution::from_atoms(&[-1.0, 0.0], &[eps, 1.0 - eps])?;
    let first = lipschitz_audit_with(&neg, &zero, level, LipschitzBound::Beta)?;
    let c = 1.0 - eps;
    let centered = DiscreteDistribution::from_atoms(&[-c, 1.0 - c], &[1.0 - c, c])?;
    let second = lipschitz_audit_with(&centered, &zero, level, LipschitzBound::Auto)?;
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lv(tau: f64) -> RiskLevel {
        RiskLevel::new(tau).unwrap()
    }

    #[test]
    fn d1_values() {
        let b = DiscreteDistribution::bernoulli(0.5).unwrap();
        let z = DiscreteDistribution::point_mass(0.0);
        assert!((d1(&b, &z) - 0.5).abs() < 1e-15);
        assert_eq!(d1(&b, &b), 0.0);
        let d = DiscreteDistribution::from_atoms(&[0.0, 1.0, 2.0], &[0.2, 0.3, 0.5]).unwrap();
        assert!((d1(&d, &d.shift(-1.7)) - 1.7).abs() < 1e-14);
        assert!((d1(&d.shift(0.3), &d) - 0.3).abs() < 1e-14);
    }

    #[test]
    fn coupling_has_the_right_marginals() {
        let mu = DiscreteDistribution::from_atoms(&[0.0, 1.0], &[0.3, 0.7]).unwrap();
        let nu = DiscreteDistribution::from_atoms(&[-1.0, 2.0, 4.0], &[0.5, 0.25, 0.25]).unwrap();
        let (x, y) = comonotone_coupling(&mu, &nu);
        assert_eq!(x.law().outcomes(), mu.outcomes());
        assert_eq!(y.law().outcomes(), nu.outcomes());
        for (a, b) in y.law().probs().iter().zip(nu.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(x.space().len(), 4);
    }

    #[test]
    fn audit_values() {
        let level = lv(0.2);
        let neg = DiscreteDistribution::from_atoms(&[-1.0, 0.0], &[0.01, 0.99]).unwrap();
        let zero = DiscreteDistribution::point_mass(0.0);
        let a = lipschitz_audit(&neg, &zero, level).unwrap();
        assert!(!a.equal_means);
        assert_eq!(a.bound, 4.0);
        assert!((a.d1 - 0.01).abs() < 1e-15);
        assert!((a.ratio - 0.04 / 1.03 / 0.01).abs() < 1e-9);

        let a = lipschitz_audit(&neg, &neg, level).unwrap();
        assert_eq!((a.delta_e, a.d1, a.ratio), (0.0, 0.0, 0.0));

        let c = 0.99;
        let centered = DiscreteDistribution::from_atoms(&[-c, 1.0 - c], &[1.0 - c, c]).unwrap();
        let a = lipschitz_audit(&centered, &zero, level).unwrap();
        assert!(a.equal_means);
        assert_eq!(a.bound, 1.5);
        assert!((a.d1 - 2.0 * 0.99 * 0.01).abs() < 1e-15);
        let expected = (0.99 / 1.03 - 0.99f64).abs() / (2.0 * 0.99 * 0.01);
        assert!((a.ratio - expected).abs() < 1e-9);
        assert!((a.ratio - 1.4563).abs() < 1e-4);
    }

    #[test]
    fn witnesses() {
        let (a, b) = tightness_witness(lv(0.2), 0.01).unwrap();
        assert!(a.ratio >= 3.88 && a.ratio <= 4.0);
        assert!(b.ratio >= 1.45 && b.ratio <= 1.5);

        let (a, _) = tightness_witness(lv(0.2), 0.5).unwrap();
        assert!((a.ratio - 1.6).abs() < 1e-12);

        let (a, b) = tightness_witness(lv(0.5), 0.1).unwrap();
        assert!(a.ratio <= 1.0 + 1e-12);
        assert_eq!(b.bound, 0.0);
        assert!(b.delta_e.abs() < 1e-12);

        assert!(tightness_witness(lv(0.2), 0.0).is_err());
        assert!(tightness_witness(lv(0.2), 1.0).is_err());
    }
}
