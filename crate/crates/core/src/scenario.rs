//! Scenario-set view of the expectile.
//!
//! The expectile is the minimum of `E_Q[X]` over densities `h = dQ/dP` with
//! `max h <= beta * min h`. The extreme densities are two-valued,
//! `a 1_A + beta a 1_{A^c}` with `a = 1 / (beta + P[A](1 - beta))`, which
//! gives three independent ways to compute `e_tau`:
//!
//! * enumerate every proper subset `A` ([`expectile_bruteforce_subsets`]);
//! * restrict to decreasing densities on the quantile scale and scan the
//!   cumulative probabilities ([`expectile_breakpoint_scan`]);
//! * for indicators, a closed form ([`expectile_indicator`]).

use crate::dist::{DiscreteDistribution, FiniteProbabilitySpace, RandomVariable, RiskLevel};
use crate::error::{Error, Result};

/// Upper limit on atoms for `2^n` subset enumeration.
pub const MAX_SUBSET_ATOMS: usize = 22;

/// A Radon-Nikodym density on a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDensity {
    space: FiniteProbabilitySpace,
    density: Vec<f64>,
}

impl ScenarioDensity {
    pub fn new(space: FiniteProbabilitySpace, density: Vec<f64>) -> Result<Self> {
        if density.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: density.len(),
                right: space.len(),
            });
        }
        for (index, &h) in density.iter().enumerate() {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::NonPositiveProbability { index, value: h });
            }
        }
        let mass: f64 = density
            .iter()
            .zip(space.atom_probs())
            .map(|(h, p)| h * p)
            .sum();
        if (mass - 1.0).abs() > 1e-12 {
            return Err(Error::BadNormalization { sum: mass });
        }
        Ok(Self { space, density })
    }

    pub fn constant(space: FiniteProbabilitySpace) -> Self {
        let density = vec![1.0; space.len()];
        Self { space, density }
    }

    pub fn space(&self) -> &FiniteProbabilitySpace {
        &self.space
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn min(&self) -> f64 {
        self.density.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.density
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// The set `A` of an extreme density, as atom indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSpec {
    members: Vec<usize>,
}

impl SubsetSpec {
    /// Checks that `members` is a nonempty proper subset of `0..atoms`.
    pub fn new(mut members: Vec<usize>, atoms: usize) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if let Some(&i) = members.iter().find(|&&i| i >= atoms) {
            return Err(Error::OutOfRange {
                name: "atom index",
                value: i as f64,
                range: "[0, atoms)",
            });
        }
        if members.is_empty() || members.len() == atoms {
            return Err(Error::EmptyOrFullSubset);
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// `a = 1 / (beta + P[A](1 - beta))`.
fn extreme_scale(prob_a: f64, beta: f64) -> f64 {
    1.0 / (beta + prob_a * (1.0 - beta))
}

/// The extreme density `a 1_A + beta a 1_{A^c}`.
pub fn extreme_density(
    space: &FiniteProbabilitySpace,
    subset: &SubsetSpec,
    level: RiskLevel,
) -> Result<ScenarioDensity> {
    if subset.members.iter().any(|&i| i >= space.len()) || subset.members.len() >= space.len() {
        return Err(Error::EmptyOrFullSubset);
    }
    let probs = space.atom_probs();
    let prob_a: f64 = subset.members.iter().map(|&i| probs[i]).sum();
    let beta = level.beta();
    let a = extreme_scale(prob_a, beta);
    let density = (0..space.len())
        .map(|i| if subset.contains(i) { a } else { beta * a })
        .collect();
    Ok(ScenarioDensity {
        space: space.clone(),
        density,
    })
}

/// `max h <= beta * min h` (within 1e-12).
pub fn is_in_scenario_set(h: &ScenarioDensity, level: RiskLevel) -> bool {
    h.max() <= level.beta() * h.min() + 1e-12
}

/// `E_Q[X] = sum_i h_i p_i x_i`.
pub fn expectation_under(h: &ScenarioDensity, rv: &RandomVariable) -> Result<f64> {
    if h.space != *rv.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(h.density
        .iter()
        .zip(h.space.atom_probs())
        .zip(rv.values())
        .map(|((h, p), x)| h * p * x)
        .sum())
}

fn enumerate_subsets(
    rv: &RandomVariable,
    level: RiskLevel,
    better: impl Fn(f64, f64) -> bool,
) -> Result<f64> {
    let n = rv.len();
    if n > MAX_SUBSET_ATOMS {
        return Err(Error::TooManyAtoms {
            atoms: n,
            limit: MAX_SUBSET_ATOMS,
        });
    }
    if n == 1 {
        return Ok(rv.values()[0]);
    }
    let beta = level.beta();
    let probs = rv.space().atom_probs();
    let values = rv.values();
    let mut best: Option<f64> = None;
    for mask in 1u32..((1u32 << n) - 1) {
        let (mut prob_a, mut sum_a, mut sum_c) = (0.0, 0.0, 0.0);
        for i in 0..n {
            let pv = probs[i] * values[i];
            if mask & (1 << i) != 0 {
                prob_a += probs[i];
                sum_a += pv;
            } else {
                sum_c += pv;
            }
        }
        let a = extreme_scale(prob_a, beta);
        let value = a * (sum_a + beta * sum_c);
        if best.is_none_or(|b| better(value, b)) {
            best = Some(value);
        }
    }
    Ok(best.expect("n >= 2 has proper subsets"))
}

/// Minimum of `E[X h]` over all extreme densities `h`.
pub fn expectile_bruteforce_subsets(rv: &RandomVariable, level: RiskLevel) -> Result<f64> {
    enumerate_subsets(rv, level, |v, best| v < best)
}

/// Maximum of `E[X h]` over all extreme densities `h`; the support function
/// of the scenario set.
pub fn max_over_extreme_densities(rv: &RandomVariable, level: RiskLevel) -> Result<f64> {
    enumerate_subsets(rv, level, |v, best| v > best)
}

/// Minimiser of the quantile-scale objective.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanMinimum {
    pub value: f64,
    /// Mass of the beta-weighted lower tail.
    pub x: f64,
    /// Number of support points in the lower tail.
    pub lower_atoms: usize,
}

/// Scans `g(x) = (mean + (beta - 1) int_0^x q) / (1 + (beta - 1) x)` over
/// `x in {0, p_1, ..., p_n}`. Between breakpoints `g` is a ratio of affine
/// functions and hence monotone, so the breakpoints contain the minimum.
/// Ties go to the smallest `x`.
pub fn breakpoint_scan(d: &DiscreteDistribution, level: RiskLevel) -> ScanMinimum {
    let mean = d.mean();
    let bm1 = level.beta() - 1.0;
    let mut best = ScanMinimum {
        value: mean,
        x: 0.0,
        lower_atoms: 0,
    };
    let mut lower = 0.0;
    for (i, ((&v, &p), &c)) in d
        .outcomes()
        .iter()
        .zip(d.probs())
        .zip(d.cumulative())
        .enumerate()
    {
        lower += v * p;
        let g = (mean + bm1 * lower) / (1.0 + bm1 * c);
        if g < best.value {
            best = ScanMinimum {
                value: g,
                x: c,
                lower_atoms: i + 1,
            };
        }
    }
    best
}

pub fn expectile_breakpoint_scan(d: &DiscreteDistribution, level: RiskLevel) -> f64 {
    breakpoint_scan(d, level).value
}

/// The extreme density realising a scan minimum on `d.as_random_variable()`:
/// weight `beta a` on the lower tail, `a` elsewhere. Degenerate minima
/// (empty or full tail) give the constant density.
pub fn scan_certificate(d: &DiscreteDistribution, level: RiskLevel) -> Result<ScenarioDensity> {
    let scan = breakpoint_scan(d, level);
    let space = d.as_random_variable().space().clone();
    if scan.lower_atoms == 0 || scan.lower_atoms == d.len() {
        return Ok(ScenarioDensity::constant(space));
    }
    let subset = SubsetSpec::new((scan.lower_atoms..d.len()).collect(), d.len())?;
    extreme_density(&space, &subset, level)
}

fn check_probability(c: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&c) {
        return Err(Error::OutOfRange {
            name: "c",
            value: c,
            range: "[0, 1]",
        });
    }
    Ok(())
}

/// `e_tau(1_C) = P[C] / (beta - (beta - 1) P[C])`.
pub fn expectile_indicator(c: f64, level: RiskLevel) -> Result<f64> {
    check_probability(c)?;
    let beta = level.beta();
    Ok(c / (beta - (beta - 1.0) * c))
}

/// `e_tau(-1_C) = e_tau(1_{C^c}) - 1 = -beta P[C] / (1 + (beta - 1) P[C])`.
pub fn expectile_neg_indicator(c: f64, level: RiskLevel) -> Result<f64> {
    check_probability(c)?;
    let beta = level.beta();
    Ok(-beta * c / (1.0 + (beta - 1.0) * c))
}

/// The variant with denominator `beta - (beta - 1) P[C]`. It violates cash
/// invariance (`-beta` at `P[C] = 1`) and is kept for regression reporting.
pub fn expectile_neg_indicator_printed(c: f64, level: RiskLevel) -> Result<f64> {
    check_probability(c)?;
    let beta = level.beta();
    Ok(-beta * c / (beta - (beta - 1.0) * c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expectile::expectile_value;

    fn lv(tau: f64) -> RiskLevel {
        RiskLevel::new(tau).unwrap()
    }

    #[test]
    fn extreme_density_two_atoms() {
        let space = FiniteProbabilitySpace::uniform(2).unwrap();
        let a = SubsetSpec::new(vec![0], 2).unwrap();
        let h = extreme_density(&space, &a, lv(0.2)).unwrap();
        assert!((h.density()[0] - 0.4).abs() < 1e-15);
        assert!((h.density()[1] - 1.6).abs() < 1e-15);
        assert!(is_in_scenario_set(&h, lv(0.2)));

        let space = FiniteProbabilitySpace::new(vec![0.75, 0.25]).unwrap();
        let h = extreme_density(&space, &a, lv(0.2)).unwrap();
        assert!((h.density()[0] - 1.0 / 1.75).abs() < 1e-15);
        assert!((h.density()[1] - 4.0 / 1.75).abs() < 1e-15);
        // second expression of the scale factor
        assert!((h.density()[0] - 1.0 / (1.0 + 3.0 * 0.25)).abs() < 1e-12);
    }

    #[test]
    fn subset_must_be_proper() {
        assert_eq!(
            SubsetSpec::new(vec![0, 1], 2),
            Err(Error::EmptyOrFullSubset)
        );
        assert_eq!(SubsetSpec::new(vec![], 2), Err(Error::EmptyOrFullSubset));
        assert!(SubsetSpec::new(vec![5], 2).is_err());
    }

    #[test]
    fn scenario_membership() {
        let space = FiniteProbabilitySpace::uniform(2).unwrap();
        assert!(is_in_scenario_set(
            &ScenarioDensity::constant(space.clone()),
            lv(0.2)
        ));
        let h = ScenarioDensity::new(space, vec![0.1, 1.9]).unwrap();
        assert!(!is_in_scenario_set(&h, lv(0.2)));
    }

    #[test]
    fn density_must_normalize() {
        let space = FiniteProbabilitySpace::uniform(2).unwrap();
        assert!(matches!(
            ScenarioDensity::new(space.clone(), vec![0.5, 0.5]),
            Err(Error::BadNormalization { .. })
        ));
        assert!(ScenarioDensity::new(space, vec![0.0, 2.0]).is_err());
    }

    #[test]
    fn expectation_under_values() {
        let space = FiniteProbabilitySpace::uniform(2).unwrap();
        let rv = RandomVariable::new(space.clone(), vec![0.0, 1.0]).unwrap();
        let h = ScenarioDensity::new(space.clone(), vec![0.4, 1.6]).unwrap();
        assert!((expectation_under(&h, &rv).unwrap() - 0.8).abs() < 1e-15);
        let h = ScenarioDensity::new(space.clone(), vec![1.6, 0.4]).unwrap();
        assert!((expectation_under(&h, &rv).unwrap() - 0.2).abs() < 1e-15);
        let h = ScenarioDensity::constant(space);
        assert!((expectation_under(&h, &rv).unwrap() - 0.5).abs() < 1e-15);

        let other = RandomVariable::constant(FiniteProbabilitySpace::uniform(3).unwrap(), 1.0);
        assert_eq!(expectation_under(&h, &other), Err(Error::SpaceMismatch));
    }

    #[test]
    fn bruteforce_values() {
        let rv = RandomVariable::new(FiniteProbabilitySpace::uniform(2).unwrap(), vec![0.0, 1.0])
            .unwrap();
        assert!((expectile_bruteforce_subsets(&rv, lv(0.2)).unwrap() - 0.2).abs() < 1e-15);
        let rv = RandomVariable::constant(FiniteProbabilitySpace::uniform(4).unwrap(), 2.5);
        assert!((expectile_bruteforce_subsets(&rv, lv(0.3)).unwrap() - 2.5).abs() < 1e-14);
        let rv = RandomVariable::new(
            FiniteProbabilitySpace::uniform(3).unwrap(),
            vec![0.0, 1.0, 2.0],
        )
        .unwrap();
        assert!((expectile_bruteforce_subsets(&rv, lv(0.2)).unwrap() - 0.5).abs() < 1e-15);

        let big = RandomVariable::constant(FiniteProbabilitySpace::uniform(23).unwrap(), 0.0);
        assert!(matches!(
            expectile_bruteforce_subsets(&big, lv(0.2)),
            Err(Error::TooManyAtoms { atoms: 23, .. })
        ));
    }

    #[test]
    fn scan_values() {
        let u3 = DiscreteDistribution::from_atoms(&[0.0, 1.0, 2.0], &[1.0 / 3.0; 3]).unwrap();
        let scan = breakpoint_scan(&u3, lv(0.2));
        assert!((scan.value - 0.5).abs() < 1e-15);
        assert_eq!(scan.lower_atoms, 1);
        assert_eq!(
            expectile_breakpoint_scan(&DiscreteDistribution::point_mass(3.0), lv(0.2)),
            3.0
        );
        let b = DiscreteDistribution::bernoulli(0.5).unwrap();
        assert!((expectile_breakpoint_scan(&b, lv(0.2)) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn scan_breakpoints_beat_dense_grid() {
        // oracle: evaluate the objective on a fine x-grid
        let d = DiscreteDistribution::from_atoms(
            &[-1.3, 0.2, 0.9, 2.4, 3.0],
            &[0.1, 0.3, 0.25, 0.2, 0.15],
        )
        .unwrap();
        for tau in [0.05, 0.2, 0.4] {
            let level = lv(tau);
            let bm1 = level.beta() - 1.0;
            let best = expectile_breakpoint_scan(&d, level);
            for k in 0..=10_000 {
                let x = k as f64 / 10_000.0;
                let g = (d.mean() + bm1 * d.lower_integral(x)) / (1.0 + bm1 * x);
                assert!(g >= best - 1e-12, "x={x} g={g} best={best}");
            }
        }
    }

    #[test]
    fn certificate_reproduces_scan() {
        let d =
            DiscreteDistribution::from_atoms(&[0.0, 1.0, 2.0, 5.0], &[0.1, 0.2, 0.3, 0.4]).unwrap();
        let level = lv(0.2);
        let h = scan_certificate(&d, level).unwrap();
        assert!(is_in_scenario_set(&h, level));
        let v = expectation_under(&h, &d.as_random_variable()).unwrap();
        assert!((v - expectile_breakpoint_scan(&d, level)).abs() < 1e-12);
    }

    #[test]
    fn indicator_closed_forms() {
        assert!((expectile_indicator(0.5, lv(0.2)).unwrap() - 0.2).abs() < 1e-15);
        assert_eq!(expectile_indicator(1.0, lv(0.1)).unwrap(), 1.0);
        assert_eq!(expectile_indicator(0.0, lv(0.1)).unwrap(), 0.0);
        assert!((expectile_indicator(0.75, lv(0.2)).unwrap() - 0.75 / 1.75).abs() < 1e-15);
        assert!(expectile_indicator(1.1, lv(0.2)).is_err());

        assert_eq!(expectile_neg_indicator(1.0, lv(0.3)).unwrap(), -1.0);
        assert_eq!(expectile_neg_indicator(0.0, lv(0.3)).unwrap(), 0.0);
        assert!((expectile_neg_indicator(0.25, lv(0.2)).unwrap() + 1.0 / 1.75).abs() < 1e-15);
        assert!((expectile_neg_indicator(0.5, lv(0.2)).unwrap() + 0.8).abs() < 1e-15);
        assert!((expectile_neg_indicator_printed(0.5, lv(0.2)).unwrap() + 0.8).abs() < 1e-15);
        assert!(expectile_neg_indicator(-0.1, lv(0.2)).is_err());
    }

    #[test]
    fn neg_indicator_matches_solver() {
        let level = lv(0.2);
        let d = DiscreteDistribution::from_atoms(&[-1.0, 0.0], &[0.25, 0.75]).unwrap();
        let solved = expectile_value(&d, level);
        assert!((solved - expectile_neg_indicator(0.25, level).unwrap()).abs() < 1e-12);
        assert!((solved - expectile_neg_indicator_printed(0.25, level).unwrap()).abs() > 0.2);
    }
}
