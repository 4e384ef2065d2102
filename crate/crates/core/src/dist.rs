//! Finite probability spaces, random variables and their laws.
//!
//! Every risk functional in this crate consumes a [`DiscreteDistribution`]:
//! a strictly ascending support with strictly positive probabilities. The
//! quantile convention is the left-continuous inf-quantile
//! `q(u) = inf { x : F(x) >= u }`, so all integrals of `q` over `(0, 1]`
//! reduce to exact finite sums over the cumulative probabilities.

use crate::error::{Error, Result};

/// Accepted drift of input probabilities away from 1 before renormalization.
pub const INPUT_NORMALIZATION_TOL: f64 = 1e-9;

fn normalize(probs: &[f64]) -> Result<Vec<f64>> {
    for (index, &p) in probs.iter().enumerate() {
        if !(p > 0.0) || !p.is_finite() {
            return Err(Error::NonPositiveProbability { index, value: p });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > INPUT_NORMALIZATION_TOL {
        return Err(Error::BadNormalization { sum });
    }
    Ok(probs.iter().map(|p| p / sum).collect())
}

/// A finite probability space: atoms carrying strictly positive mass.
///
/// Atoms have a fixed linear order (their index), which is what
/// [`comonotone_pair`] uses as the common source of randomness.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbabilitySpace {
    probs: Vec<f64>,
}

impl FiniteProbabilitySpace {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptySample);
        }
        Ok(Self {
            probs: normalize(&probs)?,
        })
    }

    pub fn uniform(atoms: usize) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::EmptySample);
        }
        Ok(Self {
            probs: vec![1.0 / atoms as f64; atoms],
        })
    }

    pub fn atom_probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Splits atom `index` into two adjacent atoms of half its mass.
    pub fn split_atom(&self, index: usize) -> Self {
        let mut probs = self.probs.clone();
        let half = probs[index] / 2.0;
        probs[index] = half;
        probs.insert(index + 1, half);
        Self { probs }
    }
}

/// A real-valued random variable on a finite space, one value per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomVariable {
    space: FiniteProbabilitySpace,
    values: Vec<f64>,
}

impl RandomVariable {
    pub fn new(space: FiniteProbabilitySpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: space.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        Ok(Self { space, values })
    }

    pub fn constant(space: FiniteProbabilitySpace, value: f64) -> Self {
        let values = vec![value; space.len()];
        Self { space, values }
    }

    pub fn space(&self) -> &FiniteProbabilitySpace {
        &self.space
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn law(&self) -> DiscreteDistribution {
        law_of(self)
    }

    /// Pointwise sum; both variables must live on the same space.
    pub fn add(&self, other: &RandomVariable) -> Result<RandomVariable> {
        if self.space != other.space {
            return Err(Error::SpaceMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            space: self.space.clone(),
            values,
        })
    }

    pub fn shift(&self, a: f64) -> RandomVariable {
        self.map(|v| v + a)
    }

    pub fn scale(&self, lambda: f64) -> Result<RandomVariable> {
        if lambda < 0.0 {
            return Err(Error::NegativeScale(lambda));
        }
        Ok(self.map(|v| lambda * v))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> RandomVariable {
        Self {
            space: self.space.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Same law on a finer space: atom `index` is split into two halves.
    pub fn split_atom(&self, index: usize) -> RandomVariable {
        let mut values = self.values.clone();
        values.insert(index + 1, values[index]);
        Self {
            space: self.space.split_atom(index),
            values,
        }
    }
}

/// A finite law on the real line in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    outcomes: Vec<f64>,
    probs: Vec<f64>,
    // cumulative[i] = P[X <= outcomes[i]]; last entry pinned to exactly 1.
    cumulative: Vec<f64>,
}

impl DiscreteDistribution {
    /// Builds a law from (value, probability) atoms. Duplicated values are
    /// merged and the support is sorted ascending.
    pub fn from_atoms(values: &[f64], probs: &[f64]) -> Result<Self> {
        if values.len() != probs.len() {
            return Err(Error::LengthMismatch {
                left: values.len(),
                right: probs.len(),
            });
        }
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        let probs = normalize(probs)?;
        Ok(Self::canonical(values.iter().copied().zip(probs).collect()))
    }

    /// Empirical law: weight `1/n` per sample.
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { index });
        }
        let w = 1.0 / samples.len() as f64;
        Ok(Self::canonical(samples.iter().map(|&s| (s, w)).collect()))
    }

    pub fn point_mass(value: f64) -> Self {
        Self {
            outcomes: vec![value],
            probs: vec![1.0],
            cumulative: vec![1.0],
        }
    }

    /// Law of `1_C` with `P[C] = c`, for `c` in `[0, 1]`.
    pub fn bernoulli(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::OutOfRange {
                name: "c",
                value: c,
                range: "[0, 1]",
            });
        }
        if c == 0.0 {
            return Ok(Self::point_mass(0.0));
        }
        if c == 1.0 {
            return Ok(Self::point_mass(1.0));
        }
        Ok(Self::canonical(vec![(0.0, 1.0 - c), (1.0, c)]))
    }

    fn canonical(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut outcomes: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut probs: Vec<f64> = Vec::with_capacity(atoms.len());
        for (v, p) in atoms {
            // -0.0 and 0.0 are the same outcome
            match outcomes.last() {
                Some(&last) if last == v => *probs.last_mut().unwrap() += p,
                _ => {
                    outcomes.push(if v == 0.0 { 0.0 } else { v });
                    probs.push(p);
                }
            }
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Self {
            outcomes,
            probs,
            cumulative,
        }
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Cumulative probabilities `p_1 < ... < p_n = 1`.
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Number of support points.
    pub fn len(&self) -> usize {
        self.outcomes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcomes.is_empty()
    }

    pub fn is_point_mass(&self) -> bool {
        self.outcomes.len() == 1
    }

    pub fn mean(&self) -> f64 {
        self.outcomes
            .iter()
            .zip(&self.probs)
            .map(|(v, p)| v * p)
            .sum()
    }

    pub fn ess_inf(&self) -> f64 {
        self.outcomes[0]
    }

    pub fn ess_sup(&self) -> f64 {
        self.outcomes[self.outcomes.len() - 1]
    }

    /// Right-continuous distribution function `F(x) = P[X <= x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.outcomes.partition_point(|&v| v <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Inf-quantile `inf { x : F(x) >= u }` for `u` in `(0, 1]`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::OutOfRange {
                name: "u",
                value: u,
                range: "(0, 1]",
            });
        }
        let k = self.cumulative.partition_point(|&c| c < u);
        Ok(self.outcomes[k.min(self.outcomes.len() - 1)])
    }

    /// `integral_0^alpha q(u) du`, exact for the piecewise-constant quantile.
    pub fn lower_integral(&self, alpha: f64) -> f64 {
        let mut acc = 0.0;
        let mut prev = 0.0;
        for (v, &c) in self.outcomes.iter().zip(&self.cumulative) {
            if prev >= alpha {
                break;
            }
            acc += v * (c.min(alpha) - prev);
            prev = c;
        }
        acc
    }

    /// Tail expectation `u_alpha = (1/alpha) integral_0^alpha q(u) du`, with
    /// `u_0 = ess_inf` and `u_1 = mean`.
    pub fn tail_expectation(&self, alpha: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 1]",
            });
        }
        Ok(if alpha == 0.0 {
            self.ess_inf()
        } else if alpha == 1.0 {
            self.mean()
        } else {
            self.lower_integral(alpha) / alpha
        })
    }

    pub fn shift(&self, a: f64) -> Self {
        let atoms = self.outcomes.iter().map(|v| v + a).zip(self.probs.clone());
        Self::canonical(atoms.collect())
    }

    pub fn scale(&self, lambda: f64) -> Result<Self> {
        if lambda < 0.0 {
            return Err(Error::NegativeScale(lambda));
        }
        let atoms = self
            .outcomes
            .iter()
            .map(|v| lambda * v)
            .zip(self.probs.clone());
        Ok(Self::canonical(atoms.collect()))
    }

    pub fn negate(&self) -> Self {
        let atoms = self.outcomes.iter().map(|v| -v).zip(self.probs.clone());
        Self::canonical(atoms.collect())
    }

    /// The law realised on its own support: one atom per outcome, ascending.
    pub fn as_random_variable(&self) -> RandomVariable {
        RandomVariable {
            space: FiniteProbabilitySpace {
                probs: self.probs.clone(),
            },
            values: self.outcomes.clone(),
        }
    }
}

pub fn law_of(rv: &RandomVariable) -> DiscreteDistribution {
    DiscreteDistribution::canonical(
        rv.values
            .iter()
            .copied()
            .zip(rv.space.probs.iter().copied())
            .collect(),
    )
}

/// Risk level `tau` in `(0, 1/2]` together with `beta = (1 - tau) / tau >= 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiskLevel {
    tau: f64,
    beta: f64,
}

impl RiskLevel {
    pub fn new(tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau <= 0.5) {
            return Err(Error::OutOfRange {
                name: "tau",
                value: tau,
                range: "(0, 1/2]",
            });
        }
        Ok(Self {
            tau,
            beta: (1.0 - tau) / tau,
        })
    }

    /// The level whose `beta` is the given value (`beta >= 1`).
    pub fn from_beta(beta: f64) -> Result<Self> {
        if !(beta >= 1.0 && beta.is_finite()) {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
                range: "[1, inf)",
            });
        }
        Ok(Self {
            tau: 1.0 / (1.0 + beta),
            beta,
        })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

fn check_nondecreasing(g: &[f64]) -> Result<()> {
    match g.windows(2).position(|w| w[1] < w[0]) {
        Some(i) => Err(Error::NotMonotone { index: i + 1 }),
        None => Ok(()),
    }
}

/// Two nondecreasing functions of the atom order: a comonotone pair.
pub fn comonotone_pair(
    space: &FiniteProbabilitySpace,
    g1: &[f64],
    g2: &[f64],
) -> Result<(RandomVariable, RandomVariable)> {
    check_nondecreasing(g1)?;
    check_nondecreasing(g2)?;
    let x = RandomVariable::new(space.clone(), g1.to_vec())?;
    let y = RandomVariable::new(space.clone(), g2.to_vec())?;
    Ok((x, y))
}

/// `(x_i - x_j)(y_i - y_j) >= 0` for every pair of atoms.
pub fn is_comonotone(x: &RandomVariable, y: &RandomVariable) -> bool {
    let (a, b) = (x.values(), y.values());
    if a.len() != b.len() {
        return false;
    }
    (0..a.len()).all(|i| (0..i).all(|j| (a[i] - a[j]) * (b[i] - b[j]) >= 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u3() -> DiscreteDistribution {
        DiscreteDistribution::from_atoms(&[0.0, 1.0, 2.0], &[1.0 / 3.0; 3]).unwrap()
    }

    #[test]
    fn from_atoms_merges_and_sorts() {
        let d = DiscreteDistribution::from_atoms(&[1.0, 0.0, 1.0], &[0.25, 0.5, 0.25]).unwrap();
        assert_eq!(d.outcomes(), &[0.0, 1.0]);
        assert_eq!(d.probs(), &[0.5, 0.5]);

        let d = DiscreteDistribution::from_atoms(&[3.0], &[1.0]).unwrap();
        assert_eq!(d, DiscreteDistribution::point_mass(3.0));
    }

    #[test]
    fn from_atoms_errors() {
        assert!(matches!(
            DiscreteDistribution::from_atoms(&[0.0, 1.0], &[1.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            DiscreteDistribution::from_atoms(&[0.0, 1.0], &[1.0, 0.0]),
            Err(Error::NonPositiveProbability { index: 1, .. })
        ));
        assert!(matches!(
            DiscreteDistribution::from_atoms(&[0.0, 1.0], &[0.5, 0.6]),
            Err(Error::BadNormalization { .. })
        ));
        // drift within 1e-9 is renormalized
        let d = DiscreteDistribution::from_atoms(&[0.0, 1.0], &[0.5, 0.5 + 5e-10]).unwrap();
        assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn from_samples_weights() {
        let d = DiscreteDistribution::from_samples(&[1.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(d.outcomes(), &[0.0, 1.0]);
        assert_eq!(d.probs(), &[0.25, 0.75]);
        assert!(DiscreteDistribution::from_samples(&[5.0])
            .unwrap()
            .is_point_mass());
        let d = DiscreteDistribution::from_samples(&[2.0; 4]).unwrap();
        assert_eq!(d, DiscreteDistribution::point_mass(2.0));
        assert_eq!(
            DiscreteDistribution::from_samples(&[]),
            Err(Error::EmptySample)
        );
    }

    #[test]
    fn law_of_pushforward() {
        let space = FiniteProbabilitySpace::new(vec![0.25, 0.75]).unwrap();
        let rv = RandomVariable::new(space, vec![1.0, 0.0]).unwrap();
        let d = law_of(&rv);
        assert_eq!(d.outcomes(), &[0.0, 1.0]);
        assert_eq!(d.probs(), &[0.75, 0.25]);

        let rv = RandomVariable::constant(FiniteProbabilitySpace::uniform(4).unwrap(), 2.5);
        assert_eq!(rv.law(), DiscreteDistribution::point_mass(2.5));
    }

    #[test]
    fn quantile_inf_convention() {
        let d = u3();
        assert_eq!(d.quantile(0.5).unwrap(), 1.0);
        assert_eq!(d.quantile(1.0 / 3.0).unwrap(), 0.0);
        assert_eq!(d.quantile(1.0).unwrap(), 2.0);
        assert_eq!(
            DiscreteDistribution::point_mass(4.0).quantile(0.3).unwrap(),
            4.0
        );
        assert!(d.quantile(0.0).is_err());
        assert!(d.quantile(1.0 + 1e-12).is_err());
    }

    #[test]
    fn moments_and_cdf() {
        let d = u3();
        assert_eq!(d.mean(), 1.0);
        assert_eq!(d.ess_inf(), 0.0);
        assert_eq!(d.ess_sup(), 2.0);
        assert!((d.cdf(1.0) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(d.cdf(-1.0), 0.0);
        assert_eq!(d.cdf(2.0), 1.0);
    }

    #[test]
    fn tail_expectation_values() {
        let d = u3();
        assert_eq!(d.tail_expectation(1.0 / 3.0).unwrap(), 0.0);
        assert_eq!(d.tail_expectation(1.0).unwrap(), 1.0);
        assert!((d.tail_expectation(2.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(d.tail_expectation(0.0).unwrap(), 0.0);
        assert!(d.tail_expectation(1.5).is_err());
    }

    #[test]
    fn affine_pushforwards() {
        assert_eq!(u3().shift(1.0).outcomes(), &[1.0, 2.0, 3.0]);
        assert_eq!(
            u3().scale(0.0).unwrap(),
            DiscreteDistribution::point_mass(0.0)
        );
        assert_eq!(
            DiscreteDistribution::point_mass(3.0).negate(),
            DiscreteDistribution::point_mass(-3.0)
        );
        assert_eq!(u3().negate().outcomes(), &[-2.0, -1.0, 0.0]);
        assert_eq!(u3().scale(-1.0), Err(Error::NegativeScale(-1.0)));
    }

    #[test]
    fn comonotone_pairs() {
        let space = FiniteProbabilitySpace::uniform(3).unwrap();
        let (x, y) = comonotone_pair(&space, &[0.0, 1.0, 2.0], &[0.0, 0.0, 5.0]).unwrap();
        assert!(is_comonotone(&x, &y));
        let (x, y) = comonotone_pair(&space, &[1.0; 3], &[0.0, 2.0, 2.0]).unwrap();
        assert!(is_comonotone(&x, &y));

        let space = FiniteProbabilitySpace::uniform(2).unwrap();
        assert_eq!(
            comonotone_pair(&space, &[0.0, 1.0], &[1.0, 0.0]).unwrap_err(),
            Error::NotMonotone { index: 1 }
        );
    }

    #[test]
    fn risk_level_bounds() {
        let l = RiskLevel::new(0.2).unwrap();
        assert!((l.beta() - 4.0).abs() < 1e-15);
        assert!((l.beta() * l.tau() - (1.0 - l.tau())).abs() < 1e-12);
        assert!(RiskLevel::new(0.0).is_err());
        assert!(RiskLevel::new(0.51).is_err());
        assert_eq!(RiskLevel::new(0.5).unwrap().beta(), 1.0);
        assert!((RiskLevel::from_beta(16.0).unwrap().tau() - 1.0 / 17.0).abs() < 1e-15);
    }

    #[test]
    fn random_variable_space_mismatch() {
        let a = RandomVariable::constant(FiniteProbabilitySpace::uniform(2).unwrap(), 1.0);
        let b = RandomVariable::constant(FiniteProbabilitySpace::uniform(3).unwrap(), 1.0);
        assert_eq!(a.add(&b), Err(Error::SpaceMismatch));
    }
}
