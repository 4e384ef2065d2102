//! Expectile risk measures on finite distributions.
//!
//! The expectile `e_tau` (for `tau` in `(0, 1/2]`) is computed by four
//! independent routes that are cross-checked against each other:
//!
//! * bisection on the first-order condition ([`expectile::expectile`]);
//! * golden-section minimisation of the score ([`expectile::expectile_argmin`]);
//! * a scan over the quantile-scale extreme densities
//!   ([`scenario::expectile_breakpoint_scan`]) or all subsets
//!   ([`scenario::expectile_bruteforce_subsets`]);
//! * the two-point Kusuoka mixtures ([`kusuoka::expectile_via_kusuoka`]).
//!
//! Around it sit the comonotone minorant `v` and the sandwich
//! `e_sigma <= v <= e_tau` ([`distortion`]), and the Wasserstein Lipschitz
//! bounds ([`wasserstein`]).

// `!(x > 0.0)` is how input checks reject NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod dist;
pub mod distortion;
pub mod error;
pub mod expectile;
pub mod io;
pub mod kusuoka;
pub mod report;
pub mod scenario;
pub mod wasserstein;

pub use dist::{
    comonotone_pair, law_of, DiscreteDistribution, FiniteProbabilitySpace, RandomVariable,
    RiskLevel,
};
pub use distortion::Distortion;
pub use error::{Error, Result};
pub use expectile::{expectile, expectile_value, SolverConfig};
pub use kusuoka::KusuokaMeasure;
pub use scenario::{ScenarioDensity, SubsetSpec};
