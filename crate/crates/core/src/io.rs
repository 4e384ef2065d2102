//! Input file formats.
//!
//! * distribution: JSON object `{"outcomes": [...], "probs": [...]}`
//! * samples: UTF-8 text, one decimal number per line, `#` starts a comment

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dist::DiscreteDistribution;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub outcomes: Vec<f64>,
    pub probs: Vec<f64>,
}

impl From<&DiscreteDistribution> for DistributionFile {
    fn from(d: &DiscreteDistribution) -> Self {
        Self {
            outcomes: d.outcomes().to_vec(),
            probs: d.probs().to_vec(),
        }
    }
}

pub fn parse_distribution_json(text: &str) -> Result<DiscreteDistribution> {
    let file: DistributionFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    DiscreteDistribution::from_atoms(&file.outcomes, &file.probs)
}

pub fn parse_samples(text: &str) -> Result<Vec<f64>> {
    let mut samples = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = match line.find('#') {
            Some(i) => &line[..i],
            None => line,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        let value: f64 = content.parse().map_err(|_| {
            Error::Parse(format!("line {}: invalid number `{content}`", lineno + 1))
        })?;
        if !value.is_finite() {
            return Err(Error::Parse(format!(
                "line {}: non-finite value",
                lineno + 1
            )));
        }
        samples.push(value);
    }
    Ok(samples)
}

pub fn parse_samples_distribution(text: &str) -> Result<DiscreteDistribution> {
    DiscreteDistribution::from_samples(&parse_samples(text)?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn read_distribution_file(path: impl AsRef<Path>) -> Result<DiscreteDistribution> {
    parse_distribution_json(&read(path.as_ref())?)
}

pub fn read_samples_file(path: impl AsRef<Path>) -> Result<DiscreteDistribution> {
    parse_samples_distribution(&read(path.as_ref())?)
}
