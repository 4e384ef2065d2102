//! Risk-report tables and their text encodings.

use serde::Serialize;

use crate::dist::{DiscreteDistribution, RiskLevel};
use crate::distortion::sandwich_report;
use crate::error::{Error, Result};
use crate::expectile::expectile_curve;

/// Slack allowed on the ordering `e_sigma <= v <= e_tau`, `cvar_lb <= e_tau`.
pub const ROW_ORDER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReportRow {
    pub tau: f64,
    pub expectile: f64,
    pub comonotone_v: f64,
    pub e_sigma: f64,
    pub cvar_lb: f64,
}

impl ReportRow {
    pub fn is_ordered(&self) -> bool {
        self.e_sigma <= self.comonotone_v + ROW_ORDER_TOL
            && self.comonotone_v <= self.expectile + ROW_ORDER_TOL
            && self.cvar_lb <= self.expectile + ROW_ORDER_TOL
    }
}

pub fn report_rows(d: &DiscreteDistribution, taus: &[RiskLevel]) -> Vec<ReportRow> {
    taus.iter()
        .map(|&level| {
            let s = sandwich_report(d, level);
            ReportRow {
                tau: level.tau(),
                expectile: s.e_tau,
                comonotone_v: s.v,
                e_sigma: s.e_sigma,
                cvar_lb: s.cvar_lb,
            }
        })
        .collect()
}

/// Decimal rendering with 17 significant digits, enough to round-trip any
/// `f64`. Very large or small magnitudes fall back to exponent notation.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..=16).contains(&exp) {
        format!("{:.*}", (16 - exp) as usize, x)
    } else {
        format!("{:.16e}", x)
    }
}

pub const REPORT_HEADER: &str = "tau,expectile,comonotone_v,e_sigma,cvar_lb";

/// CSV with `#` metadata lines, a header row and one line per row.
pub fn rows_to_csv(rows: &[ReportRow], metadata: &[String]) -> String {
    let mut out = String::new();
    for m in metadata {
        out.push_str("# ");
        out.push_str(m);
        out.push('\n');
    }
    out.push_str(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        let cells = [r.tau, r.expectile, r.comonotone_v, r.e_sigma, r.cvar_lb].map(format_f64);
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn rows_to_json(rows: &[ReportRow]) -> String {
    serde_json::to_string_pretty(rows).expect("report rows serialize") + "\n"
}

pub fn curve_to_csv(points: &[(f64, f64)]) -> String {
    let mut out = String::from("tau,expectile\n");
    for &(tau, e) in points {
        out.push_str(&format!("{},{}\n", format_f64(tau), format_f64(e)));
    }
    out
}

/// Comma-separated list of levels, each in `(0, 1/2]`.
pub fn parse_tau_list(text: &str) -> Result<Vec<RiskLevel>> {
    let levels = text
        .split(',')
        .map(|t| {
            let tau: f64 = t
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("invalid tau `{}`", t.trim())))?;
            RiskLevel::new(tau)
        })
        .collect::<Result<Vec<_>>>()?;
    if levels.is_empty() {
        return Err(Error::Parse("empty tau list".into()));
    }
    Ok(levels)
}

/// `start:stop:count`, equispaced and inclusive, all inside `(0, 1/2]`.
pub fn parse_grid(spec: &str) -> Result<Vec<RiskLevel>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [start, stop, count] = parts.as_slice() else {
        return Err(Error::Parse(format!(
            "grid `{spec}` is not start:stop:count"
        )));
    };
    let parse = |s: &str| -> Result<f64> {
        s.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("invalid grid number `{s}`")))
    };
    let (start, stop) = (parse(start)?, parse(stop)?);
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid grid count `{count}`")))?;
    if count == 0 {
        return Err(Error::Parse("grid count must be at least 1".into()));
    }
    if stop < start {
        return Err(Error::Parse(format!(
            "grid stop {stop} is below start {start}"
        )));
    }
    if count == 1 {
        return Ok(vec![RiskLevel::new(start)?]);
    }
    let step = (stop - start) / (count - 1) as f64;
    (0..count)
        .map(|k| {
            let tau = if k == count - 1 {
                stop
            } else {
                start + step * k as f64
            };
            RiskLevel::new(tau)
        })
        .collect()
}

pub fn curve(d: &DiscreteDistribution, grid: &[RiskLevel]) -> Result<Vec<(f64, f64)>> {
    expectile_curve(d, grid)
}
