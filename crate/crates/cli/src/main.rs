//! `expectiles`: risk reports, expectile curves and the property audit.
//!
//! Exit codes: 0 success, 1 failed audit or row-order violation, 2 input
//! parse error, 3 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use expectile_core::audit::{run_audit, AuditConfig};
use expectile_core::expectile::FocOrientation;
use expectile_core::io::{read_distribution_file, read_samples_file};
use expectile_core::report::{
    curve, curve_to_csv, format_f64, parse_grid, parse_tau_list, report_rows, rows_to_csv,
    rows_to_json,
};
use expectile_core::{DiscreteDistribution, RiskLevel};

#[derive(Parser, Debug)]
#[command(
    name = "expectiles",
    version,
    about = "Expectile risk reports and property audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate e_tau, the comonotone minorant, e_sigma and the CVaR bound
    Report {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        format: InputFormat,
        /// Comma-separated levels in (0, 0.5]
        #[arg(long)]
        tau: String,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        output: OutputFormat,
    },
    /// Run every property check on seeded random fixtures
    Audit {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value = "0.05,0.2,0.4")]
        tau: String,
        /// Solve with the sign-swapped first-order condition
        #[arg(long, hide = true)]
        swap_foc_sign: bool,
    },
    /// Emit `tau,expectile` over an inclusive grid
    Curve {
        #[arg(long)]
        input: PathBuf,
        /// start:stop:count
        #[arg(long)]
        grid: String,
        /// Detected from the file contents when omitted
        #[arg(long, value_enum)]
        format: Option<InputFormat>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum InputFormat {
    Samples,
    Distribution,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

enum Failure {
    Check(String),
    Input(String),
    Usage(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Input(_) => 2,
            Failure::Usage(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Check(m) | Failure::Input(m) | Failure::Usage(m) => m,
        }
    }
}

type CmdResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Report {
            input,
            format,
            tau,
            output,
        } => cmd_report(&input, format, &tau, output),
        Command::Audit {
            seed,
            trials,
            tau,
            swap_foc_sign,
        } => cmd_audit(seed, trials, &tau, swap_foc_sign),
        Command::Curve {
            input,
            grid,
            format,
        } => cmd_curve(&input, &grid, format),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Check(out)) => {
            print!("{out}");
            eprintln!("error: checks failed");
            ExitCode::from(1)
        }
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn taus(text: &str) -> Result<Vec<RiskLevel>, Failure> {
    parse_tau_list(text).map_err(|e| Failure::Usage(format!("--tau: {e}")))
}

fn load(path: &Path, format: InputFormat) -> Result<DiscreteDistribution, Failure> {
    match format {
        InputFormat::Samples => read_samples_file(path),
        InputFormat::Distribution => read_distribution_file(path),
    }
    .map_err(|e| Failure::Input(e.to_string()))
}

fn detect_format(path: &Path) -> Result<InputFormat, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(if text.trim_start().starts_with('{') {
        InputFormat::Distribution
    } else {
        InputFormat::Samples
    })
}

fn format_name(format: InputFormat) -> &'static str {
    match format {
        InputFormat::Samples => "samples",
        InputFormat::Distribution => "distribution",
    }
}

fn cmd_report(path: &Path, format: InputFormat, tau: &str, output: OutputFormat) -> CmdResult {
    let levels = taus(tau)?;
    let d = load(path, format)?;
    let rows = report_rows(&d, &levels);
    let text = match output {
        OutputFormat::Csv => {
            let meta = vec![
                format!("input: {}", path.display()),
                format!("format: {}", format_name(format)),
                format!("atoms: {}", d.len()),
            ];
            rows_to_csv(&rows, &meta)
        }
        OutputFormat::Json => rows_to_json(&rows),
    };
    if let Some(bad) = rows.iter().find(|r| !r.is_ordered()) {
        eprintln!(
            "error: report row at tau {} violates e_sigma <= v <= e_tau",
            bad.tau
        );
        return Err(Failure::Check(text));
    }
    Ok(text)
}

fn cmd_audit(seed: u64, trials: usize, tau: &str, swap_foc_sign: bool) -> CmdResult {
    if trials == 0 {
        return Err(Failure::Usage("--trials must be at least 1".into()));
    }
    let levels = taus(tau)?;
    let cfg = AuditConfig {
        seed,
        trials,
        taus: levels.clone(),
        orientation: if swap_foc_sign {
            FocOrientation::Printed
        } else {
            FocOrientation::Standard
        },
    };
    let results = run_audit(&cfg);
    let tau_list: Vec<String> = levels.iter().map(|l| l.tau().to_string()).collect();
    let mut out = format!(
        "# seed: {seed}\n# trials: {trials}\n# taus: {}\ncheck,trials,failures,worst_slack,status\n",
        tau_list.join(",")
    );
    for r in &results {
        let status = if r.passed() { "pass" } else { "FAIL" };
        out.push_str(&format!(
            "{},{},{},{},{status}\n",
            r.check_name,
            r.trials,
            r.failures,
            format_f64(r.worst_slack)
        ));
    }
    if results.iter().all(|r| r.passed()) {
        Ok(out)
    } else {
        Err(Failure::Check(out))
    }
}

fn cmd_curve(path: &Path, grid: &str, format: Option<InputFormat>) -> CmdResult {
    let levels = parse_grid(grid).map_err(|e| Failure::Usage(format!("--grid: {e}")))?;
    let format = match format {
        Some(f) => f,
        None => detect_format(path)?,
    };
    let d = load(path, format)?;
    let points = curve(&d, &levels).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(curve_to_csv(&points))
}
