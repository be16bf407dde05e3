use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use close_levels::cli::{
    analyze, census_table, parse_problem, result_table, run_sweep, run_verify, sweep_table,
    verify_table, CensusDocument,
};
use close_levels::ensemble::{case_census, EnsembleSpec};
use close_levels::error::Error;
use close_levels::spectral::{Tolerance, UnperturbedPair};

/// Exact two-level spectra, indicator-energy classification, degeneracy
/// sweeps, and a random-perturbation case census.
#[derive(Parser)]
#[command(name = "close-levels", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// JSON document.
    Structured,
    /// Comma-separated values with a header row.
    Tabular,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem document and classify the level behavior.
    Analyze {
        /// Problem document path; stdin when omitted or `-`.
        input: Option<PathBuf>,
        #[arg(long)]
        tol_rel: Option<f64>,
        #[arg(long)]
        tol_abs: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// Trace the degeneracy-restoration sweep k ∈ [0, 1].
    Sweep {
        /// Problem document path; stdin when omitted or `-`.
        input: Option<PathBuf>,
        /// Number of uniform grid points (≥ 2).
        #[arg(long, default_value_t = 101)]
        k_steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Tabular)]
        format: Format,
    },
    /// Classify random perturbations and report case frequencies.
    Census {
        /// Gaussian scale of the perturbation elements.
        #[arg(long, default_value_t = 0.5)]
        sigma: f64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        e0_lower: f64,
        #[arg(long, default_value_t = 1.0)]
        e0_upper: f64,
        #[arg(long)]
        tol_rel: Option<f64>,
        #[arg(long)]
        tol_abs: Option<f64>,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
    /// Check the closed form against the Jacobi oracle and scan the
    /// spectator-distance validity of the two-level truncation.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ascending spectator-distance scale factors.
        #[arg(long, value_delimiter = ',', default_values_t = [10.0, 100.0, 1000.0])]
        scales: Vec<f64>,
        /// Coupling magnitude between the pair and each spectator.
        #[arg(long, default_value_t = 0.05)]
        coupling: f64,
        #[arg(long, value_enum, default_value_t = Format::Structured)]
        format: Format,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoConvergence { .. } => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    match command {
        Command::Analyze {
            input,
            tol_rel,
            tol_abs,
            format,
        } => {
            let doc = parse_problem(&read_input(input)?)?;
            let tol = doc.tolerance(tol_rel, tol_abs)?;
            let result = analyze(&doc, &tol)?;
            match format {
                Format::Structured => println!("{}", to_json(&result)),
                Format::Tabular => print!("{}", result_table(&result)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            input,
            k_steps,
            format,
        } => {
            let doc = parse_problem(&read_input(input)?)?;
            let rows = run_sweep(&doc, k_steps)?;
            match format {
                Format::Structured => println!("{}", to_json(&rows)),
                Format::Tabular => print!("{}", sweep_table(&rows)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Census {
            sigma,
            samples,
            seed,
            e0_lower,
            e0_upper,
            tol_rel,
            tol_abs,
            format,
        } => {
            let default = Tolerance::default();
            let tol = Tolerance::new(
                tol_rel.unwrap_or(default.rel),
                tol_abs.unwrap_or(default.abs),
            )?;
            let pair = UnperturbedPair::new(e0_lower, e0_upper)?;
            let spec = EnsembleSpec::new(pair, sigma, samples, seed, tol)?;
            let doc = CensusDocument::from(case_census(&spec));
            match format {
                Format::Structured => println!("{}", to_json(&doc)),
                Format::Tabular => print!("{}", census_table(&doc)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            samples,
            seed,
            scales,
            coupling,
            format,
        } => {
            if samples == 0 {
                return Err(Error::InvalidInput("samples must be ≥ 1".into()));
            }
            let report = run_verify(samples, seed, &scales, coupling)?;
            match format {
                Format::Structured => println!("{}", to_json(&report)),
                Format::Tabular => print!("{}", verify_table(&report)),
            }
            Ok(if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn read_input(path: Option<PathBuf>) -> Result<String, Error> {
    let from_stdin = match &path {
        None => true,
        Some(p) => p.as_os_str() == "-",
    };
    if from_stdin {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| Error::InvalidInput(format!("failed to read stdin: {e}")))?;
        Ok(buf)
    } else {
        let p = path.unwrap();
        std::fs::read_to_string(&p)
            .map_err(|e| Error::InvalidInput(format!("failed to read {}: {e}", p.display())))
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("output documents serialize")
}
