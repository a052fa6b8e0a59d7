//! Command-line front end: parse matrix files, run the library operations and
//! print text or JSON reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 parse or validation error,
//! 3 numerical failure (Sinkhorn non-convergence, matching failure, power
//! drift).

pub mod io;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use matchfactor::{
    bvn_decompose, classify, classify_extreme, matching_factor, max_terms_bound, oracle_grid_scan,
    permutation_matrix, permutation_proximity, power_trajectory, random_bistochastic, random_permutation,
    recompose, scale, star_matching_factor, star_permutation_random, star_uniform, theorem_bounds,
    uniform_matrix, DenseMatrix, SinkhornConfig, ToleranceConfig,
};
use serde::Serialize;
use thiserror::Error;

use crate::io::{format_dense, parse_matrix, MatrixFormat};
use crate::report::*;

#[derive(Debug, Parser)]
#[command(name = "matchfactor", version, about = "Matching factor of bistochastic and *-positive matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Shared {
    /// Matrix file to read.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "dense")]
    pub format: MatrixFormat,
    /// Emit the structured JSON report instead of text.
    #[arg(long)]
    pub json: bool,
    #[arg(long, default_value_t = 1e-9)]
    pub sum_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    pub zero_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    pub class_log_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Permutation,
    Uniform,
    Bistochastic,
    StarPermutation,
    StarUniform,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report membership in each matrix class.
    Validate {
        #[command(flatten)]
        shared: Shared,
    },
    /// Compute per-index factors and the matching factor.
    Factor {
        #[command(flatten)]
        shared: Shared,
        /// Use the normalized variant for *-positive matrices.
        #[arg(long)]
        star: bool,
    },
    /// Decide whether a bistochastic matrix is a permutation, the uniform matrix, or interior.
    Classify {
        #[command(flatten)]
        shared: Shared,
    },
    /// Generate a matrix of the given class.
    Generate {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Entrywise factor; for star-uniform, the common entry value.
        #[arg(long)]
        scale: Option<f64>,
        /// Value range for star-permutation entries.
        #[arg(long, default_value_t = 0.1)]
        lo: f64,
        #[arg(long, default_value_t = 10.0)]
        hi: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        #[arg(long, default_value_t = 1e-12)]
        sinkhorn_tol: f64,
    },
    /// Birkhoff-von Neumann decomposition into weighted permutations.
    Decompose {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        max_terms: Option<usize>,
    },
    /// log M of successive matrix powers B, B², ..., B^tmax.
    Trajectory {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value_t = 100)]
        tmax: usize,
        /// Distance from the uniform bound counted as converged.
        #[arg(long, default_value_t = 1e-3)]
        limit_tol: f64,
    },
    /// Brute-force scan of log M over the order-2 or order-3 polytope.
    Oracle {
        #[command(flatten)]
        shared: Shared,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        n: u8,
        /// Grid points for n = 2.
        #[arg(long, default_value_t = 101)]
        resolution: usize,
        /// Random interior samples for n = 3.
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Parse(#[from] io::ParseError),
    #[error(transparent)]
    Library(#[from] matchfactor::Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Library(e) if e.is_numerical() => 3,
            CliError::Library(_) | CliError::Parse(_) => 2,
            CliError::Output(_) => 2,
        }
    }
}

impl Shared {
    fn tolerances(&self) -> Result<ToleranceConfig, CliError> {
        ToleranceConfig::new(self.sum_tol, self.zero_tol, self.class_log_tol)
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    fn load(&self) -> Result<DenseMatrix, CliError> {
        let path = self.input.as_ref().ok_or_else(|| CliError::Usage("--input is required".into()))?;
        Ok(parse_matrix(path, self.format)?)
    }
}

fn emit<P: Serialize>(
    out: &mut dyn Write,
    shared: &Shared,
    envelope: Envelope<P>,
) -> Result<(), CliError> {
    let value = serde_json::to_value(&envelope).expect("report types serialize");
    if shared.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("value serializes"))?;
    } else {
        write!(out, "{}", render_text(&value))?;
    }
    Ok(())
}

fn execute(cmd: Command, out: &mut dyn Write) -> Result<(), CliError> {
    match cmd {
        Command::Validate { shared } => {
            let tol = shared.tolerances()?;
            let m = shared.load()?;
            let payload = ValidatePayload::new(m.n(), &classify(&m, &tol));
            emit(out, &shared, Envelope::new("validate", matrix_digest(&m), payload))
        }
        Command::Factor { shared, star } => {
            shared.tolerances()?;
            let m = shared.load()?;
            let payload = if star {
                FactorPayload::new(&star_matching_factor(&m)?, None)
            } else {
                let p = matching_factor(&m)?;
                FactorPayload::new(&p, Some(permutation_proximity(&p)))
            };
            emit(out, &shared, Envelope::new("factor", matrix_digest(&m), payload))
        }
        Command::Classify { shared } => {
            let tol = shared.tolerances()?;
            let m = shared.load()?;
            let c = classify_extreme(&m, &tol)?;
            let rho = permutation_proximity(&matching_factor(&m)?);
            emit(out, &shared, Envelope::new("classify", matrix_digest(&m), ClassifyPayload::new(m.n(), &c, rho)))
        }
        Command::Generate { shared, kind, n, seed, scale: factor, lo, hi, max_iters, sinkhorn_tol } => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            if let Some(c) = factor {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(CliError::Usage(format!("--scale {c} must be finite and positive")));
                }
            }
            let cfg = SinkhornConfig { max_iters, convergence_tol: sinkhorn_tol };
            let mut m = match kind {
                GenKind::Permutation => permutation_matrix(&random_permutation(n, seed)?),
                GenKind::Uniform => uniform_matrix(n)?,
                GenKind::Bistochastic => random_bistochastic(n, seed, &cfg)?,
                GenKind::StarPermutation => star_permutation_random(n, seed, (lo, hi))
                    .map_err(|e| CliError::Usage(e.to_string()))?,
                GenKind::StarUniform => star_uniform(n, factor.unwrap_or(1.0))?,
            };
            if let (Some(c), false) = (factor, kind == GenKind::StarUniform) {
                m = scale(&m, c)?;
            }
            if shared.json {
                let kind_name = kind.to_possible_value().expect("no skipped variants").get_name().to_string();
                let payload = GeneratePayload { kind: kind_name, n, seed, rows: m.to_rows() };
                emit(out, &shared, Envelope::new("generate", matrix_digest(&m), payload))
            } else {
                write!(out, "{}", format_dense(&m))?;
                Ok(())
            }
        }
        Command::Decompose { shared, max_terms } => {
            let tol = shared.tolerances()?;
            let m = shared.load()?;
            let bound = max_terms_bound(m.n());
            let d = bvn_decompose(&m, &tol, max_terms.unwrap_or(bound))?;
            let err = recompose(&d).max_abs_diff(&m).expect("same order");
            emit(out, &shared, Envelope::new("decompose", matrix_digest(&m), DecomposePayload::new(&d, bound, err)))
        }
        Command::Trajectory { shared, tmax, limit_tol } => {
            let tol = shared.tolerances()?;
            if tmax == 0 {
                return Err(CliError::Usage("--tmax must be at least 1".into()));
            }
            let m = shared.load()?;
            let r = power_trajectory(&m, tmax, &tol, limit_tol)?;
            let (lower, _) = theorem_bounds(m.n())?;
            let payload = TrajectoryPayload::new(&r, lower);
            if shared.json {
                emit(out, &shared, Envelope::new("trajectory", matrix_digest(&m), payload))
            } else {
                writeln!(out, "t,log_m")?;
                for s in &payload.samples {
                    writeln!(out, "{},{}", s.t, io::format_real(s.log_m))?;
                }
                Ok(())
            }
        }
        Command::Oracle { shared, n, resolution, samples, seed } => {
            let n = n as usize;
            let points = if n == 2 { resolution } else { samples };
            if points < 2 {
                return Err(CliError::Usage("need at least 2 scan points".into()));
            }
            let r = oracle_grid_scan(n, points, seed)?;
            let digest = params_digest(&format!("oracle n={n} points={points} seed={seed}"));
            emit(out, &shared, Envelope::new("oracle", digest, OraclePayload::new(n, &r)))
        }
    }
}

/// Parses `argv` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
