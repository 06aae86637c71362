//! Command-line front end.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use crate::checks::{Registry, Suite};
use crate::error::{Error, Result};
use crate::report::{run_suite, to_json, RunConfig};
use crate::table::{emit_table, ModuleChoice, TableKind, TableSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "elliptic-fusion", version, about = "Numerical checks for elliptic dynamical R-matrices, fusion and Ruijsenaars operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a suite of checks and print a JSON report.
    Run(RunArgs),
    /// Print coefficient tables as CSV.
    Table(TableArgs),
    /// List the registered checks.
    List,
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Rank N of gl_N.
    #[arg(short = 'N', long = "n-dim", default_value_t = 2)]
    n_dim: usize,
    /// Coupling constant ℓ.
    #[arg(long, default_value_t = 1)]
    ell: u32,
    /// Largest tensor power for the fusion and module checks.
    #[arg(long, default_value_t = 3)]
    n: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    tau_re: f64,
    #[arg(long, default_value_t = 0.75, allow_hyphen_values = true)]
    tau_im: f64,
    #[arg(long, default_value_t = 0.171717, allow_hyphen_values = true)]
    gamma_re: f64,
    #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
    gamma_im: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sample count for every check (each check has its own default).
    #[arg(long)]
    samples: Option<usize>,
    /// Output file; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// theta, rmatrix, fusion, modules, ruijsenaars, transfer or all.
    #[arg(long, default_value = "all")]
    suite: Suite,
    /// Run only this check.
    #[arg(long)]
    check: Option<String>,
    /// Tolerance for every check (each check has its own default).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum What {
    #[value(name = "ruijsenaars_coeffs")]
    RuijsenaarsCoeffs,
    #[value(name = "transfer_coeffs")]
    TransferCoeffs,
    #[value(name = "gm_ratio")]
    GmRatio,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModuleArg {
    Sym,
    Ext,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    what: What,
    /// Quantum space: S^{Nℓ}V(w) or ∧^N V(w).
    #[arg(long, value_enum, default_value = "sym")]
    module: ModuleArg,
    /// Only this m; all 1..=N otherwise.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 0.37, allow_hyphen_values = true)]
    z_re: f64,
    #[arg(long, default_value_t = 0.11, allow_hyphen_values = true)]
    z_im: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    w_re: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    w_im: f64,
}

impl ModelArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            n_dim: self.n_dim,
            ell: self.ell,
            n: self.n,
            tau: [self.tau_re, self.tau_im],
            gamma: [self.gamma_re, self.gamma_im],
            seed: self.seed,
            samples: self.samples,
            ..RunConfig::default()
        }
    }
}

fn write_out(path: &Option<PathBuf>, bytes: &[u8]) -> Result<()> {
    let res = match path {
        Some(p) => std::fs::write(p, bytes),
        None => io::stdout().lock().write_all(bytes),
    };
    res.map_err(|e| Error::Output(e.to_string()))
}

fn usage(e: Error) -> i32 {
    eprintln!("error: {e}");
    EXIT_USAGE
}

/// Parses `args` (program name first) and runs the command; returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let registry = Registry::standard();
    match cli.command {
        Command::List => {
            for suite in &Suite::ALL[..Suite::ALL.len() - 1] {
                for c in registry.select(*suite) {
                    println!("{:<12} {:<32} tol={:e} samples={}", suite, c.name(), c.tol(), c.default_samples());
                }
            }
            EXIT_OK
        }
        Command::Run(a) => {
            let cfg = RunConfig {
                suite: a.suite,
                check: a.check,
                tol: a.tol,
                ..a.model.config()
            };
            if let Err(e) = cfg.validate() {
                return usage(e);
            }
            let report = match run_suite(&cfg, &registry) {
                Ok(r) => r,
                Err(e) => return usage(e),
            };
            let json = match to_json(&report) {
                Ok(j) => j,
                Err(e) => return usage(e),
            };
            if let Err(e) = write_out(&a.model.out, json.as_bytes()) {
                eprintln!("error: {e}");
                return EXIT_FAILED;
            }
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!(
                    "FAIL {}: residual {:e} > tol {:e}{}",
                    c.name,
                    c.max_residual,
                    c.tol,
                    c.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
                );
            }
            if report.pass {
                EXIT_OK
            } else {
                EXIT_FAILED
            }
        }
        Command::Table(a) => {
            let cfg = a.model.config();
            if let Err(e) = cfg.validate() {
                return usage(e);
            }
            let spec = TableSpec {
                kind: match a.what {
                    What::RuijsenaarsCoeffs => TableKind::RuijsenaarsCoeffs,
                    What::TransferCoeffs => TableKind::TransferCoeffs,
                    What::GmRatio => TableKind::GmRatio,
                },
                module: match a.module {
                    ModuleArg::Sym => ModuleChoice::Sym,
                    ModuleArg::Ext => ModuleChoice::Ext,
                },
                m: a.m,
                z: Complex64::new(a.z_re, a.z_im),
                w: Complex64::new(a.w_re, a.w_im),
            };
            let mut buf = Vec::new();
            if let Err(e) = emit_table(&cfg, &spec, &mut buf) {
                return match e {
                    Error::InvalidParams(_) => usage(e),
                    other => {
                        eprintln!("error: {other}");
                        EXIT_FAILED
                    }
                };
            }
            match write_out(&a.model.out, &buf) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_FAILED
                }
            }
        }
    }
}
