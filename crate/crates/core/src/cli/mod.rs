//! Command-line front end: one subcommand per capability, a shared TOML
//! configuration and byte-deterministic CSV/JSON artifacts.
//!
//! Exit codes: `0` success, `2` configuration error, `3` a certificate or
//! hypothesis failed (the summary JSON and stdout carry a `reason` object).

mod commands;
pub mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

pub use config::RunConfig;
pub use output::config_hash;

use output::Artifacts;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "semigap",
    version,
    about = "Semiclassical gaps, twisted algebras and Hall pairings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for every random sample (overrides `seed`).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; the default uses every core.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Log-spaced coupling range `A:B`, replacing the configured couplings.
    #[arg(long, global = true, value_name = "A:B")]
    mu_sweep: Option<String>,
}

#[derive(Clone, Copy, Debug, Subcommand)]
enum Command {
    /// Multiplier and algebra identity suite.
    ValidateAlgebra,
    /// Cocycle, cyclicity and Hall-cocycle checks, optionally paired with a band projection.
    PairCocycle,
    /// Levels, gaps and counting data of the harmonic model operator.
    ModelSpectrum,
    /// Certified gap intervals over a coupling sweep.
    GapCertify,
    /// Band structure, density of states and gap emergence of the lattice operator.
    Simulate,
    /// Chern numbers of spectral projections by two independent methods.
    Hall,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Self::ValidateAlgebra => "validate-algebra",
            Self::PairCocycle => "pair-cocycle",
            Self::ModelSpectrum => "model-spectrum",
            Self::GapCertify => "gap-certify",
            Self::Simulate => "simulate",
            Self::Hall => "hall",
        }
    }
}

/// Why a run did not succeed.
#[derive(Clone, Debug, PartialEq)]
pub enum Failure {
    /// Invalid or unreadable configuration; exit code 2.
    Config(String),
    /// A certificate was refused or a checked hypothesis failed; exit code 3.
    Hypothesis { code: String, detail: String },
}

impl Failure {
    pub fn hypothesis(code: &str, detail: impl Into<String>) -> Self {
        Self::Hypothesis {
            code: code.to_string(),
            detail: detail.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            Self::Hypothesis { .. } => EXIT_FAILURE,
        }
    }

    /// Machine-readable `{kind, code, detail}` object.
    pub fn reason(&self) -> Value {
        match self {
            Self::Config(m) => json!({ "kind": "config", "code": "config_error", "detail": m }),
            Self::Hypothesis { code, detail } => {
                json!({ "kind": "hypothesis", "code": code, "detail": detail })
            }
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), Failure> {
    let bad = || {
        Failure::Config(format!(
            "--mu-sweep expects A:B with positive numbers, got {s:?}"
        ))
    };
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    let a: f64 = a.trim().parse().map_err(|_| bad())?;
    let b: f64 = b.trim().parse().map_err(|_| bad())?;
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b))
}

/// Reads and validates a configuration file, rejecting unknown keys.
pub fn load_config(path: &std::path::Path) -> Result<RunConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))
}

fn resolve(cli: &Cli) -> Result<(RunConfig, PathBuf), Failure> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Failure::Config("--config PATH is required".into()))?;
    let mut cfg = load_config(path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = Some(out.to_string_lossy().into_owned());
    }
    if let Some(range) = &cli.mu_sweep {
        let (a, b) = parse_range(range)?;
        let couplings = match cli.command {
            Command::GapCertify => cfg.certify.as_mut().map(|s| (&mut s.couplings, 13)),
            Command::Simulate => cfg.simulate.as_mut().map(|s| (&mut s.couplings, 4)),
            Command::Hall => cfg.hall.as_mut().map(|s| (&mut s.couplings, 3)),
            _ => {
                return Err(Failure::Config(format!(
                    "--mu-sweep does not apply to {}",
                    cli.command.name()
                )))
            }
        };
        if let Some((c, n)) = couplings {
            c.override_range(a, b, n);
        }
    }
    let dir = PathBuf::from(
        cfg.output_dir
            .clone()
            .unwrap_or_else(|| "semigap-out".into()),
    );
    Ok((cfg, dir))
}

fn dispatch(command: Command, cfg: &RunConfig, art: &mut Artifacts) -> Result<(), Failure> {
    match command {
        Command::ValidateAlgebra => commands::validate_algebra(cfg, art),
        Command::PairCocycle => commands::pair_cocycle(cfg, art),
        Command::ModelSpectrum => commands::model_spectrum(cfg, art),
        Command::GapCertify => commands::gap_certify(cfg, art),
        Command::Simulate => commands::simulate(cfg, art),
        Command::Hall => commands::hall(cfg, art),
    }
}

fn execute(cli: &Cli) -> Result<Artifacts, (Failure, Option<Artifacts>)> {
    let (cfg, dir) = resolve(cli).map_err(|f| (f, None))?;
    commands::check_section(cli.command.name(), &cfg).map_err(|f| (f, None))?;
    let mut art = Artifacts::new(dir, &cfg, cli.command.name()).map_err(|f| (f, None))?;
    let run = |art: &mut Artifacts| dispatch(cli.command, &cfg, art);
    let result = match cli.threads {
        Some(0) => Err(Failure::Config("--threads must be positive".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| run(&mut art)),
            Err(e) => Err(Failure::Config(format!("cannot start {n} threads: {e}"))),
        },
        None => run(&mut art),
    };
    match result {
        Ok(()) => Ok(art),
        Err(f) => {
            let summary = format!("{}.json", cli.command.name());
            if matches!(f, Failure::Hypothesis { .. }) && !art.written().contains(&summary) {
                if let Err(g) = art.summary(&Value::Null, Some(&f)) {
                    return Err((g, Some(art)));
                }
            }
            Err((f, Some(art)))
        }
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(art) => {
            println!(
                "{}",
                json!({ "status": "ok", "command": cli.command.name(), "config_hash": art.hash(), "outputs": art.written() })
            );
            EXIT_OK
        }
        Err((f, art)) => {
            let line = json!({
                "status": "failure",
                "command": cli.command.name(),
                "config_hash": art.as_ref().map(|a| a.hash().to_string()),
                "reason": f.reason(),
            });
            match f {
                Failure::Config(_) => eprintln!("{line}"),
                Failure::Hypothesis { .. } => println!("{line}"),
            }
            f.exit_code()
        }
    }
}
