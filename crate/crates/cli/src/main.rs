//! `hardy-chain`: LHV bounds, Bell-operator tables, Hardy-type checks and the
//! full property suite from the command line.
//!
//! Exit codes: 0 every check passed, 1 a check failed, 2 usage error,
//! 3 resource cap exceeded.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hardy_chain::chain::MemberKind;
use hardy_chain::hardy::{HardyKind, HardyVariant, OptimizerConfig, DEFAULT_ZERO_TOL};
use hardy_chain::lhv::DEFAULT_ENUMERATION_CAP;

use crate::commands::Outcome;
use crate::config::{ConfigFile, Indices, NRange};
use crate::output::Format;

/// Environment variable naming the directory reports go to when `--out` is
/// not given.
pub const OUT_DIR_ENV: &str = "HARDY_CHAIN_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Resource(String),
    Failure(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Failure(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Resource(m) => write!(f, "resource cap: {m}"),
            CliError::Failure(m) => write!(f, "{m}"),
        }
    }
}

impl From<hardy_chain::Error> for CliError {
    fn from(e: hardy_chain::Error) -> Self {
        use hardy_chain::Error as E;
        match e {
            E::ResourceLimit { .. } => CliError::Resource(e.to_string()),
            E::Convergence { .. } | E::Singular(_) => CliError::Failure(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "hardy-chain", version, about = "Chained CH-Hardy inequalities for n qubits")]
struct Cli {
    /// `key = value` file; flags override its entries.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// json, csv or text-table.
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Output file. Defaults to `$HARDY_CHAIN_OUT_DIR/<command>.<ext>`, else stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustive LHV bounds of a chain member.
    LhvBounds(LhvArgs),
    /// Characteristic-polynomial eigenvalues against the full spectrum and the reference tables.
    Tables(TablesArgs),
    /// Hardy-type arguments: optimize, check a given state, or scan the n = 3 stationary surface.
    Hardy {
        #[command(subcommand)]
        action: HardyCommand,
    },
    /// Run the property suite.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct LhvArgs {
    /// X, Xij, Xijk or Xijkl.
    #[arg(long)]
    member: Option<MemberKind>,
    /// Qubit count or inclusive range such as 2..6.
    #[arg(long)]
    n: Option<NRange>,
    /// 1-based indices, e.g. 1,2.
    #[arg(long)]
    indices: Option<Indices>,
    /// Largest n to enumerate.
    #[arg(long)]
    cap: Option<usize>,
}

#[derive(Args, Debug)]
struct TablesArgs {
    /// 1 for X, 2 for Xij(1,2).
    #[arg(long)]
    which: Option<u8>,
    #[arg(long)]
    n: Option<NRange>,
    /// Also compare with the closed-form roots (n = 2 for X, n = 3 for Xij).
    #[arg(long)]
    exact: bool,
    /// Allowed deviation from the tabulated values.
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Args, Debug)]
struct VariantArgs {
    /// standard, i, ii or iii.
    #[arg(long)]
    variant: Option<HardyKind>,
    /// Defaults to 1,2 / 1,2,3 / 1,2,3,4.
    #[arg(long)]
    indices: Option<Indices>,
    /// Defaults to the state's qubit count for `check`.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum HardyCommand {
    /// Maximize P(e'=1 all) subject to the variant's zero constraints.
    Max {
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(long)]
        starts: Option<usize>,
        #[arg(long)]
        inner_evals: Option<usize>,
        #[arg(long)]
        penalty_start: Option<f64>,
        #[arg(long)]
        penalty_end: Option<f64>,
        /// Constraint residual a result must meet.
        #[arg(long)]
        tolerance: Option<f64>,
        /// Search complex amplitudes and azimuths too.
        #[arg(long)]
        complex: bool,
    },
    /// Evaluate the premises and conclusion on a state and frame read from JSON files.
    Check {
        #[command(flatten)]
        variant: VariantArgs,
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        frame: Option<PathBuf>,
        /// Zero tolerance for the premises.
        #[arg(long)]
        tau: Option<f64>,
    },
    /// Grid scan and refinement of the three-qubit stationary surface.
    ScanN3 {
        #[arg(long)]
        resolution: Option<usize>,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Run a single property.
    #[arg(long)]
    only: Option<String>,
    #[arg(long)]
    n_max: Option<usize>,
    /// Random states per member for op-prob-consistency.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    cap: Option<usize>,
}

fn positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {x}")))
    }
}

/// Builds the variant; `n_hint` stands in for a missing `--n`, and missing
/// indices default to the lowest ones the variant takes.
fn variant(cfg: &ConfigFile, args: VariantArgs, n_hint: Option<usize>) -> Result<HardyVariant, CliError> {
    let kind = cfg.pick(args.variant, "variant")?.ok_or_else(|| CliError::Usage("--variant is required".into()))?;
    let n = cfg.pick(args.n, "n")?.or(n_hint).ok_or_else(|| CliError::Usage("--n is required".into()))?;
    let count = match kind {
        HardyKind::Standard => 0,
        HardyKind::VariantI => 2,
        HardyKind::VariantII => 3,
        HardyKind::VariantIII => 4,
    };
    let indices = cfg.pick_or(args.indices, "indices", Indices((1..=count).collect()))?;
    Ok(HardyVariant::new(kind, n, &indices.0)?)
}

fn run(cli: Cli, cfg: &ConfigFile) -> Result<(Outcome, &'static str), CliError> {
    let seed = cfg.pick_or(cli.seed, "seed", 0x5eed)?;
    match cli.command {
        Command::LhvBounds(a) => {
            let kind = cfg.pick(a.member, "member")?.ok_or_else(|| CliError::Usage("--member is required".into()))?;
            if kind == MemberKind::Custom {
                return Err(CliError::Usage("custom members have no closed-form bounds".into()));
            }
            let ns = cfg.pick(a.n, "n")?.ok_or_else(|| CliError::Usage("--n is required".into()))?;
            let indices = cfg.pick_or(a.indices, "indices", Indices::default())?;
            let cap = cfg.pick_or(a.cap, "cap", DEFAULT_ENUMERATION_CAP)?;
            Ok((commands::lhv_bounds(kind, ns.iter(), &indices.0, cap)?, "lhv-bounds"))
        }
        Command::Tables(a) => {
            let which = cfg.pick(a.which, "which")?.ok_or_else(|| CliError::Usage("--which is required".into()))?;
            let default_n = if which == 1 { NRange { lo: 2, hi: 6 } } else { NRange { lo: 3, hi: 7 } };
            let ns = cfg.pick_or(a.n, "n", default_n)?;
            let exact = cfg.switch(a.exact, "exact")?;
            let tol = positive("tolerance", cfg.pick_or(a.tolerance, "tolerance", 1e-4)?)?;
            Ok((commands::tables(which, ns.iter(), exact, tol)?, "tables"))
        }
        Command::Hardy { action } => match action {
            HardyCommand::Max { variant: v, starts, inner_evals, penalty_start, penalty_end, tolerance, complex } => {
                let v = variant(cfg, v, None)?;
                let d = OptimizerConfig::default();
                let config = OptimizerConfig {
                    starts: cfg.pick_or(starts, "starts", d.starts)?,
                    seed,
                    penalty_start: positive(
                        "penalty-start",
                        cfg.pick_or(penalty_start, "penalty-start", d.penalty_start)?,
                    )?,
                    penalty_end: positive("penalty-end", cfg.pick_or(penalty_end, "penalty-end", d.penalty_end)?)?,
                    penalty_growth: d.penalty_growth,
                    inner_evals: cfg.pick_or(inner_evals, "inner-evals", d.inner_evals)?,
                    tolerance: positive("tolerance", cfg.pick_or(tolerance, "tolerance", d.tolerance)?)?,
                    complex: cfg.switch(complex, "complex")?,
                };
                Ok((commands::hardy_max(&v, &config)?, "hardy-max"))
            }
            HardyCommand::Check { variant: v, state, frame, tau } => {
                let state = cfg.pick(state, "state")?.ok_or_else(|| CliError::Usage("--state is required".into()))?;
                let frame = cfg.pick(frame, "frame")?.ok_or_else(|| CliError::Usage("--frame is required".into()))?;
                let (state, frame) = commands::load_state_and_frame(&state, &frame)?;
                let v = variant(cfg, v, Some(state.n()))?;
                let tau = positive("tau", cfg.pick_or(tau, "tau", DEFAULT_ZERO_TOL)?)?;
                Ok((commands::hardy_check(&v, &state, &frame, tau)?, "hardy-check"))
            }
            HardyCommand::ScanN3 { resolution } => {
                let resolution = cfg.pick_or(resolution, "resolution", 1000)?;
                Ok((commands::hardy_scan(resolution)?, "hardy-scan-n3"))
            }
        },
        Command::Verify(a) => {
            let only = cfg.pick(a.only, "only")?;
            let n_max = cfg.pick_or(a.n_max, "n-max", 6)?;
            let samples = cfg.pick_or(a.samples, "samples", 100)?;
            let cap = cfg.pick_or(a.cap, "cap", DEFAULT_ENUMERATION_CAP)?;
            Ok((commands::verify(only.as_deref(), n_max, samples, seed, cap)?, "verify"))
        }
    }
}

fn main_inner() -> Result<bool, CliError> {
    let cli = Cli::parse();
    let cfg = match &cli.config {
        Some(p) => ConfigFile::load(p)?,
        None => ConfigFile::default(),
    };
    let format = cfg.pick_or(cli.format, "format", Format::Json)?;
    let out = cfg.pick(cli.out.clone(), "out")?;
    let (outcome, name) = run(cli, &cfg)?;
    let body = outcome.report.render(format);
    let dest = out.or_else(|| {
        std::env::var_os(OUT_DIR_ENV).map(|d| PathBuf::from(d).join(format!("{name}.{}", format.extension())))
    });
    match dest {
        Some(path) => {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)
                    .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", dir.display())))?;
            }
            std::fs::write(&path, body)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
            eprintln!("{} (written to {})", outcome.summary, path.display());
        }
        None => {
            print!("{body}");
            eprintln!("{}", outcome.summary);
        }
    }
    Ok(outcome.ok)
}

fn main() -> ExitCode {
    match main_inner() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hardy-chain: {e}");
            ExitCode::from(e.code())
        }
    }
}
