//! Command-line grammar and its translation into experiment specs.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use wyner_core::channel::db_to_linear;
use wyner_core::experiments::{Execution, ExperimentSpec, FigureId, Sweep};
use wyner_core::{SplitClamp, TopologyKind};

#[derive(Debug, Parser)]
#[command(
    name = "simulate",
    version,
    about = "Monte Carlo simulator for cooperative multicell MISO beamforming with limited feedback",
    allow_negative_numbers = true,
    subcommand_required = false,
    arg_required_else_help = true
)]
pub struct Cli {
    /// List the available figure drivers and exit.
    #[arg(long)]
    pub list: bool,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact vs high-SINR sum-rate of full-CSI GEBF over rho_d.
    Fig3(RunArgs),
    /// Full-CSI GEBF sum-rate over the number of cells.
    Fig4(RunArgs),
    /// Mean sum-rate loss from RVQ feedback over B_d, with its upper bound.
    Fig5(RunArgs),
    /// GEBF, EBF and ZF with full CSI and with limited feedback.
    Fig6(RunArgs),
    /// Limited-feedback sum-rates over the feedback budget.
    Fig7(RunArgs),
    /// Optimal (B_d, B_i) over the interference ratio.
    Fig8(RunArgs),
    /// Finite array with random per-user alpha: average per-cell rate.
    Fig9(RunArgs),
    /// Strategy comparison on an arbitrary configuration.
    Custom(RunArgs),
    /// Print the bound-minimizing feedback split for one user.
    Split(SplitArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct RunArgs {
    /// Number of cells (comma-separated list for fig4).
    #[arg(long = "k", value_delimiter = ',', allow_hyphen_values = true)]
    pub k: Option<Vec<i64>>,
    /// Transmit antennas per base station.
    #[arg(long)]
    pub nt: Option<i64>,
    /// Desired-signal SNR in dB (comma-separated list).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub rho_d_db: Option<Vec<f64>>,
    /// Interference ratio alpha as a linear power ratio in [0, 1] (list).
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        conflicts_with = "alpha_db"
    )]
    pub alpha: Option<Vec<f64>>,
    /// Interference ratio in dB, at most 0 (list).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub alpha_db: Option<Vec<f64>>,
    /// Range "LO,HI" in dB of the per-user alpha draw (fig9).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    pub alpha_range_db: Option<Vec<f64>>,
    /// Feedback bits per user (list for fig7).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub btot: Option<Vec<i64>>,
    /// Desired-channel bits to sweep (fig5).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bd: Option<Vec<i64>>,
    /// Monte Carlo trials per sweep point.
    #[arg(long)]
    pub trials: Option<i64>,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Cell arrangement: circular or finite.
    #[arg(long)]
    pub topology: Option<String>,
    /// Smallest admissible B_d for the optimal split.
    #[arg(long, requires = "clamp_hi")]
    pub clamp_lo: Option<i64>,
    /// Largest admissible B_d for the optimal split.
    #[arg(long, requires = "clamp_lo")]
    pub clamp_hi: Option<i64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<std::path::PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SplitArgs {
    /// Feedback bits of the user.
    #[arg(long)]
    pub btot: i64,
    /// Desired-signal SNR in dB.
    #[arg(long, default_value_t = 10.0)]
    pub rho_d_db: f64,
    /// Interference ratio as a linear power ratio in [0, 1].
    #[arg(
        long,
        conflicts_with = "alpha_db",
        required_unless_present = "alpha_db"
    )]
    pub alpha: Option<f64>,
    /// Interference ratio in dB, at most 0.
    #[arg(long)]
    pub alpha_db: Option<f64>,
    #[arg(long, default_value_t = 2)]
    pub nt: i64,
    #[arg(long, requires = "clamp_hi")]
    pub clamp_lo: Option<i64>,
    #[arg(long, requires = "clamp_lo")]
    pub clamp_hi: Option<i64>,
}

/// A configuration problem, reported with the offending key.
#[derive(Debug)]
pub struct ConfigError(pub String);

fn bad(key: &str, detail: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("invalid value for '{key}': {detail}"))
}

fn unsigned<T: TryFrom<i64>>(key: &str, v: i64) -> Result<T, ConfigError> {
    T::try_from(v).map_err(|_| bad(key, format!("{v} is out of range")))
}

fn unsigned_list<T: TryFrom<i64>>(key: &str, vs: &[i64]) -> Result<Vec<T>, ConfigError> {
    if vs.is_empty() {
        return Err(bad(key, "empty list"));
    }
    vs.iter().map(|&v| unsigned(key, v)).collect()
}

fn finite_list(key: &str, vs: &[f64]) -> Result<Vec<f64>, ConfigError> {
    if vs.is_empty() {
        return Err(bad(key, "empty list"));
    }
    if let Some(v) = vs.iter().find(|v| !v.is_finite()) {
        return Err(bad(key, format!("{v} is not finite")));
    }
    Ok(vs.to_vec())
}

fn alpha_from_db(key: &str, db: f64) -> Result<f64, ConfigError> {
    if !(db.is_finite() || db == f64::NEG_INFINITY) || db > 0.0 {
        return Err(bad(key, format!("{db} dB is above 0 dB")));
    }
    Ok(db_to_linear(db))
}

fn linear_alpha(key: &str, a: f64) -> Result<f64, ConfigError> {
    if !(0.0..=1.0).contains(&a) {
        return Err(bad(key, format!("{a} is outside [0, 1]")));
    }
    Ok(a)
}

fn clamp(lo: Option<i64>, hi: Option<i64>) -> Result<Option<SplitClamp>, ConfigError> {
    match (lo, hi) {
        (Some(lo), Some(hi)) => {
            let lo = unsigned("clamp_lo", lo)?;
            let hi = unsigned("clamp_hi", hi)?;
            SplitClamp::new(lo, hi)
                .map(Some)
                .map_err(|_| bad("clamp_lo", format!("{lo} exceeds clamp_hi = {hi}")))
        }
        _ => Ok(None),
    }
}

/// The figure a subcommand runs; `custom` runs the strategy comparison.
pub fn figure_of(command: &Command) -> Option<FigureId> {
    Some(match command {
        Command::Fig3(_) => FigureId::HighSinrApprox,
        Command::Fig4(_) => FigureId::SumRateVsK,
        Command::Fig5(_) => FigureId::MeanLossVsBd,
        Command::Fig6(_) | Command::Custom(_) => FigureId::CompareStrategies,
        Command::Fig7(_) => FigureId::SumRateVsBtot,
        Command::Fig8(_) => FigureId::SplitVsAlpha,
        Command::Fig9(_) => FigureId::AsymmetricCells,
        Command::Split(_) => return None,
    })
}

/// Applies the overrides to the figure's default spec.
pub fn build_spec(figure: FigureId, args: &RunArgs) -> Result<ExperimentSpec, ConfigError> {
    let mut spec = ExperimentSpec::default_for(figure).with_seed(args.seed);
    let s: &mut Sweep = &mut spec.sweep;
    if let Some(k) = &args.k {
        s.cells = unsigned_list("k", k)?;
    }
    if let Some(nt) = args.nt {
        s.antennas = unsigned("nt", nt)?;
    }
    if let Some(r) = &args.rho_d_db {
        s.rho_d_db = finite_list("rho_d_db", r)?;
    }
    if let Some(a) = &args.alpha {
        s.alpha = finite_list("alpha", a)?
            .into_iter()
            .map(|x| linear_alpha("alpha", x))
            .collect::<Result<_, _>>()?;
    }
    if let Some(a) = &args.alpha_db {
        s.alpha = finite_list("alpha_db", a)?
            .into_iter()
            .map(|x| alpha_from_db("alpha_db", x))
            .collect::<Result<_, _>>()?;
    }
    if let Some(range) = &args.alpha_range_db {
        let [lo, hi] = finite_list("alpha_range_db", range)?[..] else {
            return Err(bad("alpha_range_db", "expected LO,HI"));
        };
        if lo > hi || hi > 0.0 {
            return Err(bad(
                "alpha_range_db",
                format!("[{lo}, {hi}] is not an interval below 0 dB"),
            ));
        }
        s.alpha_range_db = (lo, hi);
    }
    if let Some(b) = &args.btot {
        s.b_tot = unsigned_list("btot", b)?;
        if figure == FigureId::MeanLossVsBd && args.bd.is_none() {
            s.b_d = (0..=s.b_tot[0]).collect();
        }
    }
    if let Some(bd) = &args.bd {
        s.b_d = unsigned_list("bd", bd)?;
    }
    if let Some(t) = args.trials {
        spec.trials = unsigned("trials", t)?;
    }
    if let Some(t) = &args.topology {
        spec.sweep.topology = t.parse::<TopologyKind>().map_err(|e| bad("topology", e))?;
    }
    spec.sweep.clamp = clamp(args.clamp_lo, args.clamp_hi)?;
    spec.validate().map_err(|e| ConfigError(e.to_string()))?;
    Ok(spec)
}

/// Parameters of the `split` subcommand after unit conversion.
pub struct SplitQuery {
    pub b_tot: u32,
    pub nt: usize,
    pub rho_i: f64,
    pub clamp: Option<SplitClamp>,
}

pub fn build_split(args: &SplitArgs) -> Result<SplitQuery, ConfigError> {
    let b_tot = unsigned("btot", args.btot)?;
    let nt = unsigned("nt", args.nt)?;
    if !(2..=8).contains(&nt) {
        return Err(bad("nt", format!("{nt} is outside 2..=8")));
    }
    if !args.rho_d_db.is_finite() {
        return Err(bad("rho_d_db", "not finite"));
    }
    let alpha = match (args.alpha, args.alpha_db) {
        (Some(a), _) => linear_alpha("alpha", a)?,
        (None, Some(db)) => alpha_from_db("alpha_db", db)?,
        (None, None) => unreachable!("clap requires one of them"),
    };
    Ok(SplitQuery {
        b_tot,
        nt,
        rho_i: alpha * db_to_linear(args.rho_d_db),
        clamp: clamp(args.clamp_lo, args.clamp_hi)?,
    })
}

/// Worker pool from `SIM_THREADS`: unset, empty or 0 uses every core.
pub fn execution(value: Option<&str>) -> Result<Execution, ConfigError> {
    match value.map(str::trim) {
        None | Some("") => Ok(Execution::Parallel),
        Some(v) => match v.parse::<usize>() {
            Ok(0) => Ok(Execution::Parallel),
            Ok(n) => Ok(Execution::ParallelThreads(n)),
            Err(_) => Err(bad("SIM_THREADS", format!("'{v}' is not a thread count"))),
        },
    }
}
