//! Seeded Monte Carlo drivers for the standard experiments.
//!
//! Trial `t` of an experiment draws all of its randomness (channels,
//! codebooks, per-user α) from `seed::trial_seed(master_seed, t)`, so trials
//! can run on any thread in any order. Per-trial samples are collected in
//! trial order and reduced serially, which makes parallel and serial runs
//! bit-identical and makes the first `n` trials of a long run equal to a
//! run of `n` trials.

mod drivers;
mod output;
mod stats;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitalloc::SplitClamp;
use crate::channel::{linear_to_db, TopologyKind};
use crate::error::{Error, Result};
use crate::feedback::MAX_CODEBOOK_BITS;
use crate::numerics::{MAX_ANTENNAS, MIN_ANTENNAS};
use crate::seed;

pub use output::{to_csv, to_json};
pub use stats::Welford;

/// Smallest trial count an experiment accepts.
pub const MIN_TRIALS: usize = 100;

/// Trials per sweep point unless overridden.
pub const DEFAULT_TRIALS: usize = 10_000;

/// Largest array the asymmetric experiment accepts.
pub const MAX_CELLS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureId {
    /// Exact vs high-SINR sum-rate of full-CSI GEBF against ρ_d.
    HighSinrApprox,
    /// Full-CSI GEBF sum-rate against the number of cells.
    SumRateVsK,
    /// Mean sum-rate loss from RVQ feedback against B_d, with its bound.
    MeanLossVsBd,
    /// GEBF, EBF, and ZF with full CSI and with limited feedback.
    CompareStrategies,
    /// Limited-feedback GEBF sum-rate against the feedback budget.
    SumRateVsBtot,
    /// Optimal (B_d, B_i) against the interference ratio in dB.
    SplitVsAlpha,
    /// Finite array with random per-user α: average per-cell rate.
    AsymmetricCells,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        Self::HighSinrApprox,
        Self::SumRateVsK,
        Self::MeanLossVsBd,
        Self::CompareStrategies,
        Self::SumRateVsBtot,
        Self::SplitVsAlpha,
        Self::AsymmetricCells,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Self::HighSinrApprox => "fig3",
            Self::SumRateVsK => "fig4",
            Self::MeanLossVsBd => "fig5",
            Self::CompareStrategies => "fig6",
            Self::SumRateVsBtot => "fig7",
            Self::SplitVsAlpha => "fig8",
            Self::AsymmetricCells => "fig9",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::HighSinrApprox => {
                "exact vs high-SINR sum-rate of full-CSI GEBF over rho_d (Nt = K = 4)"
            }
            Self::SumRateVsK => {
                "full-CSI GEBF sum-rate over the number of cells (Nt = 4, rho_d = 10 dB)"
            }
            Self::MeanLossVsBd => {
                "mean sum-rate loss from RVQ feedback over B_d, with its upper bound (B_tot = 15)"
            }
            Self::CompareStrategies => {
                "GEBF / EBF / ZF sum-rates, full CSI and limited feedback (B_tot = 6)"
            }
            Self::SumRateVsBtot => "limited-feedback GEBF sum-rate over the feedback budget",
            Self::SplitVsAlpha => {
                "optimal (B_d, B_i) over the interference ratio in dB (B_tot = 8)"
            }
            Self::AsymmetricCells => {
                "average per-cell rate, finite array with random per-user alpha (B_tot = 6)"
            }
        }
    }

    /// Whether the driver includes zero-forcing arms that need `B_tot/2`.
    fn needs_even_budget(self) -> bool {
        matches!(self, Self::CompareStrategies | Self::AsymmetricCells)
    }
}

impl std::fmt::Display for FigureId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Parameter grid of an experiment. Which fields a figure sweeps and which
/// it reads only the first entry of is listed in [`ExperimentSpec::default_for`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub topology: TopologyKind,
    pub cells: Vec<usize>,
    pub antennas: usize,
    pub rho_d_db: Vec<f64>,
    /// Interference ratios, linear scale.
    pub alpha: Vec<f64>,
    pub b_tot: Vec<u32>,
    /// Desired-channel bits swept by the loss experiment.
    pub b_d: Vec<u32>,
    /// Admissible `B_d` range for the optimal split.
    pub clamp: Option<SplitClamp>,
    /// Range of the per-user α in dB for the asymmetric experiment.
    pub alpha_range_db: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub figure: FigureId,
    pub sweep: Sweep,
    pub trials: usize,
    pub master_seed: u64,
}

impl ExperimentSpec {
    /// Desk-scale version of each experiment.
    ///
    /// | figure | swept                         | fixed                           |
    /// |--------|-------------------------------|---------------------------------|
    /// | fig3   | α × ρ_d ∈ 0..20 dB            | K = Nt = 4                      |
    /// | fig4   | K × α                         | Nt = 4, ρ_d = 10 dB             |
    /// | fig5   | B_d ∈ 3..12 × α               | K = Nt = 2, ρ_d = 10 dB, B = 15 |
    /// | fig6   | ρ_d × α                       | K = Nt = 2, B_tot = 6           |
    /// | fig7   | B_tot × α                     | K = Nt = 2, ρ_d = 10 dB         |
    /// | fig8   | α ∈ −40..0 dB                 | K = Nt = 2, ρ_d = 10 dB, B = 8  |
    /// | fig9   | ρ_d                           | K = 200 finite, Nt = 2, B = 6   |
    pub fn default_for(figure: FigureId) -> Self {
        let three_alphas = vec![0.001, 0.1, 1.0];
        let base = Sweep {
            topology: TopologyKind::Circular,
            cells: vec![2],
            antennas: 2,
            rho_d_db: vec![10.0],
            alpha: three_alphas.clone(),
            b_tot: vec![6],
            b_d: Vec::new(),
            clamp: None,
            alpha_range_db: (-40.0, 0.0),
        };
        let sweep = match figure {
            FigureId::HighSinrApprox => Sweep {
                cells: vec![4],
                antennas: 4,
                rho_d_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
                ..base
            },
            FigureId::SumRateVsK => Sweep {
                cells: vec![2, 3, 4, 5, 6, 8, 10],
                antennas: 4,
                ..base
            },
            FigureId::MeanLossVsBd => Sweep {
                b_tot: vec![15],
                b_d: (3..=12).collect(),
                ..base
            },
            FigureId::CompareStrategies => Sweep {
                alpha: vec![0.001, 0.01, 0.1, 0.2, 0.5, 1.0],
                ..base
            },
            FigureId::SumRateVsBtot => Sweep {
                b_tot: (2..=16).step_by(2).collect(),
                ..base
            },
            FigureId::SplitVsAlpha => Sweep {
                alpha: (0..=20)
                    .map(|i| 10f64.powf(f64::from(-40 + 2 * i) / 10.0))
                    .collect(),
                b_tot: vec![8],
                ..base
            },
            FigureId::AsymmetricCells => Sweep {
                topology: TopologyKind::FiniteArray,
                cells: vec![200],
                rho_d_db: vec![0.0, 5.0, 10.0, 15.0, 20.0],
                alpha: Vec::new(),
                ..base
            },
        };
        Self {
            figure,
            sweep,
            trials: DEFAULT_TRIALS,
            master_seed: 0,
        }
    }

    pub fn with_trials(mut self, trials: usize) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.sweep;
        let bad = |message: String, hint: &str| Error::InvalidSpec {
            message,
            hint: hint.to_string(),
        };
        if self.trials < MIN_TRIALS {
            return Err(bad(
                format!("trials = {} is below {MIN_TRIALS}", self.trials),
                "raise --trials",
            ));
        }
        if !(MIN_ANTENNAS..=MAX_ANTENNAS).contains(&s.antennas) {
            return Err(bad(
                format!(
                    "nt = {} outside {MIN_ANTENNAS}..={MAX_ANTENNAS}",
                    s.antennas
                ),
                "choose --nt between 2 and 8",
            ));
        }
        if s.cells.is_empty() || s.rho_d_db.is_empty() || s.b_tot.is_empty() {
            return Err(bad(
                "empty sweep grid".into(),
                "give at least one value per swept key",
            ));
        }
        if let Some(&k) = s.cells.iter().find(|&&k| !(2..=MAX_CELLS).contains(&k)) {
            return Err(bad(
                format!("k = {k} outside 2..={MAX_CELLS}"),
                "choose --k in range",
            ));
        }
        if let Some(r) = s.rho_d_db.iter().find(|r| !r.is_finite()) {
            return Err(bad(
                format!("rho_d_db = {r} is not finite"),
                "pass a finite --rho-d-db",
            ));
        }
        if self.figure != FigureId::AsymmetricCells {
            if s.alpha.is_empty() {
                return Err(bad("empty alpha grid".into(), "pass --alpha"));
            }
            if let Some(a) = s.alpha.iter().find(|a| !(0.0..=1.0).contains(*a)) {
                return Err(bad(
                    format!("alpha = {a} outside [0, 1]"),
                    "alpha is a linear power ratio <= 1",
                ));
            }
        } else {
            let (lo, hi) = s.alpha_range_db;
            if !(lo <= hi && hi <= 0.0) {
                return Err(bad(
                    format!("alpha range [{lo}, {hi}] dB is not a sub-range of (-inf, 0]"),
                    "use lo <= hi <= 0",
                ));
            }
        }
        if let Some(b) = s.b_tot.iter().find(|&&b| b > MAX_CODEBOOK_BITS) {
            return Err(bad(
                format!("btot = {b} exceeds {MAX_CODEBOOK_BITS}"),
                "lower --btot",
            ));
        }
        if self.figure == FigureId::MeanLossVsBd {
            if s.b_d.is_empty() {
                return Err(bad("empty B_d grid".into(), "give at least one B_d"));
            }
            let b_tot = s.b_tot[0];
            if let Some(b) = s.b_d.iter().find(|&&b| b > b_tot) {
                return Err(bad(
                    format!("B_d = {b} exceeds btot = {b_tot}"),
                    "keep B_d <= btot",
                ));
            }
        }
        if self.figure.needs_even_budget() {
            if let Some(b) = s.b_tot.iter().find(|&&b| b % 2 != 0) {
                return Err(bad(
                    format!("btot = {b} is odd, so the zero-forcing and equal-split arms cannot use B_tot/2 bits each"),
                    "use an even --btot",
                ));
            }
        }
        Ok(())
    }
}

/// One cell of a result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    /// Values of the table's point columns.
    pub point: Vec<f64>,
    pub metric: String,
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub figure: FigureId,
    /// Names of the sweep-point columns.
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    /// Row for `metric` at the point whose columns equal `point`.
    pub fn get(&self, point: &[f64], metric: &str) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.metric == metric && r.point == point)
    }

    /// All rows of one metric, in table order.
    pub fn metric<'a>(&'a self, metric: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.metric == metric)
    }
}

/// Where the trials run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Serial,
    /// Global rayon pool.
    #[default]
    Parallel,
    /// Dedicated pool with this many workers.
    ParallelThreads(usize),
}

/// Per-trial samples of every stochastic slot, in trial order.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub slots: Vec<drivers::Slot>,
    pub per_trial: Vec<Vec<f64>>,
}

pub use drivers::Slot;

fn execute(spec: &ExperimentSpec, exec: Execution) -> Result<(drivers::Driver, Samples)> {
    spec.validate()?;
    let driver = drivers::build(spec)?;
    let trial = |t: usize| driver.trial(seed::trial_seed(spec.master_seed, t as u64));
    let per_trial: Vec<Vec<f64>> = match exec {
        Execution::Serial => (0..spec.trials).map(trial).collect::<Result<_>>()?,
        Execution::Parallel => (0..spec.trials)
            .into_par_iter()
            .map(trial)
            .collect::<Result<_>>()?,
        Execution::ParallelThreads(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Domain(format!("cannot start {n} worker threads: {e}")))?;
            pool.install(|| {
                (0..spec.trials)
                    .into_par_iter()
                    .map(trial)
                    .collect::<Result<_>>()
            })?
        }
    };
    let samples = Samples {
        slots: driver.slots().to_vec(),
        per_trial,
    };
    Ok((driver, samples))
}

/// Runs every trial and returns the raw per-trial samples.
pub fn run_samples(spec: &ExperimentSpec, exec: Execution) -> Result<Samples> {
    execute(spec, exec).map(|(_, samples)| samples)
}

/// Runs the experiment in parallel on the global pool.
pub fn run(spec: &ExperimentSpec) -> Result<ResultTable> {
    run_with(spec, Execution::Parallel)
}

pub fn run_with(spec: &ExperimentSpec, exec: Execution) -> Result<ResultTable> {
    let (driver, samples) = execute(spec, exec)?;
    let mut acc = vec![Welford::default(); samples.slots.len()];
    for trial in &samples.per_trial {
        for (a, &x) in acc.iter_mut().zip(trial) {
            a.push(x);
        }
    }
    let mut rows: Vec<ResultRow> = samples
        .slots
        .iter()
        .zip(&acc)
        .map(|(slot, w)| ResultRow {
            point: slot.point.clone(),
            metric: slot.metric.clone(),
            mean: w.mean(),
            stderr: w.stderr(),
            trials: w.count(),
        })
        .collect();
    let derived = driver.derived_rows(&rows, spec.trials)?;
    rows.extend(derived);
    if let Some(r) = rows
        .iter()
        .find(|r| !r.mean.is_finite() || !r.stderr.is_finite())
    {
        return Err(Error::Domain(format!(
            "metric '{}' at {:?} is not finite",
            r.metric, r.point
        )));
    }
    Ok(ResultTable {
        figure: spec.figure,
        columns: driver.columns(),
        rows,
    })
}

/// `alpha` in dB, rounded to 9 decimals so grids written in dB read back cleanly.
pub(crate) fn alpha_db(alpha: f64) -> f64 {
    (linear_to_db(alpha) * 1e9).round() / 1e9
}
