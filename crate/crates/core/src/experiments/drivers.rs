//! Per-figure trial pipelines.
//!
//! A figure is one function that runs a full trial and emits
//! `(point, metric, value)` triples into a [`Sink`]. Running it once in
//! layout mode fixes the slot order that every later trial reproduces.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{alpha_db, ExperimentSpec, FigureId, ResultRow};
use crate::beamforming::{self, RateReport, Strategy};
use crate::bitalloc::{self, BitSplit};
use crate::channel::{self, db_to_linear, AlphaProfile, CellParams, ChannelSet, Topology};
use crate::error::{Error, Result};
use crate::feedback::{self, QuantizedCsi};
use crate::numerics::CVec;
use crate::seed::{self, Role};

/// One stochastic output of a trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slot {
    pub point: Vec<f64>,
    pub metric: String,
}

enum Sink {
    Layout(Vec<Slot>),
    Values(Vec<f64>),
}

impl Sink {
    fn emit(&mut self, point: &[f64], metric: &str, value: f64) {
        match self {
            Sink::Layout(slots) => slots.push(Slot {
                point: point.to_vec(),
                metric: metric.to_string(),
            }),
            Sink::Values(values) => values.push(value),
        }
    }
}

/// Channels of one trial plus the quantized directions drawn so far.
struct TrialCtx {
    seed: u64,
    topology: Topology,
    channels: ChannelSet,
    cache: HashMap<(usize, Role, u32), CVec>,
}

impl TrialCtx {
    fn new(topology: Topology, nt: usize, trial_seed: u64) -> Result<Self> {
        let channels = channel::generate(&topology, nt, trial_seed)?;
        Ok(Self {
            seed: trial_seed,
            topology,
            channels,
            cache: HashMap::new(),
        })
    }

    fn nt(&self) -> usize {
        self.channels.antennas()
    }

    /// Codeword for the direction of `v` from the codebook that
    /// `FeedbackSeeds::for_user` assigns to this user, role, and size.
    fn codeword(&mut self, cell: usize, role: Role, bits: u32) -> Result<CVec> {
        if let Some(w) = self.cache.get(&(cell, role, bits)) {
            return Ok(w.clone());
        }
        let (v, what) = match role {
            Role::DesiredCodebook => (&self.channels.h[cell], "h"),
            _ => (
                self.channels.g[cell]
                    .as_ref()
                    .expect("caller checks the interferer"),
                "g",
            ),
        };
        let n = v.norm();
        if !(n > 0.0) {
            return Err(Error::DegenerateChannel(what));
        }
        let w = feedback::quantize_streaming(
            &v.scale_re(1.0 / n),
            bits,
            seed::codebook_seed(self.seed, cell, role, bits),
        )?
        .codeword;
        self.cache.insert((cell, role, bits), w.clone());
        Ok(w)
    }

    fn feedback(
        &mut self,
        splits: &[BitSplit],
        params: &[CellParams],
    ) -> Result<Vec<QuantizedCsi>> {
        (0..self.topology.cells())
            .map(|k| {
                let h_hat = self.codeword(k, Role::DesiredCodebook, splits[k].b_d)?;
                let (g_hat, g_norm) = match &self.channels.g[k] {
                    Some(g) => {
                        let norm = g.norm();
                        (
                            Some(self.codeword(k, Role::InterferingCodebook, splits[k].b_i)?),
                            Some(norm),
                        )
                    }
                    None => (None, None),
                };
                Ok(QuantizedCsi {
                    h_hat,
                    h_norm: self.channels.h[k].norm(),
                    g_hat,
                    g_norm,
                    rho_d: params[k].rho_d,
                    alpha: params[k].alpha,
                })
            })
            .collect()
    }

    fn full(&self, strategy: Strategy, params: &[CellParams]) -> Result<RateReport> {
        let beams = beamforming::plan_full_csi(strategy, &self.channels, params, &self.topology)?;
        beamforming::sinr(&self.channels, &beams, params, &self.topology)
    }

    fn limited(
        &mut self,
        strategy: Strategy,
        splits: &[BitSplit],
        params: &[CellParams],
    ) -> Result<RateReport> {
        let csi = self.feedback(splits, params)?;
        let views = feedback::exchange(&csi, &self.topology)?;
        let beams = feedback::plan_limited(strategy, &views)?;
        beamforming::sinr(&self.channels, &beams, params, &self.topology)
    }

    /// Interference SNR each user's split is optimized for.
    fn rho_i(&self, params: &[CellParams]) -> Vec<f64> {
        (0..self.topology.cells())
            .map(|k| {
                if self.topology.interferer_of(k).is_some() {
                    params[k].rho_i()
                } else {
                    0.0
                }
            })
            .collect()
    }
}

fn uniform(rho_d: f64, alpha: f64, b_tot: u32, cells: usize) -> Result<Vec<CellParams>> {
    Ok(vec![CellParams::new(rho_d, alpha, b_tot)?; cells])
}

pub(super) struct Driver {
    spec: ExperimentSpec,
    slots: Vec<Slot>,
}

pub(super) fn build(spec: &ExperimentSpec) -> Result<Driver> {
    let mut driver = Driver {
        spec: spec.clone(),
        slots: Vec::new(),
    };
    let mut sink = Sink::Layout(Vec::new());
    driver.run_figure(seed::trial_seed(spec.master_seed, 0), &mut sink)?;
    if let Sink::Layout(slots) = sink {
        driver.slots = slots;
    }
    Ok(driver)
}

impl Driver {
    pub(super) fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub(super) fn columns(&self) -> Vec<String> {
        let cols: &[&str] = match self.spec.figure {
            FigureId::HighSinrApprox | FigureId::CompareStrategies => &["rho_d_db", "alpha"],
            FigureId::SumRateVsK => &["K", "alpha"],
            FigureId::MeanLossVsBd => &["B_d", "alpha"],
            FigureId::SumRateVsBtot => &["B_tot", "alpha"],
            FigureId::SplitVsAlpha => &["alpha_db"],
            FigureId::AsymmetricCells => &["rho_d_db"],
        };
        cols.iter().map(|c| c.to_string()).collect()
    }

    pub(super) fn trial(&self, trial_seed: u64) -> Result<Vec<f64>> {
        let mut sink = Sink::Values(Vec::with_capacity(self.slots.len()));
        self.run_figure(trial_seed, &mut sink)?;
        match sink {
            Sink::Values(values) => {
                debug_assert_eq!(values.len(), self.slots.len());
                Ok(values)
            }
            Sink::Layout(_) => unreachable!(),
        }
    }

    fn run_figure(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        match self.spec.figure {
            FigureId::HighSinrApprox => self.high_sinr(trial_seed, sink),
            FigureId::SumRateVsK => self.sum_rate_vs_k(trial_seed, sink),
            FigureId::MeanLossVsBd => self.mean_loss(trial_seed, sink),
            FigureId::CompareStrategies => self.compare(trial_seed, sink),
            FigureId::SumRateVsBtot => self.sum_rate_vs_btot(trial_seed, sink),
            FigureId::SplitVsAlpha => self.split_vs_alpha(trial_seed, sink),
            FigureId::AsymmetricCells => self.asymmetric(trial_seed, sink),
        }
    }

    fn topology(&self, cells: usize) -> Result<Topology> {
        Topology::new(self.spec.sweep.topology, cells)
    }

    fn ctx(&self, cells: usize, trial_seed: u64) -> Result<TrialCtx> {
        TrialCtx::new(self.topology(cells)?, self.spec.sweep.antennas, trial_seed)
    }

    fn high_sinr(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        let s = &self.spec.sweep;
        let ctx = self.ctx(s.cells[0], trial_seed)?;
        for &alpha in &s.alpha {
            for &rho_db in &s.rho_d_db {
                let params = uniform(db_to_linear(rho_db), alpha, s.b_tot[0], s.cells[0])?;
                let r = ctx.full(Strategy::Gebf, &params)?;
                let point = [rho_db, alpha];
                sink.emit(&point, "sum_exact", r.sum_exact);
                sink.emit(&point, "sum_highsinr", r.sum_highsinr);
                sink.emit(&point, "gap", r.sum_exact - r.sum_highsinr);
            }
        }
        Ok(())
    }

    fn sum_rate_vs_k(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        let s = &self.spec.sweep;
        let rho_d = db_to_linear(s.rho_d_db[0]);
        for &k in &s.cells {
            let ctx = self.ctx(k, trial_seed)?;
            for &alpha in &s.alpha {
                let r = ctx.full(Strategy::Gebf, &uniform(rho_d, alpha, s.b_tot[0], k)?)?;
                sink.emit(&[k as f64, alpha], "gebf_full", r.sum_exact);
            }
        }
        Ok(())
    }

    fn mean_loss(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        let s = &self.spec.sweep;
        let (k, b_tot) = (s.cells[0], s.b_tot[0]);
        let rho_d = db_to_linear(s.rho_d_db[0]);
        let mut ctx = self.ctx(k, trial_seed)?;
        for &alpha in &s.alpha {
            let params = uniform(rho_d, alpha, b_tot, k)?;
            let full = ctx.full(Strategy::Gebf, &params)?.sum_highsinr;
            for &b_d in &s.b_d {
                let splits = vec![BitSplit::with_desired(b_tot, b_d)?; k];
                let lf = ctx.limited(Strategy::Gebf, &splits, &params)?.sum_highsinr;
                sink.emit(&[f64::from(b_d), alpha], "mean_loss", full - lf);
            }
        }
        Ok(())
    }

    /// Every comparison arm at one parameter set, as sum-rates scaled by `scale`.
    #[allow(clippy::too_many_arguments)]
    fn arms(
        &self,
        ctx: &mut TrialCtx,
        params: &[CellParams],
        b_tot: u32,
        point: &[f64],
        full_arms: &[Strategy],
        scale: f64,
        sink: &mut Sink,
    ) -> Result<()> {
        let s = &self.spec.sweep;
        for &strategy in full_arms {
            let name = match strategy {
                Strategy::Gebf => "gebf_full",
                Strategy::Ebf => "ebf_full",
                Strategy::Zf => "zf_full",
            };
            sink.emit(point, name, ctx.full(strategy, params)?.sum_exact * scale);
        }
        let nt = ctx.nt();
        let optimal = ctx
            .rho_i(params)
            .into_iter()
            .map(|rho_i| bitalloc::recommended_split(b_tot, nt, rho_i, s.clamp))
            .collect::<Result<Vec<_>>>()?;
        let cells = params.len();
        sink.emit(
            point,
            "gebf_lf_opt",
            ctx.limited(Strategy::Gebf, &optimal, params)?.sum_exact * scale,
        );
        let even = b_tot.is_multiple_of(2);
        if even {
            let equal = vec![BitSplit::equal(b_tot)?; cells];
            sink.emit(
                point,
                "gebf_lf_equal",
                ctx.limited(Strategy::Gebf, &equal, params)?.sum_exact * scale,
            );
        }
        let desired_only = vec![BitSplit::all_desired(b_tot); cells];
        sink.emit(
            point,
            "ebf_lf",
            ctx.limited(Strategy::Ebf, &desired_only, params)?.sum_exact * scale,
        );
        if even {
            let equal = vec![BitSplit::equal(b_tot)?; cells];
            sink.emit(
                point,
                "zf_lf",
                ctx.limited(Strategy::Zf, &equal, params)?.sum_exact * scale,
            );
        }
        Ok(())
    }

    fn compare(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        let s = &self.spec.sweep;
        let (k, b_tot) = (s.cells[0], s.b_tot[0]);
        let mut ctx = self.ctx(k, trial_seed)?;
        for &rho_db in &s.rho_d_db {
            for &alpha in &s.alpha {
                let params = uniform(db_to_linear(rho_db), alpha, b_tot, k)?;
                let all = [Strategy::Gebf, Strategy::Ebf, Strategy::Zf];
                self.arms(&mut ctx, &params, b_tot, &[rho_db, alpha], &all, 1.0, sink)?;
            }
        }
        Ok(())
    }

    fn sum_rate_vs_btot(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        let s = &self.spec.sweep;
        let k = s.cells[0];
        let rho_d = db_to_linear(s.rho_d_db[0]);
        let mut ctx = self.ctx(k, trial_seed)?;
        for &b_tot in &s.b_tot {
            for &alpha in &s.alpha {
                let params = uniform(rho_d, alpha, b_tot, k)?;
                let point = [f64::from(b_tot), alpha];
                self.arms(
                    &mut ctx,
                    &params,
                    b_tot,
                    &point,
                    &[Strategy::Gebf],
                    1.0,
                    sink,
                )?;
            }
        }
        Ok(())
    }

    fn split_vs_alpha(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        let s = &self.spec.sweep;
        let (k, b_tot) = (s.cells[0], s.b_tot[0]);
        let rho_d = db_to_linear(s.rho_d_db[0]);
        let mut ctx = self.ctx(k, trial_seed)?;
        for &alpha in &s.alpha {
            let params = uniform(rho_d, alpha, b_tot, k)?;
            for b_d in 0..=b_tot {
                let splits = vec![BitSplit::with_desired(b_tot, b_d)?; k];
                let r = ctx.limited(Strategy::Gebf, &splits, &params)?;
                sink.emit(
                    &[alpha_db(alpha)],
                    &format!("sum_rate_bd{b_d}"),
                    r.sum_exact,
                );
            }
        }
        Ok(())
    }

    fn asymmetric(&self, trial_seed: u64, sink: &mut Sink) -> Result<()> {
        let s = &self.spec.sweep;
        let (k, b_tot) = (s.cells[0], s.b_tot[0]);
        let (lo_db, hi_db) = s.alpha_range_db;
        let alphas =
            channel::alpha_profile(AlphaProfile::RandomDb { lo_db, hi_db }, k, trial_seed)?;
        let mut ctx = self.ctx(k, trial_seed)?;
        let per_cell = 1.0 / k as f64;
        for &rho_db in &s.rho_d_db {
            let rho_d = db_to_linear(rho_db);
            let params = alphas
                .iter()
                .map(|&a| CellParams::new(rho_d, a, b_tot))
                .collect::<Result<Vec<_>>>()?;
            self.arms(
                &mut ctx,
                &params,
                b_tot,
                &[rho_db],
                &[Strategy::Gebf],
                per_cell,
                sink,
            )?;
        }
        Ok(())
    }

    /// Deterministic rows and summaries of the stochastic rows.
    pub(super) fn derived_rows(&self, rows: &[ResultRow], trials: usize) -> Result<Vec<ResultRow>> {
        let s = &self.spec.sweep;
        let fixed = |point: Vec<f64>, metric: &str, value: f64| ResultRow {
            point,
            metric: metric.to_string(),
            mean: value,
            stderr: 0.0,
            trials,
        };
        let find = |point: &[f64], metric: &str| {
            rows.iter().find(|r| r.point == point && r.metric == metric)
        };
        let mut out = Vec::new();
        match self.spec.figure {
            FigureId::HighSinrApprox => {
                for r in rows.iter().filter(|r| r.metric == "gap") {
                    let exact = find(&r.point, "sum_exact").expect("emitted with gap").mean;
                    out.push(ResultRow {
                        point: r.point.clone(),
                        metric: "rel_gap".into(),
                        mean: r.mean / exact,
                        stderr: r.stderr / exact.abs(),
                        trials: r.trials,
                    });
                }
            }
            FigureId::MeanLossVsBd => {
                let topology = self.topology(s.cells[0])?;
                let b_tot = s.b_tot[0];
                let rho_d = db_to_linear(s.rho_d_db[0]);
                for &alpha in &s.alpha {
                    let params = (0..topology.cells())
                        .map(|k| {
                            let a = if topology.interferer_of(k).is_some() {
                                alpha
                            } else {
                                0.0
                            };
                            CellParams::new(rho_d, a, b_tot)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    for &b_d in &s.b_d {
                        let splits = vec![BitSplit::with_desired(b_tot, b_d)?; params.len()];
                        let bound = bitalloc::total_bound_general(&splits, &params, s.antennas)?;
                        out.push(fixed(vec![f64::from(b_d), alpha], "bound", bound));
                    }
                }
            }
            FigureId::SplitVsAlpha => {
                let b_tot = s.b_tot[0];
                let rho_d = db_to_linear(s.rho_d_db[0]);
                for &alpha in &s.alpha {
                    let point = vec![alpha_db(alpha)];
                    let split =
                        bitalloc::recommended_split(b_tot, s.antennas, alpha * rho_d, s.clamp)?;
                    out.push(fixed(point.clone(), "b_d_opt", f64::from(split.b_d)));
                    out.push(fixed(point.clone(), "b_i_opt", f64::from(split.b_i)));
                    let mut best = (0u32, f64::NEG_INFINITY);
                    for b_d in 0..=b_tot {
                        let m = find(&point, &format!("sum_rate_bd{b_d}"))
                            .expect("emitted per B_d")
                            .mean;
                        if m > best.1 {
                            best = (b_d, m);
                        }
                    }
                    out.push(fixed(point, "b_d_empirical", f64::from(best.0)));
                }
            }
            _ => {}
        }
        Ok(out)
    }
}
