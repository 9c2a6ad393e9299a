//! Full-CSI transmit strategies and exact SINR / sum-rate evaluation.
//!
//! Base `b` needs its own channel `h[b]`, the channel `g[v]` it leaks into
//! at its victim user `v`, and that user's interference SNR `α_v ρ_v`. User
//! `k`'s SINR in turn needs the beam of its interferer. [`plan_full_csi`]
//! and [`sinr`] are the only places that resolve those neighbor indices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channel::{CellParams, ChannelSet, Topology};
use crate::error::{Error, Result};
use crate::numerics::{rank1_gen_eigvec, rayleigh_quotient, CVec};

/// Sine of the angle between `h` and `g` below which zero forcing is refused.
pub const ZF_MIN_SINE: f64 = 1e-6;

/// Unit-norm transmit beam, phase-normalized so that its first nonzero
/// entry is real and positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Beamformer(CVec);

impl Beamformer {
    /// Normalizes `v` and fixes its phase.
    pub fn from_direction(v: &CVec) -> Result<Self> {
        v.unit_canonical()
            .map(Self)
            .ok_or(Error::DegenerateChannel("beam direction"))
    }

    pub fn vector(&self) -> &CVec {
        &self.0
    }

    /// `|cᵀ f|²`, the power a channel `c` collects from this beam.
    pub fn gain(&self, channel: &CVec) -> f64 {
        channel.dot_t(&self.0).norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Generalized-eigenvector beamforming (maximum SLNR).
    Gebf,
    /// Eigen-beamforming, matched to the desired channel only.
    Ebf,
    /// Zero-forcing toward the victim user.
    Zf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub sinr: Vec<f64>,
    /// `log₂(1 + SINR)` per user.
    pub rate_exact: Vec<f64>,
    /// `log₂(SINR)` per user.
    pub rate_highsinr: Vec<f64>,
    pub sum_exact: f64,
    pub sum_highsinr: f64,
}

impl RateReport {
    pub fn from_sinr(sinr: Vec<f64>) -> Self {
        let rate_exact: Vec<f64> = sinr
            .iter()
            .map(|s| s.ln_1p() / std::f64::consts::LN_2)
            .collect();
        let rate_highsinr: Vec<f64> = sinr.iter().map(|s| s.log2()).collect();
        Self {
            sum_exact: rate_exact.iter().sum(),
            sum_highsinr: rate_highsinr.iter().sum(),
            sinr,
            rate_exact,
            rate_highsinr,
        }
    }

    pub fn mean_exact(&self) -> f64 {
        self.sum_exact / self.sinr.len() as f64
    }
}

fn check_shapes(
    channels: &ChannelSet,
    params: &[CellParams],
    topology: &Topology,
    beams: Option<&[Beamformer]>,
) -> Result<()> {
    let k = topology.cells();
    if channels.h.len() != k || channels.g.len() != k || params.len() != k {
        return Err(Error::Shape(format!(
            "{k} cells but {} desired channels, {} interfering channels, {} parameter sets",
            channels.h.len(),
            channels.g.len(),
            params.len()
        )));
    }
    if let Some(beams) = beams {
        if beams.len() != k {
            return Err(Error::Shape(format!("{k} cells but {} beams", beams.len())));
        }
    }
    for user in 0..k {
        if topology.interferer_of(user).is_some() != channels.g[user].is_some() {
            return Err(Error::Shape(format!(
                "interfering channel presence of user {user} disagrees with the topology"
            )));
        }
    }
    Ok(())
}

/// `SINR_k = ρ_k |h_kᵀ f_k|² / (ρ_k α_k |g_kᵀ f_{k+1}|² + 1)`.
pub fn sinr(
    channels: &ChannelSet,
    beams: &[Beamformer],
    params: &[CellParams],
    topology: &Topology,
) -> Result<RateReport> {
    check_shapes(channels, params, topology, Some(beams))?;
    let sinr = (0..topology.cells())
        .map(|k| {
            let p = &params[k];
            let signal = p.rho_d * beams[k].gain(&channels.h[k]);
            let leak = match (topology.interferer_of(k), &channels.g[k]) {
                (Some(j), Some(g)) => p.rho_i() * beams[j].gain(g),
                _ => 0.0,
            };
            signal / (leak + 1.0)
        })
        .collect();
    Ok(RateReport::from_sinr(sinr))
}

/// Eigen-beamforming: `f = h̄ / ‖h‖`.
pub fn ebf(h: &CVec) -> Result<Beamformer> {
    if !(h.norm_sqr() > 0.0) {
        return Err(Error::DegenerateChannel("h"));
    }
    Beamformer::from_direction(&h.conj())
}

/// Zero-forcing: first column of the pseudo-inverse of the row stack
/// `[hᵀ; gᵀ]`, normalized.
pub fn zf(h: &CVec, g: &CVec) -> Result<Beamformer> {
    if h.len() != g.len() {
        return Err(Error::Shape(format!(
            "h has {} entries, g has {}",
            h.len(),
            g.len()
        )));
    }
    let (hh, gg) = (h.norm_sqr(), g.norm_sqr());
    if !(hh > 0.0) {
        return Err(Error::DegenerateChannel("h"));
    }
    if !(gg > 0.0) {
        return Err(Error::DegenerateChannel("g"));
    }
    let hg = h.dot_h(g);
    let sin2 = 1.0 - hg.norm_sqr() / (hh * gg);
    if !(sin2 >= ZF_MIN_SINE * ZF_MIN_SINE) {
        return Err(Error::RankDeficient(format!(
            "desired and interfering channels are parallel (sin = {:.3e})",
            sin2.max(0.0).sqrt()
        )));
    }
    // A = [hᵀ; gᵀ], A Aᴴ = [[‖h‖², gᴴh], [hᴴg, ‖g‖²]]; first column of
    // (A Aᴴ)⁻¹ is (‖g‖², −hᴴg)/det, and A† = Aᴴ (A Aᴴ)⁻¹ with Aᴴ = [h̄ ḡ].
    let det = hh * gg - hg.norm_sqr();
    let c_h = Complex64::new(gg / det, 0.0);
    let c_g = -hg / det;
    let column = &h.conj().scale(c_h) + &g.conj().scale(c_g);
    Beamformer::from_direction(&column)
}

/// Generalized-eigenvector beam for a base with own channel `h_own`,
/// leaking over `g_caused` into a user with interference SNR `rho_i_prev`.
pub fn gebf(h_own: &CVec, g_caused: &CVec, rho_i_prev: f64) -> Result<Beamformer> {
    let sol = rank1_gen_eigvec(&h_own.conj(), &g_caused.conj(), rho_i_prev)?;
    Ok(Beamformer(sol.f))
}

/// Signal-to-leakage-plus-noise quotient `|hᵀf|² / (ρ |gᵀf|² + 1)` of a beam.
pub fn slnr(f: &Beamformer, h_own: &CVec, g_caused: &CVec, rho_i_prev: f64) -> f64 {
    rayleigh_quotient(f.vector(), &h_own.conj(), &g_caused.conj(), rho_i_prev)
}

/// Beams for every base under `strategy`. A base without a victim (the
/// first base of a finite array) always uses eigen-beamforming.
pub fn plan_full_csi(
    strategy: Strategy,
    channels: &ChannelSet,
    params: &[CellParams],
    topology: &Topology,
) -> Result<Vec<Beamformer>> {
    check_shapes(channels, params, topology, None)?;
    (0..topology.cells())
        .map(|base| {
            let h = &channels.h[base];
            let victim = topology.victim_of(base);
            match (strategy, victim) {
                (Strategy::Ebf, _) | (_, None) => ebf(h),
                (Strategy::Gebf, Some(v)) => {
                    let g = channels.g[v].as_ref().expect("checked by check_shapes");
                    gebf(h, g, params[v].rho_i())
                }
                (Strategy::Zf, Some(v)) => {
                    let g = channels.g[v].as_ref().expect("checked by check_shapes");
                    zf(h, g)
                }
            }
        })
        .collect()
}
