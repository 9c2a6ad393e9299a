//! Wyner-model topologies and i.i.d. Rayleigh channel draws.
//!
//! Cells and users are indexed from 0. User `k` is served by base `k` over
//! `h[k]` and hears base `k + 1` over `g[k]`; in a circular array the last
//! user hears base 0, in a finite array the last user has no interferer and
//! base 0 disturbs nobody.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{CVec, MAX_ANTENNAS, MIN_ANTENNAS};
use crate::seed::{self, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologyKind {
    Circular,
    FiniteArray,
}

impl std::str::FromStr for TopologyKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circular" => Ok(Self::Circular),
            "finite" | "finite_array" | "linear" => Ok(Self::FiniteArray),
            other => Err(Error::Domain(format!("unknown topology '{other}'"))),
        }
    }
}

impl std::fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Circular => "circular",
            Self::FiniteArray => "finite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    kind: TopologyKind,
    cells: usize,
}

impl Topology {
    pub fn new(kind: TopologyKind, cells: usize) -> Result<Self> {
        if cells < 2 {
            return Err(Error::Domain(format!("need at least 2 cells, got {cells}")));
        }
        Ok(Self { kind, cells })
    }

    pub fn circular(cells: usize) -> Result<Self> {
        Self::new(TopologyKind::Circular, cells)
    }

    pub fn finite(cells: usize) -> Result<Self> {
        Self::new(TopologyKind::FiniteArray, cells)
    }

    pub fn kind(&self) -> TopologyKind {
        self.kind
    }

    pub fn cells(&self) -> usize {
        self.cells
    }

    /// Base station whose signal interferes at user `user`.
    pub fn interferer_of(&self, user: usize) -> Option<usize> {
        match self.kind {
            TopologyKind::Circular => Some((user + 1) % self.cells),
            TopologyKind::FiniteArray => (user + 1 < self.cells).then_some(user + 1),
        }
    }

    /// User disturbed by base `base`.
    pub fn victim_of(&self, base: usize) -> Option<usize> {
        match self.kind {
            TopologyKind::Circular => Some((base + self.cells - 1) % self.cells),
            TopologyKind::FiniteArray => base.checked_sub(1),
        }
    }
}

/// Per-cell link parameters, all linear scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellParams {
    /// Received SNR of the desired signal.
    pub rho_d: f64,
    /// Interfering-to-desired received power ratio.
    pub alpha: f64,
    /// Feedback bits available to the user.
    pub b_tot: u32,
}

impl CellParams {
    pub fn new(rho_d: f64, alpha: f64, b_tot: u32) -> Result<Self> {
        if !(rho_d > 0.0) || !rho_d.is_finite() {
            return Err(Error::Domain(format!(
                "rho_d must be positive, got {rho_d}"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(Self {
            rho_d,
            alpha,
            b_tot,
        })
    }

    /// Received SNR of the interfering signal, `α ρ_d`.
    pub fn rho_i(&self) -> f64 {
        self.alpha * self.rho_d
    }
}

/// One channel realization for every user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSet {
    /// `h[k]`: base `k` → user `k`.
    pub h: Vec<CVec>,
    /// `g[k]`: interfering base → user `k`; `None` where the topology has
    /// no interferer.
    pub g: Vec<Option<CVec>>,
}

impl ChannelSet {
    pub fn cells(&self) -> usize {
        self.h.len()
    }

    pub fn antennas(&self) -> usize {
        self.h.first().map_or(0, CVec::len)
    }
}

/// Draws i.i.d. CN(0, 1) channels. Each user's desired and interfering
/// vectors come from their own sub-seed of `rng_seed`.
pub fn generate(topology: &Topology, nt: usize, rng_seed: u64) -> Result<ChannelSet> {
    if !(MIN_ANTENNAS..=MAX_ANTENNAS).contains(&nt) {
        return Err(Error::Domain(format!(
            "antenna count {nt} outside {MIN_ANTENNAS}..={MAX_ANTENNAS}"
        )));
    }
    let cells = topology.cells();
    let h = (0..cells)
        .map(|k| {
            let mut rng = seed::rng(seed::cell_seed(rng_seed, k, Role::Desired));
            CVec::gaussian_unchecked(nt, &mut rng)
        })
        .collect();
    let g = (0..cells)
        .map(|k| {
            topology.interferer_of(k).map(|_| {
                let mut rng = seed::rng(seed::cell_seed(rng_seed, k, Role::Interfering));
                CVec::gaussian_unchecked(nt, &mut rng)
            })
        })
        .collect();
    Ok(ChannelSet { h, g })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AlphaProfile {
    Uniform(f64),
    /// `α_k = 10^(ᾶ_k/10)` with `ᾶ_k ~ U[lo_db, hi_db]`.
    RandomDb {
        lo_db: f64,
        hi_db: f64,
    },
}

pub fn alpha_profile(profile: AlphaProfile, cells: usize, rng_seed: u64) -> Result<Vec<f64>> {
    match profile {
        AlphaProfile::Uniform(alpha) => {
            if !(0.0..=1.0).contains(&alpha) {
                return Err(Error::Domain(format!(
                    "alpha must lie in [0, 1], got {alpha}"
                )));
            }
            Ok(vec![alpha; cells])
        }
        AlphaProfile::RandomDb { lo_db, hi_db } => {
            if hi_db > 0.0 {
                return Err(Error::Domain(format!(
                    "alpha upper bound {hi_db} dB exceeds 0 dB (alpha <= 1)"
                )));
            }
            if !(lo_db <= hi_db) || !lo_db.is_finite() {
                return Err(Error::Domain(format!(
                    "empty alpha range [{lo_db}, {hi_db}] dB"
                )));
            }
            let mut rng = seed::rng(seed::cell_seed(rng_seed, 0, Role::Alpha));
            Ok((0..cells)
                .map(|_| {
                    let u: f64 = rng.random();
                    db_to_linear(lo_db + (hi_db - lo_db) * u)
                })
                .collect())
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
