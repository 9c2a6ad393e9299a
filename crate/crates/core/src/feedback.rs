//! Random vector quantization (RVQ) feedback and the backhaul exchange.
//!
//! User `k` quantizes the direction of its desired channel `h[k]` with a
//! `B_d`-bit codebook and the direction of its interfering channel `g[k]`
//! with a separate `B_i`-bit codebook, and feeds both back to base `k`
//! together with the exact channel norms. Base `k` forwards the interfering
//! record to the base that causes the interference, so every base ends up
//! knowing its own channel and the channel it leaks into.

use serde::{Deserialize, Serialize};

use crate::beamforming::{self, Beamformer, Strategy};
use crate::bitalloc::BitSplit;
use crate::channel::{CellParams, Topology};
use crate::error::{Error, Result};
use crate::numerics::CVec;
use crate::seed;

/// Largest codebook this module will allocate.
pub const MAX_CODEBOOK_BITS: u32 = 20;

const UNIT_NORM_TOL: f64 = 1e-9;

/// `2^bits` unit vectors drawn independently and isotropically.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    bits: u32,
    vectors: Vec<CVec>,
}

impl Codebook {
    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[CVec] {
        &self.vectors
    }
}

fn check_bits(bits: u32) -> Result<()> {
    if bits > MAX_CODEBOOK_BITS {
        return Err(Error::BudgetTooLarge {
            bits,
            max: MAX_CODEBOOK_BITS,
        });
    }
    Ok(())
}

fn draw_codeword<R: rand::Rng>(nt: usize, rng: &mut R) -> CVec {
    loop {
        let v = CVec::gaussian_unchecked(nt, rng);
        let n = v.norm();
        if n > 0.0 {
            return v.scale_re(1.0 / n);
        }
    }
}

/// Normalized i.i.d. complex Gaussian vectors, deterministic per seed.
pub fn draw_codebook(bits: u32, nt: usize, rng_seed: u64) -> Result<Codebook> {
    check_bits(bits)?;
    CVec::zeros(nt)?;
    let mut rng = seed::rng(rng_seed);
    let vectors = (0..1usize << bits)
        .map(|_| draw_codeword(nt, &mut rng))
        .collect();
    Ok(Codebook { bits, vectors })
}

/// Result of quantizing one direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Quantized {
    pub index: usize,
    pub codeword: CVec,
    /// `|directionᴴ codeword|²`
    pub cos2: f64,
}

fn check_unit(direction: &CVec) -> Result<()> {
    if (direction.norm() - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::Domain(format!(
            "quantizer input must be unit norm, got norm {}",
            direction.norm()
        )));
    }
    Ok(())
}

/// Picks the codeword maximizing `|directionᴴ w|²`; the lowest index wins ties.
pub fn quantize(direction: &CVec, cb: &Codebook) -> Result<Quantized> {
    check_unit(direction)?;
    let (index, cos2) = cb
        .vectors
        .iter()
        .map(|w| direction.dot_h(w).norm_sqr())
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, c)| {
            if c > best.1 {
                (i, c)
            } else {
                best
            }
        });
    Ok(Quantized {
        index,
        codeword: cb.vectors[index].clone(),
        cos2,
    })
}

/// Same result as `quantize(direction, &draw_codebook(bits, nt, seed)?)`
/// without materializing the codebook.
pub fn quantize_streaming(direction: &CVec, bits: u32, rng_seed: u64) -> Result<Quantized> {
    check_bits(bits)?;
    check_unit(direction)?;
    let mut rng = seed::rng(rng_seed);
    let mut best: Option<Quantized> = None;
    for index in 0..1usize << bits {
        let w = draw_codeword(direction.len(), &mut rng);
        let cos2 = direction.dot_h(&w).norm_sqr();
        if best.as_ref().is_none_or(|b| cos2 > b.cos2) {
            best = Some(Quantized {
                index,
                codeword: w,
                cos2,
            });
        }
    }
    Ok(best.expect("codebooks hold at least one codeword"))
}

/// Quantized channel state fed back by one user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantizedCsi {
    pub h_hat: CVec,
    pub h_norm: f64,
    /// Absent when the user has no interferer.
    pub g_hat: Option<CVec>,
    pub g_norm: Option<f64>,
    pub rho_d: f64,
    pub alpha: f64,
}

impl QuantizedCsi {
    pub fn rho_i(&self) -> f64 {
        self.alpha * self.rho_d
    }
}

/// Codebook seeds for one user's two codebooks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeedbackSeeds {
    pub desired: u64,
    pub interfering: u64,
}

impl FeedbackSeeds {
    /// Codebooks of user `cell` in trial `trial_seed`, keyed by their sizes.
    pub fn for_user(trial_seed: u64, cell: usize, split: BitSplit) -> Self {
        Self {
            desired: seed::codebook_seed(trial_seed, cell, seed::Role::DesiredCodebook, split.b_d),
            interfering: seed::codebook_seed(
                trial_seed,
                cell,
                seed::Role::InterferingCodebook,
                split.b_i,
            ),
        }
    }
}

fn direction_of(v: &CVec, what: &'static str) -> Result<(CVec, f64)> {
    let n = v.norm();
    if !(n > 0.0) {
        return Err(Error::DegenerateChannel(what));
    }
    Ok((v.scale_re(1.0 / n), n))
}

/// Quantizes `h/‖h‖` with a fresh `B_d`-bit codebook and `g/‖g‖` with a
/// fresh `B_i`-bit codebook. Norms are passed through exactly.
pub fn user_feedback(
    h: &CVec,
    g_next: Option<&CVec>,
    split: BitSplit,
    params: &CellParams,
    seeds: FeedbackSeeds,
) -> Result<QuantizedCsi> {
    if split.total() != params.b_tot {
        return Err(Error::Domain(format!(
            "bit split {}+{} does not add up to the budget {}",
            split.b_d, split.b_i, params.b_tot
        )));
    }
    let (h_dir, h_norm) = direction_of(h, "h")?;
    let h_hat = quantize_streaming(&h_dir, split.b_d, seeds.desired)?.codeword;
    let (g_hat, g_norm) = match g_next {
        Some(g) => {
            let (g_dir, g_norm) = direction_of(g, "g")?;
            let q = quantize_streaming(&g_dir, split.b_i, seeds.interfering)?;
            (Some(q.codeword), Some(g_norm))
        }
        None => (None, None),
    };
    Ok(QuantizedCsi {
        h_hat,
        h_norm,
        g_hat,
        g_norm,
        rho_d: params.rho_d,
        alpha: params.alpha,
    })
}

/// Quantized interfering channel of the victim user, as forwarded over the
/// backhaul to the base that causes the interference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterferenceRecord {
    pub g_hat: CVec,
    pub g_norm: f64,
    pub rho_d: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseStationView {
    pub h_hat: CVec,
    pub h_norm: f64,
    pub rho_d: f64,
    pub alpha: f64,
    pub caused_interference: Option<InterferenceRecord>,
}

impl BaseStationView {
    /// Interference SNR of the victim user, zero without a victim.
    pub fn rho_i_prev(&self) -> f64 {
        self.caused_interference
            .as_ref()
            .map_or(0.0, |r| r.alpha * r.rho_d)
    }
}

/// Routes every user's feedback to the bases that need it.
pub fn exchange(
    all_feedback: &[QuantizedCsi],
    topology: &Topology,
) -> Result<Vec<BaseStationView>> {
    if all_feedback.len() != topology.cells() {
        return Err(Error::Shape(format!(
            "{} feedback records for {} cells",
            all_feedback.len(),
            topology.cells()
        )));
    }
    (0..topology.cells())
        .map(|base| {
            let own = &all_feedback[base];
            let caused_interference = match topology.victim_of(base) {
                None => None,
                Some(v) => {
                    let rec = &all_feedback[v];
                    match (&rec.g_hat, rec.g_norm) {
                        (Some(g_hat), Some(g_norm)) => Some(InterferenceRecord {
                            g_hat: g_hat.clone(),
                            g_norm,
                            rho_d: rec.rho_d,
                            alpha: rec.alpha,
                        }),
                        _ => {
                            return Err(Error::Shape(format!(
                                "user {v} sent no interfering-channel record"
                            )))
                        }
                    }
                }
            };
            Ok(BaseStationView {
                h_hat: own.h_hat.clone(),
                h_norm: own.h_norm,
                rho_d: own.rho_d,
                alpha: own.alpha,
                caused_interference,
            })
        })
        .collect()
}

/// Rebuilds the per-user records from the per-base views.
pub fn collect(views: &[BaseStationView], topology: &Topology) -> Result<Vec<QuantizedCsi>> {
    if views.len() != topology.cells() {
        return Err(Error::Shape(format!(
            "{} views for {} cells",
            views.len(),
            topology.cells()
        )));
    }
    (0..topology.cells())
        .map(|user| {
            let own = &views[user];
            let forwarded = match topology.interferer_of(user) {
                Some(j) => Some(views[j].caused_interference.as_ref().ok_or_else(|| {
                    Error::Shape(format!("base {j} holds no record for user {user}"))
                })?),
                None => None,
            };
            Ok(QuantizedCsi {
                h_hat: own.h_hat.clone(),
                h_norm: own.h_norm,
                g_hat: forwarded.map(|r| r.g_hat.clone()),
                g_norm: forwarded.map(|r| r.g_norm),
                rho_d: own.rho_d,
                alpha: own.alpha,
            })
        })
        .collect()
}

/// Beam of one base from quantized CSI: the generalized eigenvector of
/// `‖h‖² ĥ̄ĥᵀ` against `ρ ‖g‖² ĝ̄ĝᵀ + I`, or eigen-beamforming on `ĥ` when
/// the base has no victim.
pub fn gebf_limited(view: &BaseStationView) -> Result<Beamformer> {
    let h = view.h_hat.scale_re(view.h_norm);
    match &view.caused_interference {
        Some(rec) => beamforming::gebf(&h, &rec.g_hat.scale_re(rec.g_norm), view.rho_i_prev()),
        None => beamforming::ebf(&h),
    }
}

/// Beams for every base from the exchanged views.
pub fn plan_limited(strategy: Strategy, views: &[BaseStationView]) -> Result<Vec<Beamformer>> {
    views
        .iter()
        .map(|view| {
            let h = view.h_hat.scale_re(view.h_norm);
            match (strategy, &view.caused_interference) {
                (Strategy::Gebf, _) => gebf_limited(view),
                (Strategy::Ebf, _) | (Strategy::Zf, None) => beamforming::ebf(&h),
                (Strategy::Zf, Some(rec)) => beamforming::zf(&h, &rec.g_hat.scale_re(rec.g_norm)),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beamforming::{gebf, plan_full_csi};
    use crate::channel::{generate, Topology};

    #[test]
    fn codebook_sizes_and_norms() {
        let cb = draw_codebook(0, 3, 1).unwrap();
        assert_eq!(cb.len(), 1);
        let cb = draw_codebook(6, 4, 2).unwrap();
        assert_eq!(cb.len(), 64);
        assert!(cb.vectors().iter().all(|w| (w.norm() - 1.0).abs() < 1e-14));
        assert_ne!(
            draw_codebook(4, 2, 5).unwrap(),
            draw_codebook(4, 2, 6).unwrap()
        );
        assert_eq!(
            draw_codebook(4, 2, 5).unwrap(),
            draw_codebook(4, 2, 5).unwrap()
        );
        assert_eq!(
            draw_codebook(21, 2, 0),
            Err(Error::BudgetTooLarge {
                bits: 21,
                max: MAX_CODEBOOK_BITS
            })
        );
    }

    #[test]
    fn codeword_entries_have_power_one_over_nt() {
        for nt in [2usize, 4] {
            let mut total = 0.0;
            let mut count = 0;
            for s in 0..200 {
                for w in draw_codebook(8, nt, s).unwrap().vectors() {
                    total += w.norm_sqr();
                    count += nt;
                }
            }
            let mean = total / count as f64;
            assert!((mean * nt as f64 - 1.0).abs() < 0.01);
            // per-entry power, not just the norm
            let first: f64 = (0..200)
                .flat_map(|s| draw_codebook(8, nt, 1000 + s).unwrap().vectors().to_vec())
                .map(|w| w[0].norm_sqr())
                .sum::<f64>()
                / (200.0 * 256.0);
            assert!((first * nt as f64 - 1.0).abs() < 0.01, "{first}");
        }
    }

    #[test]
    fn quantize_finds_exact_member() {
        let cb = draw_codebook(5, 3, 9).unwrap();
        let target = cb.vectors()[17].clone();
        let q = quantize(&target, &cb).unwrap();
        assert_eq!(q.index, 17);
        assert!((q.cos2 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn quantize_single_codeword() {
        let cb = draw_codebook(0, 2, 3).unwrap();
        let mut rng = seed::rng(1);
        for _ in 0..20 {
            let d = CVec::gaussian(2, &mut rng).unwrap();
            let d = d.scale_re(1.0 / d.norm());
            assert_eq!(quantize(&d, &cb).unwrap().index, 0);
        }
    }

    #[test]
    fn quantize_rejects_non_unit_input() {
        let cb = draw_codebook(2, 2, 3).unwrap();
        let d = CVec::from_parts(&[(1.0, 0.0), (1.0, 0.0)]).unwrap();
        assert!(matches!(quantize(&d, &cb), Err(Error::Domain(_))));
    }

    #[test]
    fn quantize_ties_go_to_lowest_index() {
        let w = CVec::from_parts(&[(1.0, 0.0), (0.0, 0.0)]).unwrap();
        let cb = Codebook {
            bits: 1,
            vectors: vec![w.clone(), w.clone()],
        };
        assert_eq!(quantize(&w, &cb).unwrap().index, 0);
    }

    #[test]
    fn streaming_matches_materialized() {
        let mut rng = seed::rng(77);
        for bits in [0, 1, 5, 9] {
            let d = CVec::gaussian(3, &mut rng).unwrap();
            let d = d.scale_re(1.0 / d.norm());
            let cb = draw_codebook(bits, 3, 1234 + u64::from(bits)).unwrap();
            assert_eq!(
                quantize(&d, &cb).unwrap(),
                quantize_streaming(&d, bits, 1234 + u64::from(bits)).unwrap()
            );
        }
    }

    fn two_cell_feedback(
        split: BitSplit,
        trial: u64,
    ) -> (Topology, crate::channel::ChannelSet, Vec<QuantizedCsi>) {
        let topo = Topology::circular(2).unwrap();
        let set = generate(&topo, 2, trial).unwrap();
        let params = CellParams::new(10.0, 1.0, split.total()).unwrap();
        let fb = (0..2)
            .map(|k| {
                user_feedback(
                    &set.h[k],
                    set.g[k].as_ref(),
                    split,
                    &params,
                    FeedbackSeeds::for_user(trial, k, split),
                )
                .unwrap()
            })
            .collect();
        (topo, set, fb)
    }

    #[test]
    fn feedback_is_deterministic_and_exact_in_norm() {
        let split = BitSplit::new(4, 3);
        let (_, set, a) = two_cell_feedback(split, 5);
        let (_, _, b) = two_cell_feedback(split, 5);
        assert_eq!(a, b);
        assert_eq!(a[0].h_norm, set.h[0].norm());
        assert_eq!(a[1].g_norm, Some(set.g[1].as_ref().unwrap().norm()));
    }

    #[test]
    fn feedback_rejects_inconsistent_split() {
        let topo = Topology::circular(2).unwrap();
        let set = generate(&topo, 2, 1).unwrap();
        let params = CellParams::new(10.0, 1.0, 8).unwrap();
        let split = BitSplit::new(4, 3);
        let seeds = FeedbackSeeds::for_user(1, 0, split);
        assert!(user_feedback(&set.h[0], set.g[0].as_ref(), split, &params, seeds).is_err());
    }

    #[test]
    fn zero_interfering_bits_gives_one_random_codeword() {
        let split = BitSplit::new(6, 0);
        let (_, _, fb) = two_cell_feedback(split, 3);
        let seeds = FeedbackSeeds::for_user(3, 0, split);
        let only = draw_codebook(0, 2, seeds.interfering).unwrap();
        assert_eq!(fb[0].g_hat.as_ref(), Some(&only.vectors()[0]));
    }

    #[test]
    fn many_bits_give_accurate_directions() {
        let split = BitSplit::new(10, 10);
        let mut good = 0;
        let trials = 200;
        for t in 0..trials {
            let (_, set, fb) = two_cell_feedback(split, 100 + t);
            let ch = set.h[0].cos2_angle(&fb[0].h_hat);
            let cg = set.g[0]
                .as_ref()
                .unwrap()
                .cos2_angle(fb[0].g_hat.as_ref().unwrap());
            if ch > 0.99 && cg > 0.99 {
                good += 1;
            }
        }
        assert!(good as f64 / trials as f64 > 0.99, "{good}/{trials}");
    }

    #[test]
    fn exchange_routes_to_the_interfering_base() {
        let (topo, _, fb) = two_cell_feedback(BitSplit::new(3, 3), 9);
        let views = exchange(&fb, &topo).unwrap();
        // base 0 leaks into user 1 under wrap-around
        let rec = views[0].caused_interference.as_ref().unwrap();
        assert_eq!(Some(&rec.g_hat), fb[1].g_hat.as_ref());
        assert_eq!(views[0].h_hat, fb[0].h_hat);
        assert_eq!(views[1].rho_i_prev(), fb[0].rho_i());
        assert_eq!(collect(&views, &topo).unwrap(), fb);
    }

    #[test]
    fn exchange_on_finite_array() {
        let topo = Topology::finite(3).unwrap();
        let set = generate(&topo, 2, 4).unwrap();
        let params = CellParams::new(10.0, 0.5, 6).unwrap();
        let split = BitSplit::new(3, 3);
        let fb: Vec<_> = (0..3)
            .map(|k| {
                user_feedback(
                    &set.h[k],
                    set.g[k].as_ref(),
                    split,
                    &params,
                    FeedbackSeeds::for_user(4, k, split),
                )
                .unwrap()
            })
            .collect();
        assert!(fb[2].g_hat.is_none());
        let views = exchange(&fb, &topo).unwrap();
        assert!(views[0].caused_interference.is_none());
        assert_eq!(views[0].rho_i_prev(), 0.0);
        assert_eq!(collect(&views, &topo).unwrap(), fb);
        let lf = gebf_limited(&views[0]).unwrap();
        assert!((lf.vector() - beamforming::ebf(&fb[0].h_hat).unwrap().vector()).norm() < 1e-15);
        assert!(matches!(exchange(&fb[..2], &topo), Err(Error::Shape(_))));
    }

    #[test]
    fn perfect_quantization_reproduces_full_csi() {
        let topo = Topology::circular(3).unwrap();
        let set = generate(&topo, 4, 12).unwrap();
        let params = vec![CellParams::new(10.0, 0.7, 0).unwrap(); 3];
        let fb: Vec<_> = (0..3)
            .map(|k| {
                let g = set.g[k].as_ref().unwrap();
                QuantizedCsi {
                    h_hat: set.h[k].scale_re(1.0 / set.h[k].norm()),
                    h_norm: set.h[k].norm(),
                    g_hat: Some(g.scale_re(1.0 / g.norm())),
                    g_norm: Some(g.norm()),
                    rho_d: 10.0,
                    alpha: 0.7,
                }
            })
            .collect();
        let views = exchange(&fb, &topo).unwrap();
        for strategy in [Strategy::Gebf, Strategy::Ebf, Strategy::Zf] {
            let lf = plan_limited(strategy, &views).unwrap();
            let full = plan_full_csi(strategy, &set, &params, &topo).unwrap();
            for (a, b) in lf.iter().zip(&full) {
                assert!((a.vector() - b.vector()).norm() < 1e-10);
            }
        }
        let b0 = gebf(&set.h[0], set.g[2].as_ref().unwrap(), 7.0).unwrap();
        assert!((gebf_limited(&views[0]).unwrap().vector() - b0.vector()).norm() < 1e-10);
    }
}
