//! Upper bounds on the mean sum-rate loss caused by RVQ feedback, and the
//! split of a per-user feedback budget between the desired and interfering
//! channel directions.
//!
//! Per cell the loss is bounded by `T_d(B_d) + T_i(B_i)`, with
//! `T_d = −E{log₂ cos²}` for the desired direction and
//! `T_i = log₂(1 + ρ_i Nt 2^B_i β(2^B_i, Nt/(Nt−1)))` for the interfering
//! one. For two antennas this collapses to
//! `Δ̃(B_d) = log₂(1 + 2ρ_i/(2^(B_tot−B_d) + 1)) + 2^(−B_d) log₂ e`,
//! which is convex in `B_d`, so the best integer split is the floor or the
//! ceiling of its stationary point.

use std::f64::consts::LOG2_E;

use serde::{Deserialize, Serialize};

use crate::channel::CellParams;
use crate::error::{Error, Result};
use crate::numerics::{expected_log2_cos2, expected_sin2_min};

/// Bits spent on the desired (`b_d`) and interfering (`b_i`) directions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BitSplit {
    pub b_d: u32,
    pub b_i: u32,
}

impl BitSplit {
    pub fn new(b_d: u32, b_i: u32) -> Self {
        Self { b_d, b_i }
    }

    pub fn total(&self) -> u32 {
        self.b_d + self.b_i
    }

    /// Every bit on the desired channel.
    pub fn all_desired(b_tot: u32) -> Self {
        Self::new(b_tot, 0)
    }

    /// `B_tot/2` bits each; odd budgets are rejected.
    pub fn equal(b_tot: u32) -> Result<Self> {
        if !b_tot.is_multiple_of(2) {
            return Err(Error::Domain(format!(
                "cannot split an odd budget of {b_tot} bits equally"
            )));
        }
        Ok(Self::new(b_tot / 2, b_tot / 2))
    }

    /// `b_d` desired bits out of `b_tot`.
    pub fn with_desired(b_tot: u32, b_d: u32) -> Result<Self> {
        if b_d > b_tot {
            return Err(Error::Domain(format!(
                "B_d = {b_d} exceeds B_tot = {b_tot}"
            )));
        }
        Ok(Self::new(b_d, b_tot - b_d))
    }
}

impl std::fmt::Display for BitSplit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "B_d={} B_i={}", self.b_d, self.b_i)
    }
}

/// Bounds on the two loss terms of one cell, in bits/s/Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBound {
    pub t_d_bound: f64,
    pub t_i_bound: f64,
    pub total: f64,
}

/// Admissible range for `B_d` (inclusive), e.g. `[3, B_tot − 3]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitClamp {
    pub lo: u32,
    pub hi: u32,
}

impl SplitClamp {
    pub fn new(lo: u32, hi: u32) -> Result<Self> {
        if lo > hi {
            return Err(Error::Domain(format!("empty clamp range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `[margin, B_tot − margin]`, or `None` if that range is empty.
    pub fn symmetric(b_tot: u32, margin: u32) -> Option<Self> {
        (2 * margin <= b_tot).then(|| Self {
            lo: margin,
            hi: b_tot - margin,
        })
    }

    /// Intersection with `[0, b_tot]`; a range lying wholly above `b_tot`
    /// collapses onto `b_tot`.
    fn within(self, b_tot: u32) -> (u32, u32) {
        (self.lo.min(b_tot), self.hi.min(b_tot))
    }
}

/// Bound on the loss from quantizing the desired direction with `b_d` bits.
pub fn t_d_bound(b_d: u32, nt: usize) -> f64 {
    (-expected_log2_cos2(b_d, nt)).max(0.0)
}

/// Bound on the loss from quantizing the interfering direction with `b_i` bits.
pub fn t_i_bound(b_i: u32, nt: usize, rho_i: f64) -> f64 {
    let nt_f = nt as f64;
    (rho_i * nt_f * expected_sin2_min(b_i, nt)).ln_1p() * LOG2_E
}

pub fn loss_bound(split: BitSplit, nt: usize, rho_i: f64) -> LossBound {
    let t_d_bound = t_d_bound(split.b_d, nt);
    let t_i_bound = t_i_bound(split.b_i, nt, rho_i);
    LossBound {
        t_d_bound,
        t_i_bound,
        total: t_d_bound + t_i_bound,
    }
}

fn check_rho(rho_i: f64) -> Result<()> {
    if !(rho_i >= 0.0) || !rho_i.is_finite() {
        return Err(Error::Domain(format!(
            "rho_i must be finite and >= 0, got {rho_i}"
        )));
    }
    Ok(())
}

/// Two-antenna per-cell bound `Δ̃` at a real-valued `b_d`.
pub fn delta_tilde(b_d: f64, b_tot: u32, rho_i: f64) -> Result<f64> {
    check_rho(rho_i)?;
    let total = f64::from(b_tot);
    if !(0.0..=total).contains(&b_d) {
        return Err(Error::Domain(format!("B_d = {b_d} outside [0, {b_tot}]")));
    }
    let interfering = (2.0 * rho_i / ((total - b_d).exp2() + 1.0)).ln_1p() * LOG2_E;
    Ok(interfering + (-b_d).exp2() * LOG2_E)
}

/// `∂Δ̃/∂B_d`.
pub fn delta_tilde_slope(b_d: f64, b_tot: u32, rho_i: f64) -> f64 {
    let y = (f64::from(b_tot) - b_d).exp2();
    2.0 * rho_i * y / ((y + 2.0 * rho_i + 1.0) * (1.0 + y)) - (-b_d).exp2()
}

/// Real-valued minimizer of `Δ̃` on `[0, b_tot]`.
///
/// The slope vanishes where `2^(B_tot−B_d) = √(ρ² + ρ 2^(B_tot+1)) − (1 + ρ)`;
/// when that root is at most 1 the slope is negative on the whole interval
/// and the minimizer is `b_tot`.
pub fn real_optimum(b_tot: u32, rho_i: f64) -> f64 {
    let total = f64::from(b_tot);
    let root = (rho_i * rho_i + rho_i * (total + 1.0).exp2()).sqrt() - (1.0 + rho_i);
    if root <= 1.0 {
        total
    } else {
        (total - root.log2()).clamp(0.0, total)
    }
}

/// Integer split minimizing `Δ̃`: clamp the real optimum to the admissible
/// range, then keep the better of its floor and ceiling (the smaller `B_d`
/// on a tie).
pub fn optimal_split(b_tot: u32, rho_i: f64, clamp: Option<SplitClamp>) -> Result<BitSplit> {
    check_rho(rho_i)?;
    let (lo, hi) = clamp.map_or((0, b_tot), |c| c.within(b_tot));
    let real = real_optimum(b_tot, rho_i).clamp(f64::from(lo), f64::from(hi));
    let floor = real.floor() as u32;
    let ceil = real.ceil() as u32;
    let b_d = if floor == ceil
        || delta_tilde(f64::from(floor), b_tot, rho_i)?
            <= delta_tilde(f64::from(ceil), b_tot, rho_i)?
    {
        floor
    } else {
        ceil
    };
    BitSplit::with_desired(b_tot, b_d)
}

/// Exhaustive search over every integer `B_d`; smallest `B_d` on ties.
pub fn brute_force_split(b_tot: u32, rho_i: f64) -> Result<BitSplit> {
    check_rho(rho_i)?;
    let mut best = (0, f64::INFINITY);
    for b_d in 0..=b_tot {
        let v = delta_tilde(f64::from(b_d), b_tot, rho_i)?;
        if v < best.1 {
            best = (b_d, v);
        }
    }
    BitSplit::with_desired(b_tot, best.0)
}

/// Integer search over the general-`Nt` bound `T_d + T_i`, for antenna
/// counts where no closed-form optimum is available.
pub fn best_split_general(
    b_tot: u32,
    nt: usize,
    rho_i: f64,
    clamp: Option<SplitClamp>,
) -> Result<BitSplit> {
    check_rho(rho_i)?;
    let (lo, hi) = clamp.map_or((0, b_tot), |c| c.within(b_tot));
    let mut best = (lo, f64::INFINITY);
    for b_d in lo..=hi {
        let v = loss_bound(BitSplit::new(b_d, b_tot - b_d), nt, rho_i).total;
        if v < best.1 {
            best = (b_d, v);
        }
    }
    BitSplit::with_desired(b_tot, best.0)
}

/// Bound-minimizing split for one user: the closed form for two antennas,
/// the integer search over the general bound otherwise.
pub fn recommended_split(
    b_tot: u32,
    nt: usize,
    rho_i: f64,
    clamp: Option<SplitClamp>,
) -> Result<BitSplit> {
    if nt == 2 {
        optimal_split(b_tot, rho_i, clamp)
    } else {
        best_split_general(b_tot, nt, rho_i, clamp)
    }
}

/// `Σ_k T_d(B_d,k) + T_i(B_i,k)`, the bound on the mean sum-rate loss of
/// the whole array. Pass `alpha = 0` for a user without an interferer.
pub fn total_bound_general(splits: &[BitSplit], params: &[CellParams], nt: usize) -> Result<f64> {
    if splits.len() != params.len() {
        return Err(Error::Shape(format!(
            "{} splits for {} cells",
            splits.len(),
            params.len()
        )));
    }
    Ok(splits
        .iter()
        .zip(params)
        .map(|(s, p)| loss_bound(*s, nt, p.rho_i()).total)
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desired_bound_examples() {
        assert!((t_d_bound(3, 2) - 0.125 * LOG2_E).abs() < 1e-15);
        assert!((t_d_bound(3, 2) - 0.18034).abs() < 1e-5);
        assert!(t_d_bound(20, 2) < 1e-5);
        assert!((t_d_bound(0, 4) - LOG2_E * 11.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn interfering_bound_examples() {
        for b in 0..=15 {
            assert_eq!(t_i_bound(b, 2, 0.0), 0.0);
        }
        assert!((t_i_bound(3, 2, 10.0) - (1.0f64 + 20.0 / 9.0).log2()).abs() < 1e-13);
        assert!((t_i_bound(3, 2, 10.0) - 1.6880).abs() < 1e-4);
        for b in 0..=15u32 {
            let want = (1.0 + 2.0 * 3.7 / (f64::from(b).exp2() + 1.0)).log2();
            assert!((t_i_bound(b, 2, 3.7) - want).abs() < 1e-12, "B_i={b}");
        }
    }

    #[test]
    fn delta_tilde_domain() {
        assert!(delta_tilde(-0.1, 8, 1.0).is_err());
        assert!(delta_tilde(8.5, 8, 1.0).is_err());
        assert!(delta_tilde(4.0, 8, -1.0).is_err());
    }

    #[test]
    fn two_antenna_form_equals_general_form() {
        for b_tot in 0..=15u32 {
            for b_d in 0..=b_tot {
                for &rho in &[0.0, 0.01, 1.0, 10.0, 100.0] {
                    let general = loss_bound(BitSplit::new(b_d, b_tot - b_d), 2, rho).total;
                    let special = delta_tilde(f64::from(b_d), b_tot, rho).unwrap();
                    assert!((general - special).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        for &rho in &[0.05, 1.0, 10.0, 300.0] {
            for i in 1..150 {
                let b = f64::from(i) * 0.1;
                let h = 1e-6;
                let fd = (delta_tilde(b + h, 15, rho).unwrap()
                    - delta_tilde(b - h, 15, rho).unwrap())
                    / (2.0 * h);
                assert!((fd - delta_tilde_slope(b, 15, rho)).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn stationary_point_zeroes_the_slope() {
        for &rho in &[1.0, 10.0, 100.0] {
            let b = real_optimum(12, rho);
            assert!(b > 0.0 && b < 12.0);
            assert!(delta_tilde_slope(b, 12, rho).abs() < 1e-12);
        }
    }

    #[test]
    fn no_interference_uses_every_bit() {
        for b_tot in 0..=16 {
            assert_eq!(
                optimal_split(b_tot, 0.0, None).unwrap(),
                BitSplit::new(b_tot, 0)
            );
            assert_eq!(
                brute_force_split(b_tot, 0.0).unwrap(),
                BitSplit::new(b_tot, 0)
            );
        }
    }

    #[test]
    fn golden_splits() {
        assert_eq!(optimal_split(8, 10.0, None).unwrap(), BitSplit::new(2, 6));
        assert_eq!(brute_force_split(8, 10.0).unwrap(), BitSplit::new(2, 6));
        let rho_i = 10.0 * 10f64.powf(-3.8);
        assert_eq!(optimal_split(8, rho_i, None).unwrap(), BitSplit::new(8, 0));
    }

    #[test]
    fn clamp_is_applied_before_rounding() {
        let c = SplitClamp::symmetric(8, 3);
        assert_eq!(optimal_split(8, 10.0, c).unwrap(), BitSplit::new(3, 5));
        assert_eq!(optimal_split(8, 0.0, c).unwrap(), BitSplit::new(5, 3));
        assert!(SplitClamp::symmetric(4, 3).is_none());
        assert!(SplitClamp::new(5, 2).is_err());
    }

    #[test]
    fn general_search_agrees_with_closed_form_at_two_antennas() {
        for b_tot in 2..=16 {
            for &rho in &[0.01, 0.1, 1.0, 10.0, 100.0] {
                assert_eq!(
                    best_split_general(b_tot, 2, rho, None).unwrap(),
                    brute_force_split(b_tot, rho).unwrap()
                );
            }
        }
    }

    #[test]
    fn array_bound_is_sum_of_cells() {
        let params = [
            CellParams::new(10.0, 1.0, 8).unwrap(),
            CellParams::new(5.0, 0.1, 8).unwrap(),
        ];
        let splits = [BitSplit::new(2, 6), BitSplit::new(5, 3)];
        let total = total_bound_general(&splits, &params, 2).unwrap();
        let parts = loss_bound(splits[0], 2, 10.0).total + loss_bound(splits[1], 2, 0.5).total;
        assert!((total - parts).abs() < 1e-14);
        assert!(total_bound_general(&splits[..1], &params, 2).is_err());
    }

    #[test]
    fn large_budgets_make_the_bound_vanish() {
        for &rho in &[0.01, 1.0, 10.0] {
            let params = [CellParams::new(rho, 1.0, 30).unwrap(); 2];
            let splits = [BitSplit::new(15, 15); 2];
            assert!(total_bound_general(&splits, &params, 2).unwrap() < 0.01);
        }
    }

    #[test]
    fn equal_split_needs_even_budget() {
        assert_eq!(BitSplit::equal(6).unwrap(), BitSplit::new(3, 3));
        assert!(BitSplit::equal(7).is_err());
    }
}
