//! Principal generalized eigenvector of the pencil `(h hᴴ, ρ g gᴴ + I)`.
//!
//! Callers pass *effective* vectors: for a channel `h` the beam gain is
//! `|hᵀ f|²`, which equals `fᴴ (h̄ h̄ᴴ) f`, so `h_eff = conj(h)`. The
//! `beamforming` and `feedback` modules perform that conjugation.

use super::linalg::CVec;
use crate::error::{Error, Result};

/// Unit-norm principal generalized eigenvector and its eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct GenEigen {
    pub f: CVec,
    pub lambda: f64,
}

/// Solves `R_h f = λ R_g f` with `R_h = h hᴴ` and `R_g = ρ g gᴴ + I`.
///
/// `R_h` has rank one, so the only nonzero eigenvalue belongs to
/// `f ∝ R_g⁻¹ h`, and Sherman–Morrison gives
/// `R_g⁻¹ = I − ρ g gᴴ / (1 + ρ‖g‖²)`. Then `λ = hᴴ R_g⁻¹ h`.
pub fn rank1_gen_eigvec(h_eff: &CVec, g_eff: &CVec, rho_i: f64) -> Result<GenEigen> {
    if h_eff.len() != g_eff.len() {
        return Err(Error::Shape(format!(
            "desired length {} vs interfering length {}",
            h_eff.len(),
            g_eff.len()
        )));
    }
    if !(rho_i >= 0.0) || !rho_i.is_finite() {
        return Err(Error::Domain(format!(
            "interference SNR must be finite and >= 0, got {rho_i}"
        )));
    }
    let h_norm_sqr = h_eff.norm_sqr();
    if !(h_norm_sqr > 0.0) {
        return Err(Error::DegenerateChannel("h_eff"));
    }

    let g_norm_sqr = g_eff.norm_sqr();
    let g_h = g_eff.dot_h(h_eff);
    // Split h into its components along and across g; R_g⁻¹ only shrinks
    // the former, by 1/(1 + ρ‖g‖²). No cancellation for large ρ.
    let (direction, lambda) = if g_norm_sqr > 0.0 && rho_i > 0.0 {
        let along = g_h / g_norm_sqr;
        let across = h_eff.sub_scaled(along, g_eff);
        let shrink = 1.0 / (1.0 + rho_i * g_norm_sqr);
        let direction = across.sub_scaled(-along * shrink, g_eff);
        let lambda = across.norm_sqr() + shrink * g_h.norm_sqr() / g_norm_sqr;
        (direction, lambda)
    } else {
        (h_eff.clone(), h_norm_sqr)
    };

    let f = direction
        .unit_canonical()
        .ok_or(Error::DegenerateChannel("h_eff"))?;
    Ok(GenEigen { f, lambda })
}

/// Generalized Rayleigh quotient `|h_effᴴ f|² / (ρ |g_effᴴ f|² + ‖f‖²)`.
pub fn rayleigh_quotient(f: &CVec, h_eff: &CVec, g_eff: &CVec, rho_i: f64) -> f64 {
    let num = h_eff.dot_h(f).norm_sqr();
    let den = rho_i * g_eff.dot_h(f).norm_sqr() + f.norm_sqr();
    num / den
}
