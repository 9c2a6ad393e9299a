use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Beyond this argument the log-Beta uses a Stirling difference instead of
/// subtracting three large log-gammas.
const STIRLING_CUTOFF: f64 = 20.0;

/// Euler Beta function `B(a, b) = Γ(a)Γ(b)/Γ(a+b)`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    Ok(ln_beta(a, b)?.exp())
}

/// `ln B(a, b)`.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!(
            "beta arguments must be positive, got ({a}, {b})"
        )));
    }
    let (small, large) = if a <= b { (a, b) } else { (b, a) };
    if large < STIRLING_CUTOFF {
        return Ok(ln_gamma(small) + ln_gamma(large) - ln_gamma(small + large));
    }
    // ln Γ(x) - ln Γ(x+s) = -(x+s-½)·ln(1+s/x) - s·ln x + s + c(x) - c(x+s)
    // where c is the Stirling correction series.
    let (x, s) = (large, small);
    let diff =
        -(x + s - 0.5) * (s / x).ln_1p() - s * x.ln() + s + stirling_tail(x) - stirling_tail(x + s);
    Ok(ln_gamma(s) + diff)
}

/// `ln Γ(x) - [(x-½)ln x - x + ½ ln 2π]` for large `x`.
fn stirling_tail(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0
        - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 * (1.0 / 1680.0 - inv2 / 1188.0))))
}
