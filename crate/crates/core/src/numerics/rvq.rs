//! Closed-form statistics of random vector quantization (RVQ).
//!
//! With `N = 2^B` isotropic codewords in `C^Nt`, the quantization error
//! `Z = 1 − cos²(∠(h̃, ĥ))` is the minimum of `N` i.i.d. variables with
//! CDF `z^(Nt−1)` on `[0, 1]`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::quadrature::integrate;
use super::special::ln_beta;

/// Largest `B` evaluated through the exact alternating sum.
pub const EXACT_MAX_BITS: u32 = 10;

/// Largest codebook size the closed forms accept.
pub const MAX_BITS: u32 = 62;

const QUAD_TOL: f64 = 1e-14;

/// `Σ_{i=0}^{N} C(N, i) (−1)^i H_{i(Nt−1)}` with `N = 2^bits` and `H_n` the
/// `n`-th harmonic number, evaluated exactly.
pub fn alternating_harmonic_sum(bits: u32, nt: usize) -> BigRational {
    assert!(nt >= 2, "need at least two antennas");
    assert!(bits <= 16, "exact sum limited to 16 bits");
    let n: u64 = 1 << bits;
    let m = (nt - 1) as u64;
    let top = n * m;

    // H_j = A_j / L with L = lcm(1..=top)
    let lcm = (1..=top).fold(BigInt::one(), |acc, l| acc.lcm(&BigInt::from(l)));
    let mut scaled_h = Vec::with_capacity(top as usize + 1);
    scaled_h.push(BigInt::zero());
    let mut acc = BigInt::zero();
    for l in 1..=top {
        acc += &lcm / BigInt::from(l);
        scaled_h.push(acc.clone());
    }

    let mut binom = BigInt::one();
    let mut num = BigInt::zero();
    for i in 0..=n {
        let term = &binom * &scaled_h[(i * m) as usize];
        if i % 2 == 0 {
            num += term;
        } else {
            num -= term;
        }
        binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    BigRational::new(num, lcm)
}

/// `E{log₂ cos²(∠(h̃, ĥ))}` for a `bits`-bit RVQ codebook in `C^nt`.
///
/// Exact rational evaluation up to [`EXACT_MAX_BITS`], adaptive quadrature
/// above it.
pub fn expected_log2_cos2(bits: u32, nt: usize) -> f64 {
    if bits <= EXACT_MAX_BITS {
        expected_log2_cos2_exact(bits, nt)
    } else {
        expected_log2_cos2_quadrature(bits, nt)
    }
}

pub fn expected_log2_cos2_exact(bits: u32, nt: usize) -> f64 {
    let sum = alternating_harmonic_sum(bits, nt);
    std::f64::consts::LOG2_E * rational_to_f64(&sum)
}

/// Quadrature backend: `E{ln(1 − Z)} = −∫₀¹ P(Z > z)/(1 − z) dz` and
/// `P(Z > z)/(1 − z) = (Σ_{j<M} z^j)(1 − z^M)^(N−1)` with `M = nt − 1`.
pub fn expected_log2_cos2_quadrature(bits: u32, nt: usize) -> f64 {
    assert!(nt >= 2, "need at least two antennas");
    assert!(bits <= MAX_BITS, "codebook too large");
    let n = (bits as f64).exp2();
    let m = (nt - 1) as i32;
    let integrand = |z: f64| {
        let zm = z.powi(m);
        let head: f64 = (0..m).map(|j| z.powi(j)).sum();
        head * ((n - 1.0) * (-zm).ln_1p()).exp()
    };
    // the mass sits near z ≈ N^(−1/M)
    let scale = n.powf(-1.0 / f64::from(m));
    let mut breaks = vec![0.0];
    breaks.extend(
        [1.0 / 16.0, 0.25, 1.0, 4.0, 16.0, 64.0, 256.0]
            .iter()
            .map(|k| k * scale)
            .filter(|&z| z < 1.0),
    );
    breaks.push(1.0);
    -std::f64::consts::LOG2_E * integrate(integrand, &breaks, QUAD_TOL)
}

/// `E{1 − cos²(∠(g̃, ĝ))} = 2^B · B(2^B, Nt/(Nt−1))`.
pub fn expected_sin2_min(bits: u32, nt: usize) -> f64 {
    assert!(nt >= 2, "need at least two antennas");
    assert!(bits <= MAX_BITS, "codebook too large");
    let n = (bits as f64).exp2();
    let ntf = nt as f64;
    let lb = ln_beta(n, ntf / (ntf - 1.0)).expect("positive arguments");
    (n.ln() + lb).exp()
}

/// Converts without overflowing on numerators and denominators far beyond
/// the `f64` range.
pub(crate) fn rational_to_f64(r: &BigRational) -> f64 {
    if let Some(v) = r.to_f64().filter(|v| v.is_finite()) {
        return v;
    }
    let (num, den) = (r.numer(), r.denom());
    let shift = num.bits().max(den.bits()).saturating_sub(900);
    let n = (num >> shift).to_f64().unwrap_or(0.0);
    let d = (den >> shift).to_f64().unwrap_or(f64::INFINITY);
    n / d
}
