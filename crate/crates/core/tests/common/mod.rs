//! Independent reference implementations for integration tests.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type Dense = Vec<Vec<Complex64>>;

pub fn gaussian_vec<R: Rng>(n: usize, rng: &mut R) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * s, im * s)
        })
        .collect()
}

/// `scale · a aᴴ + shift · I`.
pub fn outer_plus_identity(a: &[Complex64], scale: f64, shift: f64) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    a[i] * a[j].conj() * scale
                        + if i == j {
                            Complex64::new(shift, 0.0)
                        } else {
                            Complex64::new(0.0, 0.0)
                        }
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn mat_mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn inverse(m: &Dense) -> Dense {
    let n = m.len();
    let mut a: Dense = m.clone();
    let mut inv: Dense = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].norm().partial_cmp(&a[y][col].norm()).unwrap())
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col {
                let factor = a[r][col];
                for j in 0..n {
                    let (ac, ic) = (a[col][j], inv[col][j]);
                    a[r][j] -= factor * ac;
                    inv[r][j] -= factor * ic;
                }
            }
        }
    }
    inv
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let n = norm(v);
    v.iter().map(|z| z / n).collect()
}

/// Principal eigenvector of `R_g⁻¹ R_h` by power iteration from a random
/// start, then its eigenvalue as the Rayleigh quotient of the pencil.
pub fn dense_gen_eig<R: Rng>(
    h_eff: &[Complex64],
    g_eff: &[Complex64],
    rho: f64,
    rng: &mut R,
) -> (Vec<Complex64>, f64) {
    let r_h = outer_plus_identity(h_eff, 1.0, 0.0);
    let r_g = outer_plus_identity(g_eff, rho, 1.0);
    let m = mat_mul(&inverse(&r_g), &r_h);
    let mut x = normalize(&gaussian_vec(h_eff.len(), rng));
    for _ in 0..60 {
        x = normalize(&mat_vec(&m, &x));
    }
    let num: f64 = x
        .iter()
        .zip(mat_vec(&r_h, &x))
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    let den: f64 = x
        .iter()
        .zip(mat_vec(&r_g, &x))
        .map(|(a, b)| (a.conj() * b).re)
        .sum();
    (x, num / den)
}

/// `min_φ ‖a − e^{iφ} b‖` for unit vectors.
pub fn distance_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    let inner: Complex64 = a.iter().zip(b).map(|(x, y)| y.conj() * x).sum();
    let phase = if inner.norm() > 0.0 {
        inner / inner.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - phase * y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖R_h f − λ R_g f‖`.
pub fn gen_residual(
    h_eff: &[Complex64],
    g_eff: &[Complex64],
    rho: f64,
    f: &[Complex64],
    lambda: f64,
) -> f64 {
    let r_h = outer_plus_identity(h_eff, 1.0, 0.0);
    let r_g = outer_plus_identity(g_eff, rho, 1.0);
    let lhs = mat_vec(&r_h, f);
    let rhs = mat_vec(&r_g, f);
    lhs.iter()
        .zip(&rhs)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Mean and standard error.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
