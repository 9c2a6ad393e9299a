use std::ops::{Add, Index, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest and largest supported antenna count.
pub const MIN_ANTENNAS: usize = 2;
pub const MAX_ANTENNAS: usize = 8;

/// Entries below this fraction of the vector norm count as zero when fixing
/// the phase of a unit vector.
const PHASE_ZERO_TOL: f64 = 1e-12;

const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex column vector of length `Nt`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CVec(Vec<Complex64>);

impl CVec {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        check_len(entries.len())?;
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::Domain("vector entries must be finite".into()));
        }
        Ok(Self(entries))
    }

    /// Builds a vector from `(re, im)` pairs.
    pub fn from_parts(parts: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            parts
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }

    pub fn zeros(n: usize) -> Result<Self> {
        check_len(n)?;
        Ok(Self(vec![Complex64::new(0.0, 0.0); n]))
    }

    /// Draws i.i.d. CN(0, 1) entries: real and imaginary parts are N(0, 1/2).
    pub fn gaussian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_len(n)?;
        Ok(Self::gaussian_unchecked(n, rng))
    }

    pub(crate) fn gaussian_unchecked<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self(
            (0..n)
                .map(|_| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(s * re, s * im)
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn conj(&self) -> Self {
        Self(self.0.iter().map(|z| z.conj()).collect())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    pub fn scale_re(&self, s: f64) -> Self {
        Self(self.0.iter().map(|z| z * s).collect())
    }

    /// Hermitian inner product `self* · other`.
    pub fn dot_h(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    /// Bilinear product `self^T · other` (no conjugation).
    pub fn dot_t(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// `self - s * other`
    pub fn sub_scaled(&self, s: Complex64, other: &Self) -> Self {
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a - s * b)
                .collect(),
        )
    }

    /// Unit-norm copy with the first non-negligible entry rotated onto the
    /// positive real axis. Returns `None` for a (numerically) zero vector.
    pub fn unit_canonical(&self) -> Option<Self> {
        let norm = self.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return None;
        }
        let pivot = self.0.iter().find(|z| z.norm() > PHASE_ZERO_TOL * norm)?;
        let rot = pivot.conj() / (pivot.norm() * norm);
        let mut out: Vec<Complex64> = self.0.iter().map(|z| z * rot).collect();
        // the pivot is real by construction; drop the rounding residue
        if let Some(p) = out.iter_mut().find(|z| z.norm() > PHASE_ZERO_TOL) {
            *p = Complex64::new(p.norm(), 0.0);
        }
        Some(Self(out))
    }

    /// Squared cosine of the angle between two directions, `|a* b|² / (|a|² |b|²)`.
    pub fn cos2_angle(&self, other: &Self) -> f64 {
        let den = self.norm_sqr() * other.norm_sqr();
        if den == 0.0 {
            return 0.0;
        }
        (self.dot_h(other).norm_sqr() / den).min(1.0)
    }

    /// Distance between the lines spanned by two vectors, after aligning
    /// their phases; zero iff they are equal up to a unit-modulus scalar.
    pub fn distance_up_to_phase(&self, other: &Self) -> f64 {
        let ip = self.dot_h(other);
        let rot = if ip.norm() > 0.0 {
            ip / ip.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        // other ≈ rot * self
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a * rot - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

fn check_len(n: usize) -> Result<()> {
    if (MIN_ANTENNAS..=MAX_ANTENNAS).contains(&n) {
        Ok(())
    } else {
        Err(Error::Shape(format!(
            "vector length {n} outside {MIN_ANTENNAS}..={MAX_ANTENNAS}"
        )))
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl Add for &CVec {
    type Output = CVec;
    fn add(self, rhs: &CVec) -> CVec {
        CVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &CVec {
    type Output = CVec;
    fn sub(self, rhs: &CVec) -> CVec {
        CVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    n: usize,
    data: Vec<Complex64>,
    hermitian: bool,
}

impl CMat {
    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::Shape(format!(
                "{} entries for a {n}x{n} matrix",
                data.len()
            )));
        }
        let mut m = Self {
            n,
            data,
            hermitian: false,
        };
        m.hermitian = m.check_hermitian();
        Ok(m)
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self {
            n,
            data,
            hermitian: true,
        }
    }

    /// `a · b*`
    pub fn outer(a: &CVec, b: &CVec) -> Self {
        let n = a.len();
        let data = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i] * b[j].conj())
            .collect();
        let mut m = Self {
            n,
            data,
            hermitian: false,
        };
        m.hermitian = m.check_hermitian();
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
            hermitian: self.hermitian,
        }
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        debug_assert_eq!(self.n, v.len());
        CVec(
            (0..self.n)
                .map(|i| (0..self.n).map(|j| self.get(i, j) * v[j]).sum())
                .collect(),
        )
    }

    /// `v* A v`, real part only (exact for Hermitian `A`).
    pub fn quad_form(&self, v: &CVec) -> f64 {
        v.dot_h(&self.mul_vec(v)).re
    }

    fn check_hermitian(&self) -> bool {
        (0..self.n).all(|i| {
            (i..self.n).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= HERMITIAN_TOL)
        })
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a + b)
            .collect();
        let mut m = CMat {
            n: self.n,
            data,
            hermitian: false,
        };
        m.hermitian = m.check_hermitian();
        m
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        let n = self.n;
        let data = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (0..n).map(|k| self.get(i, k) * rhs.get(k, j)).sum())
            .collect();
        let mut m = CMat {
            n,
            data,
            hermitian: false,
        };
        m.hermitian = m.check_hermitian();
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn length_is_checked() {
        assert!(CVec::new(vec![c(1.0, 0.0)]).is_err());
        assert!(CVec::new(vec![c(0.0, 0.0); 9]).is_err());
        assert!(CVec::new(vec![c(f64::NAN, 0.0); 2]).is_err());
        assert!(CVec::zeros(8).is_ok());
    }

    #[test]
    fn products_follow_conjugation_conventions() {
        let a = CVec::from_parts(&[(1.0, 1.0), (0.0, 2.0)]).unwrap();
        let b = CVec::from_parts(&[(2.0, 0.0), (1.0, -1.0)]).unwrap();
        // a*b = (1-i)*2 + (-2i)(1-i) = 2-2i -2i -2 = -4i
        assert_eq!(a.dot_h(&b), c(0.0, -4.0));
        // a^T b = (1+i)*2 + 2i(1-i) = 2+2i + 2i + 2 = 4+4i
        assert_eq!(a.dot_t(&b), c(4.0, 4.0));
    }

    #[test]
    fn canonical_phase_makes_first_entry_real_positive() {
        let v = CVec::from_parts(&[(0.0, 0.0), (0.0, 2.0), (1.0, 0.0)]).unwrap();
        let u = v.unit_canonical().unwrap();
        assert!((u.norm() - 1.0).abs() < 1e-15);
        assert_eq!(u[0], c(0.0, 0.0));
        assert!(u[1].im == 0.0 && u[1].re > 0.0);
        assert!(CVec::zeros(3).unwrap().unit_canonical().is_none());
    }

    #[test]
    fn hermitian_flag() {
        let a = CVec::from_parts(&[(1.0, 1.0), (0.0, 2.0)]).unwrap();
        assert!(CMat::outer(&a, &a).is_hermitian());
        let b = CVec::from_parts(&[(1.0, 0.0), (0.0, 0.0)]).unwrap();
        assert!(!CMat::outer(&a, &b).is_hermitian());
        assert!(CMat::identity(4).is_hermitian());
    }
}
