//! Small dense linear algebra: eigenvalues of real nonsymmetric matrices and
//! roots of real polynomials.
//!
//! The two routes are independent on purpose: eigenvalues come from a real
//! Schur decomposition, polynomial roots from Aberth-Ehrlich iteration, so
//! the characteristic-polynomial checks in `stability` compare two separate
//! computations.

use alloc::format;
use alloc::vec::Vec;

pub use nalgebra::Complex;
use nalgebra::{DMatrix, SMatrix, Schur};

use crate::error::{Error, Result};

pub type Matrix4 = SMatrix<f64, 4, 4>;
pub type Matrix9 = SMatrix<f64, 9, 9>;
pub type C64 = Complex<f64>;

const SCHUR_MAX_ITER: usize = 10_000;

/// Eigenvalues of a square real matrix, sorted by real part then imaginary
/// part (descending).
pub fn eigenvalues<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<Vec<C64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen(format!("non-finite entries in {:?}", m.as_slice())));
    }
    let scale = m.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    if scale == 0.0 {
        return Ok(alloc::vec![C64::new(0.0, 0.0); N]);
    }
    let dynamic = DMatrix::from_column_slice(N, N, m.as_slice()) / scale;
    let schur = Schur::try_new(dynamic, f64::EPSILON, SCHUR_MAX_ITER)
        .ok_or_else(|| Error::Eigen(format!("{:?}", m.as_slice())))?;
    let mut ev: Vec<C64> = schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z * scale)
        .collect();
    sort_spectrum(&mut ev);
    Ok(ev)
}

pub fn spectral_radius<const N: usize>(m: &SMatrix<f64, N, N>) -> Result<f64> {
    Ok(eigenvalues(m)?.iter().map(|z| abs(*z)).fold(0.0, f64::max))
}

pub fn abs(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

pub fn sort_spectrum(ev: &mut [C64]) {
    ev.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
}

/// Horner evaluation of `coeffs[0] x^n + ... + coeffs[n]` and its derivative.
fn horner(coeffs: &[f64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs {
        dp = dp * z + p;
        p = p * z + C64::new(c, 0.0);
    }
    (p, dp)
}

/// All complex roots of a real polynomial given highest degree first.
///
/// Leading zero coefficients are dropped. Uses simultaneous Aberth-Ehrlich
/// iteration started on a circle inside the Cauchy bound.
pub fn poly_roots(coeffs: &[f64]) -> Vec<C64> {
    let start = coeffs.iter().position(|c| *c != 0.0).unwrap_or(coeffs.len());
    let coeffs = &coeffs[start..];
    if coeffs.len() < 2 {
        return Vec::new();
    }
    let lead = coeffs[0];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let n = monic.len() - 1;

    let bound = 1.0 + monic[1..].iter().fold(0.0f64, |m, c| m.max(c.abs()));
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let angle = 2.0 * core::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            C64::new(0.5 * bound * libm::cos(angle), 0.5 * bound * libm::sin(angle))
        })
        .collect();

    for _ in 0..500 {
        let mut max_shift = 0.0f64;
        for k in 0..n {
            let (p, dp) = horner(&monic, z[k]);
            if p.re == 0.0 && p.im == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = C64::new(0.0, 0.0);
            for j in 0..n {
                if j != k {
                    sum += C64::new(1.0, 0.0) / (z[k] - z[j]);
                }
            }
            let shift = ratio / (C64::new(1.0, 0.0) - ratio * sum);
            if shift.re.is_finite() && shift.im.is_finite() {
                z[k] -= shift;
                max_shift = max_shift.max(abs(shift) / (1.0 + abs(z[k])));
            }
        }
        if max_shift < 1e-15 {
            break;
        }
    }
    // roots of a real polynomial come in conjugate pairs; snap tiny imaginary parts
    for r in z.iter_mut() {
        if r.im.abs() <= 1e-12 * (1.0 + r.re.abs()) {
            r.im = 0.0;
        }
    }
    sort_spectrum(&mut z);
    z
}

/// Coefficients of the product of two polynomials (highest degree first).
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = alloc::vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Pair every element of `a` with a distinct element of `b` greedily by
/// distance and return the largest pairing distance, or `None` when the
/// lengths differ.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut used = alloc::vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (idx, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, abs(*x - *y)))
            .min_by(|l, r| l.1.total_cmp(&r.1))?;
        used[idx] = true;
        worst = worst.max(d);
    }
    Some(worst)
}
