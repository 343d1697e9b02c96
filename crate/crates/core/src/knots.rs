//! Knot sets: the scalar parameter vectors behind Vandermonde and Cauchy
//! matrices, with cached polar data and grid/geometry detection helpers.

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::f64::consts::PI;

/// An ordered set of pairwise distinct complex knots.
///
/// Exact coincidence is rejected at construction; near-coincidence (relative
/// gap below 1e-14) only sets the `near_coincident` flag.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSet {
    knots: Vec<Complex64>,
    angles: Vec<f64>,
    magnitudes: Vec<f64>,
    near_coincident: bool,
}

impl KnotSet {
    pub fn new(knots: Vec<Complex64>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::EmptyInput("knot set"));
        }
        for (i, z) in knots.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry(i));
            }
        }
        // sort-based duplicate scan: exact duplicates are adjacent after
        // ordering by (re, im)
        let mut order: Vec<usize> = (0..knots.len()).collect();
        order.sort_by(|&a, &b| {
            (knots[a].re, knots[a].im)
                .partial_cmp(&(knots[b].re, knots[b].im))
                .unwrap()
        });
        let scale = knots.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        let mut near = false;
        for w in order.windows(2) {
            let d = (knots[w[0]] - knots[w[1]]).norm();
            if d == 0.0 {
                return Err(Error::KnotCollision(format!(
                    "knots {} and {} coincide exactly",
                    w[0], w[1]
                )));
            }
            if d < 1e-14 * scale {
                near = true;
            }
        }
        let angles = knots.iter().map(|z| z.arg().rem_euclid(2.0 * PI)).collect();
        let magnitudes = knots.iter().map(|z| z.norm()).collect();
        Ok(Self {
            knots,
            angles,
            magnitudes,
            near_coincident: near,
        })
    }

    /// The DFT-based grid (e * omega_n^j) for j = 0..n-1.
    pub fn dft_grid(e: Complex64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyInput("dft grid of size 0"));
        }
        if e.norm() == 0.0 {
            return Err(Error::InvalidScalar("dft grid with e = 0".into()));
        }
        let knots = (0..n)
            .map(|j| e * crate::fft::root_of_unity_pow(n, j as i64))
            .collect();
        Self::new(knots)
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn knots(&self) -> &[Complex64] {
        &self.knots
    }

    /// Polar angles in [0, 2*pi), cached at construction.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    pub fn near_coincident(&self) -> bool {
        self.near_coincident
    }

    /// s_+ = max |s_i|.
    pub fn max_magnitude(&self) -> f64 {
        self.magnitudes.iter().copied().fold(0.0, f64::max)
    }

    pub fn min_magnitude(&self) -> f64 {
        self.magnitudes.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn as_vector(&self) -> ComplexVector {
        self.knots.clone().into()
    }

    /// Indices sorted by polar angle (stable for equal angles).
    pub fn angle_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|&a, &b| {
            self.angles[a]
                .partial_cmp(&self.angles[b])
                .unwrap()
                .then(a.cmp(&b))
        });
        idx
    }

    /// Exact-collision check against another knot set.
    pub fn assert_disjoint(&self, other: &KnotSet) -> Result<()> {
        // merge scan over both sorted sets
        let mut all: Vec<(f64, f64, bool)> = self
            .knots
            .iter()
            .map(|z| (z.re, z.im, false))
            .chain(other.knots.iter().map(|z| (z.re, z.im, true)))
            .collect();
        all.sort_by(|a, b| (a.0, a.1).partial_cmp(&(b.0, b.1)).unwrap());
        for w in all.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 && w[0].2 != w[1].2 {
                return Err(Error::KnotCollision(format!(
                    "shared knot {} + {}i",
                    w[0].0, w[0].1
                )));
            }
        }
        Ok(())
    }

    /// Detects knots of the exact form (e * omega_n^j) in index order and
    /// returns e. Relative tolerance 1e-13.
    pub fn dft_grid_scalar(&self) -> Option<Complex64> {
        let n = self.len();
        let e = self.knots[0];
        if e.norm() == 0.0 {
            return None;
        }
        for (j, z) in self.knots.iter().enumerate() {
            let expect = e * crate::fft::root_of_unity_pow(n, j as i64);
            if (z - expect).norm() > 1e-13 * e.norm() {
                return None;
            }
        }
        Some(e)
    }

    /// True when every knot is real within `tol` (absolute on the imaginary
    /// part, relative to the magnitude scale).
    pub fn all_real(&self, tol: f64) -> bool {
        let scale = self.max_magnitude().max(1.0);
        self.knots.iter().all(|z| z.im.abs() <= tol * scale)
    }

    /// True when every knot lies on the unit circle within relative `tol`.
    pub fn on_unit_circle(&self, tol: f64) -> bool {
        self.magnitudes.iter().all(|&m| (m - 1.0).abs() <= tol)
    }
}

/// Deterministic rotation selection for the DFT-based factorizations of
/// Vandermonde matrices: picks phi on the unit circle maximizing
/// min_i |s_i^n - phi| over 4n equispaced candidates, which guarantees the
/// gap is at least of order 1/n. Returns (f, phi) with f^n = phi.
pub fn select_shift_scalar(s: &KnotSet) -> (Complex64, Complex64) {
    let n = s.len();
    let powers: Vec<Complex64> = s.knots().iter().map(|z| z.powu(n as u32)).collect();
    let candidates = 4 * n;
    let mut best = (0.0f64, Complex64::new(1.0, 0.0));
    for q in 0..candidates {
        let phi = Complex64::from_polar(1.0, 2.0 * PI * (q as f64 + 0.5) / candidates as f64);
        let gap = powers
            .iter()
            .map(|p| (p - phi).norm())
            .fold(f64::INFINITY, f64::min);
        if gap > best.0 {
            best = (gap, phi);
        }
    }
    let phi = best.1;
    let f = Complex64::from_polar(1.0, phi.arg() / n as f64);
    (f, phi)
}

/// The Cauchy matrix (1 / (s_i - t_j)).
pub fn cauchy_dense(s: &KnotSet, t: &KnotSet) -> Result<DenseMatrix> {
    s.assert_disjoint(t)?;
    let sk = s.knots();
    let tk = t.knots();
    Ok(DenseMatrix::from_fn(sk.len(), tk.len(), |i, j| {
        Complex64::new(1.0, 0.0) / (sk[i] - tk[j])
    }))
}

/// The Vandermonde matrix (s_i^j).
pub fn vandermonde_dense(s: &KnotSet) -> DenseMatrix {
    let n = s.len();
    let sk = s.knots();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut p = Complex64::new(1.0, 0.0);
        for j in 0..n {
            m[(i, j)] = p;
            p *= sk[i];
        }
    }
    m
}

/// Dense Toeplitz matrix from its first column and first row.
pub fn toeplitz_dense(first_col: &ComplexVector, first_row: &ComplexVector) -> Result<DenseMatrix> {
    let n = first_col.len();
    if first_row.len() != n {
        return Err(Error::DimensionMismatch(
            "toeplitz column/row length mismatch".into(),
        ));
    }
    if (first_col[0] - first_row[0]).norm() > 1e-14 * (1.0 + first_col[0].norm()) {
        return Err(Error::Inconsistent(
            "first column and first row disagree at the corner entry".into(),
        ));
    }
    Ok(DenseMatrix::from_fn(n, n, |i, j| {
        if i >= j {
            first_col[i - j]
        } else {
            first_row[j - i]
        }
    }))
}
