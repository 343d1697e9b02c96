//! Hierarchical (HSS-style) compressed approximation of Cauchy and
//! Cauchy-like matrices.
//!
//! Admissible off-diagonal blocks are compressed through truncated Taylor
//! (geometric-series) factors certified by a separation bound, then
//! recompressed to their numerical rank; extended-diagonal neighborhoods
//! stay dense. Knots on the unit circle are partitioned into angular
//! sectors merged pairwise level by level; real knots go through interval
//! bisection. The built approximation supports fast matvec and a
//! preconditioned compressed solve.

mod build;
mod solve;

pub use build::{
    build_cauchy_like_hss, build_cv_hss, real_line_hss, sector_partition, sector_theta_estimate,
    CauchyLikeKernel, SectorPartition,
};
pub use solve::{hss_solve, hss_solve_transposed, hss_solve_with, BandLu, SolveOptions, SolveReport};

use crate::error::{Error, Result};
use crate::knots::KnotSet;
use crate::matrix::DenseMatrix;
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::sync::OnceLock;

/// Hard cap on the per-block Taylor order; exceeding it is reported, never
/// silently truncated.
pub const RANK_CAP: usize = 128;

/// A separation certificate for two knot sets against a center.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationCertificate {
    /// max_t |t - c| / min_s |s - c|, must be < 1 for compression.
    pub theta: f64,
    pub center: Complex64,
    /// min_s |s - c|.
    pub delta: f64,
}

/// Exact theta and delta for two finite knot sets. Errors when some s_i
/// coincides with the center.
pub fn separation(s: &KnotSet, t: &KnotSet, c: Complex64) -> Result<SeparationCertificate> {
    separation_slices(s.knots(), t.knots(), c)
}

pub(crate) fn separation_slices(
    s: &[Complex64],
    t: &[Complex64],
    c: Complex64,
) -> Result<SeparationCertificate> {
    let mut delta = f64::INFINITY;
    for (i, z) in s.iter().enumerate() {
        let d = (z - c).norm();
        if d == 0.0 {
            return Err(Error::DegenerateCenter { index: i });
        }
        delta = delta.min(d);
    }
    let tmax = t.iter().map(|z| (z - c).norm()).fold(0.0, f64::max);
    Ok(SeparationCertificate {
        theta: tmax / delta,
        center: c,
        delta,
    })
}

/// A compressed admissible block: C[rows, cols] ~ F * G^T with a certified
/// entrywise error bound.
#[derive(Debug, Clone)]
pub struct LowRankBlock {
    /// Contiguous row range in the permuted ordering.
    pub row_range: (usize, usize),
    /// Contiguous column range in the permuted ordering.
    pub col_range: (usize, usize),
    pub f: DenseMatrix,
    pub g: DenseMatrix,
    pub cert: SeparationCertificate,
    /// Certified entrywise bound on |C_block - F G^T|.
    pub error_bound: f64,
    /// Merge level the block was created at (0 = leaf partition).
    pub level: usize,
    /// Column-arc (sector) index at that level.
    pub sector: usize,
}

impl LowRankBlock {
    pub fn rank(&self) -> usize {
        self.f.cols()
    }
}

/// A dense extended-diagonal block.
#[derive(Debug, Clone)]
pub struct DenseBlock {
    pub row_range: (usize, usize),
    pub col_range: (usize, usize),
    pub entries: DenseMatrix,
}

/// Geometry the approximation was built on, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HssGeometry {
    /// Column knots on the grid (e * omega_n^j).
    Circle { e: Complex64 },
    /// All knots real.
    Line,
    /// Below the leaf threshold: one dense block.
    DenseFallback,
}

/// Hierarchical approximation of a Cauchy or Cauchy-like matrix: dense
/// extended-diagonal blocks plus certified low-rank admissible blocks over a
/// row (and column) permutation.
#[derive(Debug)]
pub struct HssApprox {
    pub(crate) rows: usize,
    pub(crate) cols: usize,
    pub(crate) epsilon: f64,
    /// permuted position -> original row index
    pub(crate) row_perm: Vec<usize>,
    /// permuted position -> original column index
    pub(crate) col_perm: Vec<usize>,
    pub(crate) dense_blocks: Vec<DenseBlock>,
    pub(crate) low_rank_blocks: Vec<LowRankBlock>,
    pub(crate) geometry: HssGeometry,
    /// number of merge levels (0 for a dense fallback)
    pub(crate) levels: usize,
    /// leaf sector count (0 for a dense fallback)
    pub(crate) leaf_sectors: usize,
    pub(crate) band_lu: OnceLock<Result<solve::BandLu>>,
    pub(crate) condition: OnceLock<Result<f64>>,
    pub(crate) kernel: build::CauchyLikeKernel,
}

impl HssApprox {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn geometry(&self) -> HssGeometry {
        self.geometry
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn leaf_sectors(&self) -> usize {
        self.leaf_sectors
    }

    pub fn low_rank_blocks(&self) -> &[LowRankBlock] {
        &self.low_rank_blocks
    }

    pub fn dense_blocks(&self) -> &[DenseBlock] {
        &self.dense_blocks
    }

    pub fn is_dense_fallback(&self) -> bool {
        self.geometry == HssGeometry::DenseFallback
    }

    /// Largest admissible-block rank in the structure.
    pub fn max_rank(&self) -> usize {
        self.low_rank_blocks
            .iter()
            .map(|b| b.rank())
            .max()
            .unwrap_or(0)
    }

    /// Largest certified error bound over all admissible blocks.
    pub fn max_error_bound(&self) -> f64 {
        self.low_rank_blocks
            .iter()
            .map(|b| b.error_bound)
            .fold(0.0, f64::max)
    }

    /// Per-block report lines: (level, sector, rows, cols, rank, theta,
    /// delta, bound).
    pub fn block_report(&self) -> Vec<(usize, usize, usize, usize, usize, f64, f64, f64)> {
        self.low_rank_blocks
            .iter()
            .map(|b| {
                (
                    b.level,
                    b.sector,
                    b.row_range.1 - b.row_range.0,
                    b.col_range.1 - b.col_range.0,
                    b.rank(),
                    b.cert.theta,
                    b.cert.delta,
                    b.error_bound,
                )
            })
            .collect()
    }

    /// Approximate product H * u.
    pub fn matvec(&self, u: &ComplexVector) -> Result<ComplexVector> {
        if u.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "hss matvec: {} columns vs vector length {}",
                self.cols,
                u.len()
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        // gather into permuted coordinates
        let up: Vec<Complex64> = self.col_perm.iter().map(|&j| u[j]).collect();
        let mut yp = vec![zero; self.rows];
        let mut t = [zero; RANK_CAP + 1];
        for blk in &self.dense_blocks {
            let (r0, r1) = blk.row_range;
            let (c0, c1) = blk.col_range;
            let width = c1 - c0;
            let uin = &up[c0..c1];
            for (row, out) in blk
                .entries
                .data()
                .chunks_exact(width)
                .zip(&mut yp[r0..r1])
            {
                let mut acc = zero;
                for (a, b) in row.iter().zip(uin) {
                    acc += a * b;
                }
                *out += acc;
            }
        }
        for blk in &self.low_rank_blocks {
            let (r0, r1) = blk.row_range;
            let (c0, c1) = blk.col_range;
            let r = blk.rank();
            let t = &mut t[..r];
            t.fill(zero);
            for (grow, uj) in blk.g.data().chunks_exact(r).zip(&up[c0..c1]) {
                for (acc, g) in t.iter_mut().zip(grow) {
                    *acc += g * uj;
                }
            }
            for (frow, out) in blk.f.data().chunks_exact(r).zip(&mut yp[r0..r1]) {
                let mut acc = zero;
                for (f, tv) in frow.iter().zip(t.iter()) {
                    acc += f * tv;
                }
                *out += acc;
            }
        }
        // scatter back
        let mut y = ComplexVector::zeros(self.rows);
        for (pos, &orig) in self.row_perm.iter().enumerate() {
            y[orig] = yp[pos];
        }
        Ok(y)
    }

    /// Approximate product H^T * u.
    pub fn matvec_transposed(&self, u: &ComplexVector) -> Result<ComplexVector> {
        if u.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "hss transposed matvec: {} rows vs vector length {}",
                self.rows,
                u.len()
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        let up: Vec<Complex64> = self.row_perm.iter().map(|&i| u[i]).collect();
        let mut yp = vec![zero; self.cols];
        let mut t = [zero; RANK_CAP + 1];
        for blk in &self.dense_blocks {
            let (r0, r1) = blk.row_range;
            let (c0, c1) = blk.col_range;
            let width = c1 - c0;
            let yout = &mut yp[c0..c1];
            for (row, ui) in blk.entries.data().chunks_exact(width).zip(&up[r0..r1]) {
                for (out, a) in yout.iter_mut().zip(row) {
                    *out += a * ui;
                }
            }
        }
        for blk in &self.low_rank_blocks {
            let (r0, r1) = blk.row_range;
            let (c0, c1) = blk.col_range;
            let r = blk.rank();
            let t = &mut t[..r];
            t.fill(zero);
            for (frow, ui) in blk.f.data().chunks_exact(r).zip(&up[r0..r1]) {
                for (acc, f) in t.iter_mut().zip(frow) {
                    *acc += f * ui;
                }
            }
            for (grow, out) in blk.g.data().chunks_exact(r).zip(&mut yp[c0..c1]) {
                let mut acc = zero;
                for (g, tv) in grow.iter().zip(t.iter()) {
                    acc += g * tv;
                }
                *out += acc;
            }
        }
        let mut y = ComplexVector::zeros(self.cols);
        for (pos, &orig) in self.col_perm.iter().enumerate() {
            y[orig] = yp[pos];
        }
        Ok(y)
    }

    /// H^H * u, used by the condition estimator.
    pub fn matvec_adjoint(&self, u: &ComplexVector) -> Result<ComplexVector> {
        Ok(self.matvec_transposed(&u.conj())?.conj())
    }
}

/// Smallest rank rho with 4 * theta^rho / ((1 - theta) * delta * pi) <= eps.
pub fn rank_bound(theta: f64, delta: f64, epsilon: f64) -> Result<usize> {
    if !(0.0..1.0).contains(&theta) || theta <= 0.0 {
        return Err(Error::NotSeparated { theta });
    }
    if delta <= 0.0 {
        return Err(Error::InvalidScalar(format!("delta = {delta}")));
    }
    if epsilon <= 0.0 {
        return Err(Error::InvalidTolerance(epsilon));
    }
    let front = 4.0 / ((1.0 - theta) * delta * std::f64::consts::PI);
    if front <= epsilon {
        return Ok(0);
    }
    let est = ((front / epsilon).ln() / (1.0 / theta).ln()).ceil() as usize;
    // the float estimate can be off by one in either direction
    let mut rho = est.saturating_sub(2);
    while front * theta.powi(rho as i32) > epsilon {
        rho += 1;
    }
    Ok(rho)
}

/// Truncated Taylor factors of a separated Cauchy block:
/// F = (1/(s_i - c)^{h+1}), G = ((t_j - c)^h) for h = 0..k, with the
/// entrywise bound theta^k / ((1 - theta) * delta).
pub fn taylor_low_rank(
    s: &KnotSet,
    t: &KnotSet,
    c: Complex64,
    k: usize,
) -> Result<LowRankBlock> {
    let cert = separation(s, t, c)?;
    if cert.theta >= 1.0 {
        return Err(Error::NotSeparated { theta: cert.theta });
    }
    let (f, g) = taylor_factors(s.knots(), t.knots(), c, k);
    let error_bound = taylor_bound(&cert, k);
    Ok(LowRankBlock {
        row_range: (0, s.len()),
        col_range: (0, t.len()),
        f,
        g,
        cert,
        error_bound,
        level: 0,
        sector: 0,
    })
}

pub(crate) fn taylor_bound(cert: &SeparationCertificate, k: usize) -> f64 {
    cert.theta.powi(k as i32) / ((1.0 - cert.theta) * cert.delta)
}

pub(crate) fn taylor_factors(
    s: &[Complex64],
    t: &[Complex64],
    c: Complex64,
    k: usize,
) -> (DenseMatrix, DenseMatrix) {
    let mut f = DenseMatrix::zeros(s.len(), k + 1);
    for (i, z) in s.iter().enumerate() {
        let inv = Complex64::new(1.0, 0.0) / (z - c);
        let mut p = inv;
        for h in 0..=k {
            f[(i, h)] = p;
            p *= inv;
        }
    }
    let mut g = DenseMatrix::zeros(t.len(), k + 1);
    for (j, z) in t.iter().enumerate() {
        let d = z - c;
        let mut p = Complex64::new(1.0, 0.0);
        for h in 0..=k {
            g[(j, h)] = p;
            p *= d;
        }
    }
    (f, g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::cauchy_dense;
    use crate::rng::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn separation_single_pairs() {
        let s = KnotSet::new(vec![c(2.0, 0.0)]).unwrap();
        let t = KnotSet::new(vec![c(0.5, 0.0)]).unwrap();
        let cert = separation(&s, &t, c(0.0, 0.0)).unwrap();
        assert!((cert.theta - 0.25).abs() < 1e-15);
        assert!((cert.delta - 2.0).abs() < 1e-15);

        // t on the unit circle, s of magnitude 2, center 0
        let mut rng = Rng::seed_from_u64(40);
        let tt = KnotSet::new((0..8).map(|_| rng.on_circle()).collect::<Vec<_>>()).unwrap();
        let ss = KnotSet::new(
            (0..8)
                .map(|_| rng.on_circle() * c(2.0, 0.0))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let cert2 = separation(&ss, &tt, c(0.0, 0.0)).unwrap();
        assert!((cert2.theta - 0.5).abs() < 1e-12);
        assert!((cert2.delta - 2.0).abs() < 1e-12);

        // degenerate center
        assert!(matches!(
            separation(&s, &t, c(2.0, 0.0)),
            Err(Error::DegenerateCenter { index: 0 })
        ));
    }

    #[test]
    fn sector_geometry_theta_near_one_third() {
        // midpoint-center sector geometry at k = 64
        let k = 64.0f64;
        let mu = 0.5 * std::f64::consts::PI / k;
        let nu = 3.0 * std::f64::consts::PI / k;
        let theta = 2.0 * mu.sin() / nu.sin();
        assert!((theta - 0.3345).abs() < 5e-4);
        assert!((theta - 1.0 / 3.0).abs() < 0.01);
    }

    #[test]
    fn taylor_single_pair_matches_series_tail() {
        let s = KnotSet::new(vec![c(2.0, 0.0)]).unwrap();
        let t = KnotSet::new(vec![c(0.5, 0.0)]).unwrap();
        let blk = taylor_low_rank(&s, &t, c(0.0, 0.0), 2).unwrap();
        // F G^T approximates 1/(2 - 0.5) = 0.666...
        let approx: Complex64 = (0..3).map(|h| blk.f[(0, h)] * blk.g[(0, h)]).sum();
        assert!((approx - c(0.65625, 0.0)).norm() < 1e-15);
        let exact = 1.0 / 1.5;
        let err = (approx.re - exact).abs();
        // geometric tail oracle q^{k+1} / ((1-q) |s - c|)
        let q: f64 = 0.25;
        let tail = q.powi(3) / ((1.0 - q) * 2.0);
        assert!((err - tail).abs() < 1e-12);
        assert!(err <= blk.error_bound);
        assert!((blk.error_bound - 0.25f64.powi(2) / (0.75 * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn taylor_exact_when_t_equals_center() {
        let s = KnotSet::new(vec![c(3.0, 1.0), c(-2.0, 0.5)]).unwrap();
        let t = KnotSet::new(vec![c(0.7, -0.2)]).unwrap();
        let blk = taylor_low_rank(&s, &t, c(0.7, -0.2), 4).unwrap();
        assert_eq!(blk.cert.theta, 0.0);
        assert_eq!(blk.error_bound, 0.0);
        let cm = cauchy_dense(&s, &t).unwrap();
        for i in 0..2 {
            let approx: Complex64 = (0..5).map(|h| blk.f[(i, h)] * blk.g[(0, h)]).sum();
            assert!((approx - cm[(i, 0)]).norm() < 1e-14);
        }
    }

    #[test]
    fn taylor_bound_never_violated_randomized() {
        let mut rng = Rng::seed_from_u64(41);
        for trial in 0..200 {
            let n = 2 + rng.uniform_usize(30);
            let m = 2 + rng.uniform_usize(30);
            // s outside radius 1.5, t inside radius 0.5 -> theta <= 1/3
            let s = KnotSet::new(
                (0..n)
                    .map(|_| rng.on_circle() * c(1.5 + rng.uniform(), 0.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let t = KnotSet::new(
                (0..m)
                    .map(|_| rng.on_circle() * c(0.5 * rng.uniform(), 0.0))
                    .collect::<Vec<_>>(),
            )
            .unwrap();
            let k = 1 + rng.uniform_usize(20);
            let blk = taylor_low_rank(&s, &t, c(0.0, 0.0), k).unwrap();
            let cm = cauchy_dense(&s, &t).unwrap();
            let mut max_err = 0.0f64;
            for i in 0..n {
                for j in 0..m {
                    let approx: Complex64 =
                        (0..=k).map(|h| blk.f[(i, h)] * blk.g[(j, h)]).sum();
                    max_err = max_err.max((approx - cm[(i, j)]).norm());
                }
            }
            assert!(
                max_err <= blk.error_bound * (1.0 + 1e-12),
                "trial {trial}: err {max_err:.3e} > bound {:.3e}",
                blk.error_bound
            );
        }
    }

    #[test]
    fn taylor_rejects_unseparated() {
        let s = KnotSet::new(vec![c(1.0, 0.0)]).unwrap();
        let t = KnotSet::new(vec![c(2.0, 0.0)]).unwrap();
        assert!(matches!(
            taylor_low_rank(&s, &t, c(0.0, 0.0), 3),
            Err(Error::NotSeparated { .. })
        ));
    }

    #[test]
    fn rank_bound_examples() {
        assert_eq!(rank_bound(1.0 / 3.0, 0.01, 1e-8).unwrap(), 22);
        // bound already met at rank 0
        let theta: f64 = 0.5;
        let delta = 10.0;
        let eps_big = 4.0 / ((1.0 - theta) * delta * std::f64::consts::PI) * 1.01;
        assert_eq!(rank_bound(theta, delta, eps_big).unwrap(), 0);
        // monotone in theta
        let r1 = rank_bound(0.5, 0.01, 1e-8).unwrap();
        let r2 = rank_bound(0.3, 0.01, 1e-8).unwrap();
        let r3 = rank_bound(0.1, 0.01, 1e-8).unwrap();
        assert!(r1 >= r2 && r2 >= r3);
        // minimality: rho - 1 must violate the bound
        let rho = rank_bound(1.0 / 3.0, 0.01, 1e-8).unwrap();
        let front = 4.0 / ((2.0 / 3.0) * 0.01 * std::f64::consts::PI);
        assert!(front * (1.0f64 / 3.0).powi(rho as i32) <= 1e-8);
        assert!(front * (1.0f64 / 3.0).powi(rho as i32 - 1) > 1e-8);
        // invalid inputs
        assert!(rank_bound(1.2, 0.01, 1e-8).is_err());
        assert!(rank_bound(0.5, 0.01, 0.0).is_err());
    }
}
