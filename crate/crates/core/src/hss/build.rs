//! Construction of the hierarchical approximation: angular sector partition
//! of circle-grid Cauchy matrices with pairwise arc merging, interval
//! bisection for real knots, and certified per-block compression.

use super::{
    separation_slices, taylor_bound, taylor_factors, DenseBlock, HssApprox, HssGeometry,
    LowRankBlock, RANK_CAP,
};
use crate::error::{Error, Result};
use crate::knots::KnotSet;
use crate::matrix::DenseMatrix;
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Merging stops at this arc count; all non-adjacent arc pairs are
/// compressed at the final level. Eight arcs keep every certified theta
/// below 0.43.
const TOP_ARCS: usize = 8;

/// Entry oracle for a Cauchy-like matrix sum_d diag(f_d) C_{s,t} diag(g_d);
/// empty coefficient list means the pure Cauchy kernel.
#[derive(Debug, Clone)]
pub struct CauchyLikeKernel {
    pub s: Vec<Complex64>,
    pub t: Vec<Complex64>,
    pub coeff: Vec<(ComplexVector, ComplexVector)>,
}

impl CauchyLikeKernel {
    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        let inv = Complex64::new(1.0, 0.0) / (self.s[i] - self.t[j]);
        if self.coeff.is_empty() {
            inv
        } else {
            let num: Complex64 = self.coeff.iter().map(|(f, g)| f[i] * g[j]).sum();
            num * inv
        }
    }
}

/// The angular sector partition of a CV matrix per the merging construction.
#[derive(Debug, Clone)]
pub struct SectorPartition {
    /// Sector count k.
    pub sector_count: usize,
    /// Nominal knots per sector (n / k, rounded).
    pub cols_per_sector: usize,
    /// Row permutation ordering the s-knots by polar angle in the rotated
    /// frame of the column grid.
    pub row_perm: Vec<usize>,
    /// Per-sector contiguous row ranges in the permuted order.
    pub row_sector_ranges: Vec<(usize, usize)>,
    /// Per-sector contiguous column ranges (the grid is already sorted).
    pub col_sector_ranges: Vec<(usize, usize)>,
    /// Arc-midpoint centers c_p.
    pub centers: Vec<Complex64>,
    /// Closed-form separation estimate 2 sin(mu)/sin(nu) at this k.
    pub theta_estimate: f64,
}

/// Closed-form sector separation estimate with the wedge distance capped at
/// the perpendicular regime.
pub fn sector_theta_estimate(k: usize) -> f64 {
    let mu = 0.5 * PI / k as f64;
    let nu = (3.0 * PI / k as f64).min(0.5 * PI);
    2.0 * mu.sin() / nu.sin()
}

fn rotated_angle(z: Complex64, phase: f64) -> f64 {
    let a = (z.arg() - phase).rem_euclid(2.0 * PI);
    if a >= 2.0 * PI {
        0.0
    } else {
        a
    }
}

/// Angular sector partition of the knots of C_{s, e-grid} into k semi-open
/// sectors with arc-midpoint centers and wraparound adjacency. Requires
/// k >= 8 (coarser partitions leave the estimate theta >= 1).
pub fn sector_partition(s: &KnotSet, e: Complex64, n_cols: usize, k: usize) -> Result<SectorPartition> {
    if k < 8 {
        return Err(Error::PartitionTooCoarse(format!(
            "k = {k} < 8 leaves the sector separation estimate at or above 1"
        )));
    }
    if e.norm() == 0.0 {
        return Err(Error::InvalidScalar("grid scalar e = 0".into()));
    }
    let phase = e.arg();
    let n = s.len();
    let mut row_perm: Vec<usize> = (0..n).collect();
    let angles: Vec<f64> = s
        .knots()
        .iter()
        .map(|&z| rotated_angle(z, phase))
        .collect();
    row_perm.sort_by(|&a, &b| angles[a].partial_cmp(&angles[b]).unwrap().then(a.cmp(&b)));
    let sector_of = |angle: f64| -> usize {
        (((angle * k as f64) / (2.0 * PI)).floor() as usize).min(k - 1)
    };
    let mut row_ranges = vec![(0usize, 0usize); k];
    {
        let mut counts = vec![0usize; k];
        for &i in &row_perm {
            counts[sector_of(angles[i])] += 1;
        }
        let mut acc = 0;
        for (q, c) in counts.iter().enumerate() {
            row_ranges[q] = (acc, acc + c);
            acc += c;
        }
    }
    let mut col_ranges = vec![(0usize, 0usize); k];
    for (q, range) in col_ranges.iter_mut().enumerate() {
        *range = (q * n_cols / k, (q + 1) * n_cols / k);
    }
    let centers: Vec<Complex64> = (0..k)
        .map(|p| e * Complex64::from_polar(1.0, (2 * p + 1) as f64 * PI / k as f64))
        .collect();
    Ok(SectorPartition {
        sector_count: k,
        cols_per_sector: n_cols.div_euclid(k).max(1),
        row_perm,
        row_sector_ranges: row_ranges,
        col_sector_ranges: col_ranges,
        centers,
        theta_estimate: sector_theta_estimate(k),
    })
}

/// Per-arc column target so dense leaves and admissible blocks balance.
fn column_target(eps: f64) -> Result<usize> {
    Ok(super::rank_bound(1.0 / 3.0, 1.0, eps)?.max(8))
}

fn dense_fallback(kernel: CauchyLikeKernel, eps: f64, geometry: HssGeometry) -> HssApprox {
    let rows = kernel.s.len();
    let cols = kernel.t.len();
    let entries = DenseMatrix::from_fn(rows, cols, |i, j| kernel.entry(i, j));
    HssApprox {
        rows,
        cols,
        epsilon: eps,
        row_perm: (0..rows).collect(),
        col_perm: (0..cols).collect(),
        dense_blocks: vec![DenseBlock {
            row_range: (0, rows),
            col_range: (0, cols),
            entries,
        }],
        low_rank_blocks: vec![],
        geometry,
        levels: 0,
        leaf_sectors: 0,
        band_lu: OnceLock::new(),
        condition: OnceLock::new(),
        kernel,
    }
}

/// Picks the compression center for a block: the nominal midpoint unless a
/// row knot (numerically) sits on it, in which case candidates across the
/// middle half of the arc/interval are scanned for the largest clearance.
fn choose_center(
    nominal: Complex64,
    candidates: impl Fn(f64) -> Complex64,
    row_knots: &[Complex64],
    scale: f64,
) -> Result<Complex64> {
    let clearance = |c: Complex64| -> f64 {
        row_knots
            .iter()
            .map(|z| (z - c).norm())
            .fold(f64::INFINITY, f64::min)
    };
    if clearance(nominal) > 1e-12 * scale {
        return Ok(nominal);
    }
    let mut best = (0.0f64, nominal);
    for j in 0..17 {
        let off = -0.25 + 0.5 * j as f64 / 16.0;
        let c = candidates(off);
        let d = clearance(c);
        if d > best.0 {
            best = (d, c);
        }
    }
    if best.0 <= 1e-15 * scale {
        return Err(Error::PartitionTooCoarse(
            "no center candidate clears the row knots".into(),
        ));
    }
    Ok(best.1)
}

/// Compresses one admissible block against a certified center: Taylor
/// factors at the order meeting eps/2, expanded through the Cauchy-like
/// coefficients, then recompressed to the numerical rank at eps/2.
#[allow(clippy::too_many_arguments)]
fn compress_block(
    kernel: &CauchyLikeKernel,
    row_ids: &[usize],
    col_ids: &[usize],
    center: Complex64,
    eps: f64,
    level: usize,
    sector: usize,
    row_range: (usize, usize),
    col_range: (usize, usize),
) -> Result<LowRankBlock> {
    let s_knots: Vec<Complex64> = row_ids.iter().map(|&i| kernel.s[i]).collect();
    let t_knots: Vec<Complex64> = col_ids.iter().map(|&j| kernel.t[j]).collect();
    let cert = separation_slices(&s_knots, &t_knots, center)?;
    if cert.theta >= 1.0 {
        return Err(Error::NotSeparated { theta: cert.theta });
    }
    // coefficient amplification of the entrywise bound
    let coeff_scale: f64 = if kernel.coeff.is_empty() {
        1.0
    } else {
        kernel
            .coeff
            .iter()
            .map(|(f, g)| {
                let fm = row_ids.iter().map(|&i| f[i].norm()).fold(0.0, f64::max);
                let gm = col_ids.iter().map(|&j| g[j].norm()).fold(0.0, f64::max);
                fm * gm
            })
            .sum()
    };
    let target = eps / 2.0 / coeff_scale.max(1e-300);
    let mut k = 0usize;
    while taylor_bound(&cert, k) > target {
        k += 1;
        if k > RANK_CAP {
            return Err(Error::RankOverflow {
                needed: k,
                cap: RANK_CAP,
            });
        }
    }
    let (f0, g0) = taylor_factors(&s_knots, &t_knots, center, k);
    let taylor_part = taylor_bound(&cert, k) * coeff_scale;
    // expand through the coefficients
    let (f_full, g_full) = if kernel.coeff.is_empty() {
        (f0, g0)
    } else {
        let d = kernel.coeff.len();
        let r = k + 1;
        let mut f = DenseMatrix::zeros(s_knots.len(), d * r);
        let mut g = DenseMatrix::zeros(t_knots.len(), d * r);
        for (di, (fc, gc)) in kernel.coeff.iter().enumerate() {
            for (i, &ri) in row_ids.iter().enumerate() {
                for h in 0..r {
                    f[(i, di * r + h)] = fc[ri] * f0[(i, h)];
                }
            }
            for (j, &cj) in col_ids.iter().enumerate() {
                for h in 0..r {
                    g[(j, di * r + h)] = gc[cj] * g0[(j, h)];
                }
            }
        }
        (f, g)
    };
    let (f, g, trunc_err) = recompress(&f_full, &g_full, eps / 2.0);
    Ok(LowRankBlock {
        row_range,
        col_range,
        f,
        g,
        cert,
        error_bound: taylor_part + trunc_err,
        level,
        sector,
    })
}

/// Rounds the factor pair down to its numerical rank: thin QR of both sides,
/// SVD of the small core, singular values at or below `tol` dropped. The
/// returned scalar bounds the entrywise truncation error.
fn recompress(f: &DenseMatrix, g: &DenseMatrix, tol: f64) -> (DenseMatrix, DenseMatrix, f64) {
    let r = f.cols();
    if r <= 2 {
        return (f.clone(), g.clone(), 0.0);
    }
    let (qf, rf) = f.qr_thin();
    let (qg, rg) = g.qr_thin();
    let core = rf.matmul(&rg.transpose()).expect("core dims agree");
    let (u, sigma, v) = core.svd();
    let keep = sigma.iter().take_while(|&&s| s > tol).count().max(1);
    let dropped = if keep < sigma.len() { sigma[keep] } else { 0.0 };
    let mut f_new = DenseMatrix::zeros(f.rows(), keep);
    for i in 0..f.rows() {
        for k in 0..keep {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..u.rows() {
                acc += qf[(i, j)] * u[(j, k)];
            }
            f_new[(i, k)] = acc * sigma[k];
        }
    }
    let mut g_new = DenseMatrix::zeros(g.rows(), keep);
    for i in 0..g.rows() {
        for k in 0..keep {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..v.rows() {
                acc += qg[(i, j)] * v[(j, k)].conj();
            }
            g_new[(i, k)] = acc;
        }
    }
    (f_new, g_new, dropped)
}

fn adjacent(p: usize, q: usize, k: usize, wrap: bool) -> bool {
    if p == q {
        return true;
    }
    let d = if p > q { p - q } else { q - p };
    if wrap {
        d == 1 || d == k - 1
    } else {
        d == 1
    }
}

/// Builds the hierarchical approximation of the (possibly Cauchy-like)
/// matrix with column knots on the grid (e * omega_m^j).
pub fn build_cauchy_like_hss(
    s: &KnotSet,
    e: Complex64,
    n_cols: usize,
    coeff: Vec<(ComplexVector, ComplexVector)>,
    eps: f64,
) -> Result<HssApprox> {
    if eps <= 0.0 {
        return Err(Error::InvalidTolerance(eps));
    }
    let grid = KnotSet::dft_grid(e, n_cols)?;
    s.assert_disjoint(&grid)?;
    for (fc, gc) in &coeff {
        if fc.len() != s.len() || gc.len() != n_cols {
            return Err(Error::DimensionMismatch(
                "coefficient column lengths do not match the knot counts".into(),
            ));
        }
    }
    let kernel = CauchyLikeKernel {
        s: s.knots().to_vec(),
        t: grid.knots().to_vec(),
        coeff,
    };
    let h0 = column_target(eps)?;
    let n = n_cols;
    if s.len().min(n) < 4 * h0 {
        return Ok(dense_fallback(kernel, eps, HssGeometry::DenseFallback));
    }
    // leaf arc count: power-of-two multiple of TOP_ARCS targeting n/h0 columns
    let mut k0 = TOP_ARCS;
    while 2 * k0 <= n / h0 {
        k0 *= 2;
    }
    let levels = (k0 / TOP_ARCS).trailing_zeros() as usize;
    let part = sector_partition(s, e, n, k0)?;
    let phase = e.arg();
    let radius = e.norm();

    // arc ranges at a given level: union of consecutive leaf sectors
    let arc_rows = |level: usize, a: usize| -> (usize, usize) {
        let w = 1usize << level;
        (
            part.row_sector_ranges[a * w].0,
            part.row_sector_ranges[(a + 1) * w - 1].1,
        )
    };
    let arc_cols = |level: usize, a: usize| -> (usize, usize) {
        let w = 1usize << level;
        (
            part.col_sector_ranges[a * w].0,
            part.col_sector_ranges[(a + 1) * w - 1].1,
        )
    };

    let mut low_rank: Vec<LowRankBlock> = Vec::new();
    for level in 0..=levels {
        let k_l = k0 >> level;
        let arc_width = 2.0 * PI / k_l as f64;
        for q in 0..k_l {
            let (c0, c1) = arc_cols(level, q);
            if c0 == c1 {
                continue;
            }
            let col_ids: Vec<usize> = (c0..c1).collect(); // grid columns are identity-permuted
            let mid = (q as f64 + 0.5) * arc_width;
            // far-field arcs handled at this level, merged into maximal runs
            // of consecutive arcs so the admissible blocks per column arc
            // stay few and the column factors are not duplicated
            let interacting: Vec<usize> = (0..k_l)
                .filter(|&p| {
                    !adjacent(p, q, k_l, true)
                        && (level == levels || adjacent(p / 2, q / 2, k_l / 2, true))
                })
                .collect();
            let mut runs: Vec<(usize, usize)> = Vec::new();
            for &p in &interacting {
                match runs.last_mut() {
                    Some(run) if run.1 + 1 == p => run.1 = p,
                    _ => runs.push((p, p)),
                }
            }
            for (p_first, p_last) in runs {
                let r0 = arc_rows(level, p_first).0;
                let r1 = arc_rows(level, p_last).1;
                if r0 == r1 {
                    continue;
                }
                let row_ids: Vec<usize> = part.row_perm[r0..r1].to_vec();
                let row_knots: Vec<Complex64> = row_ids.iter().map(|&i| kernel.s[i]).collect();
                let center = choose_center(
                    Complex64::from_polar(radius, phase + mid),
                    |off| Complex64::from_polar(radius, phase + mid + off * arc_width),
                    &row_knots,
                    radius.max(1.0),
                )?;
                let blk = compress_block(
                    &kernel,
                    &row_ids,
                    &col_ids,
                    center,
                    eps,
                    level,
                    q,
                    (r0, r1),
                    (c0, c1),
                )?;
                low_rank.push(blk);
            }
        }
    }

    // dense extended-diagonal leaves
    let mut dense_blocks = Vec::new();
    for q in 0..k0 {
        let (c0, c1) = part.col_sector_ranges[q];
        if c0 == c1 {
            continue;
        }
        for dp in [k0 - 1, 0, 1] {
            let p = (q + dp) % k0;
            let (r0, r1) = part.row_sector_ranges[p];
            if r0 == r1 {
                continue;
            }
            let entries = DenseMatrix::from_fn(r1 - r0, c1 - c0, |i, j| {
                kernel.entry(part.row_perm[r0 + i], c0 + j)
            });
            dense_blocks.push(DenseBlock {
                row_range: (r0, r1),
                col_range: (c0, c1),
                entries,
            });
        }
    }

    Ok(HssApprox {
        rows: s.len(),
        cols: n,
        epsilon: eps,
        row_perm: part.row_perm,
        col_perm: (0..n).collect(),
        dense_blocks,
        low_rank_blocks: low_rank,
        geometry: HssGeometry::Circle { e },
        levels,
        leaf_sectors: k0,
        band_lu: OnceLock::new(),
        condition: OnceLock::new(),
        kernel,
    })
}

/// Hierarchical approximation of C_{s, e-grid}.
pub fn build_cv_hss(s: &KnotSet, e: Complex64, eps: f64) -> Result<HssApprox> {
    build_cauchy_like_hss(s, e, s.len(), vec![], eps)
}

/// Hierarchical approximation of C_{s,t} for real disjoint knot sets via
/// interval bisection; admissible ranks are n-independent here.
pub fn real_line_hss(s: &KnotSet, t: &KnotSet, eps: f64) -> Result<HssApprox> {
    if eps <= 0.0 {
        return Err(Error::InvalidTolerance(eps));
    }
    let tol = 1e-10;
    for (i, z) in s.knots().iter().enumerate() {
        if z.im.abs() > tol * z.norm().max(1.0) {
            return Err(Error::NonRealKnot {
                index: i,
                imag: z.im,
            });
        }
    }
    for (j, z) in t.knots().iter().enumerate() {
        if z.im.abs() > tol * z.norm().max(1.0) {
            return Err(Error::NonRealKnot {
                index: j,
                imag: z.im,
            });
        }
    }
    s.assert_disjoint(t)?;
    let kernel = CauchyLikeKernel {
        s: s.knots().to_vec(),
        t: t.knots().to_vec(),
        coeff: vec![],
    };
    let rows = s.len();
    let cols = t.len();

    // sorted orders
    let mut row_perm: Vec<usize> = (0..rows).collect();
    row_perm.sort_by(|&a, &b| kernel.s[a].re.partial_cmp(&kernel.s[b].re).unwrap());
    let mut col_perm: Vec<usize> = (0..cols).collect();
    col_perm.sort_by(|&a, &b| kernel.t[a].re.partial_cmp(&kernel.t[b].re).unwrap());
    let s_sorted: Vec<f64> = row_perm.iter().map(|&i| kernel.s[i].re).collect();
    let t_sorted: Vec<f64> = col_perm.iter().map(|&j| kernel.t[j].re).collect();

    // globally separated sets compress into a single block
    let t_lo = t_sorted[0];
    let t_hi = t_sorted[cols - 1];
    let global_center = Complex64::new(0.5 * (t_lo + t_hi), 0.0);
    if let Ok(cert) = separation_slices(&kernel.s, &kernel.t, global_center) {
        if cert.theta <= 0.5 {
            let row_ids: Vec<usize> = row_perm.clone();
            let col_ids: Vec<usize> = col_perm.clone();
            let blk = compress_block(
                &kernel,
                &row_ids,
                &col_ids,
                global_center,
                eps,
                0,
                0,
                (0, rows),
                (0, cols),
            )?;
            return Ok(HssApprox {
                rows,
                cols,
                epsilon: eps,
                row_perm,
                col_perm,
                dense_blocks: vec![],
                low_rank_blocks: vec![blk],
                geometry: HssGeometry::Line,
                levels: 0,
                leaf_sectors: 1,
                band_lu: OnceLock::new(),
                condition: OnceLock::new(),
                kernel,
            });
        }
    }

    let h0 = column_target(eps)?;
    let n = rows.max(cols);
    if n < 4 * h0 {
        return Ok(dense_fallback(kernel, eps, HssGeometry::DenseFallback));
    }
    let mut leaves = 4usize;
    while 2 * leaves <= n / h0 {
        leaves *= 2;
    }
    let depth = leaves.trailing_zeros() as usize; // levels 0..depth-? top has 2 nodes
    let lo = s_sorted[0].min(t_lo);
    let hi = (s_sorted[rows - 1].max(t_hi)) * (1.0 + 1e-12) + 1e-300;
    let span = (hi - lo).max(f64::MIN_POSITIVE);

    // contiguous ranges per node via binary search over the sorted values
    let node_range = |values: &[f64], level: usize, a: usize| -> (usize, usize) {
        let k_l = leaves >> level;
        let w = span / k_l as f64;
        let left = lo + a as f64 * w;
        let right = lo + (a + 1) as f64 * w;
        let start = values.partition_point(|&v| v < left);
        let end = values.partition_point(|&v| v < right);
        (start, end)
    };

    let mut low_rank = Vec::new();
    // levels 0 (leaves) .. depth-2 (4 nodes); the 2-node level has no
    // non-adjacent pairs
    for level in 0..depth.saturating_sub(1) {
        let k_l = leaves >> level;
        let w = span / k_l as f64;
        for q in 0..k_l {
            let (c0, c1) = node_range(&t_sorted, level, q);
            if c0 == c1 {
                continue;
            }
            let col_ids: Vec<usize> = col_perm[c0..c1].to_vec();
            let mid = lo + (q as f64 + 0.5) * w;
            let interacting: Vec<usize> = (0..k_l)
                .filter(|&p| {
                    !adjacent(p, q, k_l, false) && adjacent(p / 2, q / 2, k_l / 2, false)
                })
                .collect();
            let mut runs: Vec<(usize, usize)> = Vec::new();
            for &p in &interacting {
                match runs.last_mut() {
                    Some(run) if run.1 + 1 == p => run.1 = p,
                    _ => runs.push((p, p)),
                }
            }
            for (p_first, p_last) in runs {
                let r0 = node_range(&s_sorted, level, p_first).0;
                let r1 = node_range(&s_sorted, level, p_last).1;
                if r0 == r1 {
                    continue;
                }
                let row_ids: Vec<usize> = row_perm[r0..r1].to_vec();
                let row_knots: Vec<Complex64> = row_ids.iter().map(|&i| kernel.s[i]).collect();
                let center = choose_center(
                    Complex64::new(mid, 0.0),
                    |off| Complex64::new(mid + off * w, 0.0),
                    &row_knots,
                    span,
                )?;
                let blk = compress_block(
                    &kernel,
                    &row_ids,
                    &col_ids,
                    center,
                    eps,
                    level,
                    q,
                    (r0, r1),
                    (c0, c1),
                )?;
                low_rank.push(blk);
            }
        }
    }

    let mut dense_blocks = Vec::new();
    for q in 0..leaves {
        let (c0, c1) = node_range(&t_sorted, 0, q);
        if c0 == c1 {
            continue;
        }
        for p in q.saturating_sub(1)..=(q + 1).min(leaves - 1) {
            let (r0, r1) = node_range(&s_sorted, 0, p);
            if r0 == r1 {
                continue;
            }
            let entries = DenseMatrix::from_fn(r1 - r0, c1 - c0, |i, j| {
                kernel.entry(row_perm[r0 + i], col_perm[c0 + j])
            });
            dense_blocks.push(DenseBlock {
                row_range: (r0, r1),
                col_range: (c0, c1),
                entries,
            });
        }
    }

    Ok(HssApprox {
        rows,
        cols,
        epsilon: eps,
        row_perm,
        col_perm,
        dense_blocks,
        low_rank_blocks: low_rank,
        geometry: HssGeometry::Line,
        levels: depth.saturating_sub(1),
        leaf_sectors: leaves,
        band_lu: OnceLock::new(),
        condition: OnceLock::new(),
        kernel,
    })
}
