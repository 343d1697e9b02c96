//! Functional (Moebius) transformations of Cauchy structure: shift/rotation
//! of a line onto the real axis, the circle-to-line map z -> i(z+a)/(z-a)
//! with its diagonal correction factors, and the arbitrary-knot routes
//! (line, circle with a three-arc split, or re-knotting onto a grid with
//! amplification reporting).

use super::{cached_grid_hss, cauchy_like_matvec, cauchy_like_solve, CauchyLikeOperand};
use crate::error::{Error, Result};
use crate::hss::{hss_solve, hss_solve_transposed, real_line_hss, HssApprox};
use crate::knots::{select_shift_scalar, KnotSet};
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::f64::consts::PI;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn iunit() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// Geometric detection tolerance (relative), per the routing contract.
pub const GEOMETRY_TOL: f64 = 1e-10;

/// A line c + a*R detected through a point cloud.
#[derive(Debug, Clone, Copy)]
pub struct Line {
    pub point: Complex64,
    /// unit direction
    pub direction: Complex64,
}

/// Detects a common line through all points within relative `tol`.
pub fn detect_line(points: &[Complex64], tol: f64) -> Option<Line> {
    if points.is_empty() {
        return None;
    }
    let n = points.len() as f64;
    let centroid = points.iter().sum::<Complex64>() / n;
    let far = points
        .iter()
        .max_by(|a, b| {
            (*a - centroid)
                .norm()
                .partial_cmp(&(*b - centroid).norm())
                .unwrap()
        })
        .copied()?;
    let spread = (far - centroid).norm();
    if spread == 0.0 {
        return Some(Line {
            point: centroid,
            direction: one(),
        });
    }
    let direction = (far - centroid) / spread;
    let scale = spread.max(1.0);
    for z in points {
        if ((z - centroid) / direction).im.abs() > tol * scale {
            return None;
        }
    }
    Some(Line {
        point: centroid,
        direction,
    })
}

/// Detects a common circle (Kasa least-squares fit) within relative `tol`.
pub fn detect_circle(points: &[Complex64], tol: f64) -> Option<(Complex64, f64)> {
    if points.len() < 3 {
        return None;
    }
    // normal equations for 2 a x + 2 b y + d = x^2 + y^2
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for z in points {
        let (x, y) = (z.re, z.im);
        let row = [2.0 * x, 2.0 * y, 1.0];
        let t = x * x + y * y;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * t;
        }
    }
    // 3x3 Gaussian elimination
    let mut a = m;
    let mut b = rhs;
    for k in 0..3 {
        let mut p = k;
        for i in k + 1..3 {
            if a[i][k].abs() > a[p][k].abs() {
                p = i;
            }
        }
        if a[p][k].abs() < 1e-12 * (1.0 + a.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max))
        {
            return None; // collinear points
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..3 {
            let f = a[i][k] / a[k][k];
            for j in k..3 {
                a[i][j] -= f * a[k][j];
            }
            b[i] -= f * b[k];
        }
    }
    let mut x = [0.0f64; 3];
    for i in (0..3).rev() {
        let mut acc = b[i];
        for j in i + 1..3 {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    let center = Complex64::new(x[0], x[1]);
    let r2 = x[2] + x[0] * x[0] + x[1] * x[1];
    if r2 <= 0.0 {
        return None;
    }
    let radius = r2.sqrt();
    for z in points {
        if ((z - center).norm() - radius).abs() > tol * radius.max(1.0) {
            return None;
        }
    }
    Some((center, radius))
}

/// Outcome of the line-to-real map: real images and the Cauchy scaling
/// C_{s,t} = scale * C_{s',t'}.
#[derive(Debug, Clone)]
pub struct LineMap {
    pub knots: KnotSet,
    pub scale: Complex64,
}

/// Maps knots on the line (point + direction*R) onto the real axis via
/// s' = (s - point) / direction. The returned scale is 1/direction: the
/// Cauchy matrix over the original knots equals scale times the real one.
pub fn mobius_line_to_real(knots: &KnotSet, line: &Line) -> Result<LineMap> {
    let scale_ref = knots
        .knots()
        .iter()
        .map(|z| (z - line.point).norm())
        .fold(1.0, f64::max);
    let mut mapped = Vec::with_capacity(knots.len());
    for (i, z) in knots.knots().iter().enumerate() {
        let w = (z - line.point) / line.direction;
        if w.im.abs() > GEOMETRY_TOL * scale_ref {
            return Err(Error::OffLineKnot {
                index: i,
                distance: w.im.abs(),
            });
        }
        mapped.push(Complex64::new(w.re, 0.0));
    }
    Ok(LineMap {
        knots: KnotSet::new(mapped)?,
        scale: one() / line.direction,
    })
}

/// Picks the Moebius pole on the unit circle at maximal distance from the
/// knots, over a deterministic fine grid.
pub fn select_circle_pole(knots: &[Complex64]) -> Complex64 {
    let samples = (8 * knots.len()).max(64);
    let mut best = (0.0f64, one());
    for q in 0..samples {
        let a = Complex64::from_polar(1.0, 2.0 * PI * (q as f64 + 0.37) / samples as f64);
        let d = knots
            .iter()
            .map(|z| (z - a).norm())
            .fold(f64::INFINITY, f64::min);
        if d > best.0 {
            best = (d, a);
        }
    }
    best.1
}

/// Outcome of the circle-to-line map z -> i(z+a)/(z-a): real images plus the
/// diagonal correction factors with 1/(s-t) = row_factor(s) * col_factor(t)
/// / (s' - t').
#[derive(Debug, Clone)]
pub struct CircleMap {
    pub knots: KnotSet,
    /// (i/(2a)) (s' - i), used when the knot indexes rows.
    pub row_factors: ComplexVector,
    /// (t' - i), used when the knot indexes columns.
    pub col_factors: ComplexVector,
    pub pole: Complex64,
}

pub fn mobius_circle_to_real(knots: &KnotSet, a: Complex64) -> Result<CircleMap> {
    if (a.norm() - 1.0).abs() > GEOMETRY_TOL {
        return Err(Error::InvalidScalar(format!(
            "Moebius pole must lie on the unit circle, |a| = {}",
            a.norm()
        )));
    }
    let mut mapped = Vec::with_capacity(knots.len());
    let mut rowf = ComplexVector::zeros(knots.len());
    let mut colf = ComplexVector::zeros(knots.len());
    for (i, z) in knots.knots().iter().enumerate() {
        if (z.norm() - 1.0).abs() > GEOMETRY_TOL {
            return Err(Error::OffCircleKnot {
                index: i,
                distance: (z.norm() - 1.0).abs(),
            });
        }
        let denom = z - a;
        if denom.norm() < 1e-13 {
            return Err(Error::InvalidScalar(
                "a knot coincides with the Moebius pole".into(),
            ));
        }
        let w = iunit() * (z + a) / denom;
        // the image of a unit-circle point is real up to rounding
        mapped.push(Complex64::new(w.re, 0.0));
        rowf[i] = iunit() / (2.0 * a) * (Complex64::new(w.re, 0.0) - iunit());
        colf[i] = Complex64::new(w.re, 0.0) - iunit();
    }
    Ok(CircleMap {
        knots: KnotSet::new(mapped)?,
        row_factors: rowf,
        col_factors: colf,
        pole: a,
    })
}

/// How an arbitrary-knot product/solve was routed, with the reported
/// output-error amplification.
#[derive(Debug, Clone)]
pub struct RouteReport {
    pub route: RouteKind,
    /// Certified or estimated bound on the output error (matvec) or the
    /// multiplier amplification (reknot routes).
    pub reported_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteKind {
    RealLine,
    MappedLine,
    UnitCircleArcs,
    MappedCircle,
    ReknotViaColumns,
    ReknotViaRows,
}

fn all_on_unit_circle(knots: &[Complex64]) -> bool {
    knots
        .iter()
        .all(|z| (z.norm() - 1.0).abs() <= GEOMETRY_TOL)
}

fn all_real(knots: &[Complex64]) -> bool {
    let scale = knots.iter().map(|z| z.norm()).fold(1.0, f64::max);
    knots.iter().all(|z| z.im.abs() <= GEOMETRY_TOL * scale)
}

fn arc_of(z: Complex64) -> usize {
    let a = z.arg().rem_euclid(2.0 * PI);
    (((a * 3.0) / (2.0 * PI)).floor() as usize).min(2)
}

/// Pure Cauchy matvec for unit-circle knots through the three-arc split:
/// each arc-pair submatrix maps to the real line with the pole on the arc
/// avoided by its knots.
fn circle_cauchy_matvec(
    s: &KnotSet,
    t: &KnotSet,
    x: &ComplexVector,
    eps: f64,
) -> Result<(ComplexVector, f64)> {
    let n = s.len();
    let mut y = ComplexVector::zeros(n);
    let mut bound = 0.0f64;
    let s_arcs: Vec<usize> = s.knots().iter().map(|&z| arc_of(z)).collect();
    let t_arcs: Vec<usize> = t.knots().iter().map(|&z| arc_of(z)).collect();
    for gs in 0..3 {
        for gt in 0..3 {
            let rows: Vec<usize> = (0..n).filter(|&i| s_arcs[i] == gs).collect();
            let cols: Vec<usize> = (0..t.len()).filter(|&j| t_arcs[j] == gt).collect();
            if rows.is_empty() || cols.is_empty() {
                continue;
            }
            let avoid = if gs != gt { 3 - gs - gt } else { (gs + 1) % 3 };
            let pole = Complex64::from_polar(1.0, 2.0 * PI * (avoid as f64 + 0.5) / 3.0);
            let s_sub = KnotSet::new(rows.iter().map(|&i| s.knots()[i]).collect())?;
            let t_sub = KnotSet::new(cols.iter().map(|&j| t.knots()[j]).collect())?;
            let ms = mobius_circle_to_real(&s_sub, pole)?;
            let mt = mobius_circle_to_real(&t_sub, pole)?;
            let h = real_line_hss(&ms.knots, &mt.knots, eps)?;
            let xs: ComplexVector = cols
                .iter()
                .enumerate()
                .map(|(jj, &j)| x[j] * mt.col_factors[jj])
                .collect();
            let ys = h.matvec(&xs)?;
            for (ii, &i) in rows.iter().enumerate() {
                y[i] += ms.row_factors[ii] * ys[ii];
            }
            let ufac = ms.row_factors.norm_inf();
            bound += ufac * (cols.len() as f64) * eps * xs.norm_inf();
        }
    }
    Ok((y, bound))
}

/// Approximate M * u for a Cauchy-like operand with knots in any position:
/// routed through the real line, a detected line or circle, or the
/// re-knotting reduction (which fails closed above the amplification
/// threshold; pass `None` for the default 1/(n*eps)).
pub fn cauchy_any_knots_matvec(
    m: &CauchyLikeOperand,
    u: &ComplexVector,
    eps: f64,
    amplification_threshold: Option<f64>,
) -> Result<(ComplexVector, RouteReport)> {
    let s = m.row_knots();
    let t = m.col_knots();
    let n = s.len();
    if u.len() != t.len() {
        return Err(Error::DimensionMismatch(format!(
            "matvec of {}x{} operand with vector of length {}",
            n,
            t.len(),
            u.len()
        )));
    }
    let union: Vec<Complex64> = s.knots().iter().chain(t.knots()).copied().collect();

    // real line
    if all_real(&union) {
        let h = real_line_hss(s, t, eps)?;
        let (y, bound) = cauchy_like_through(&h, m, u, eps, one())?;
        return Ok((
            y,
            RouteReport {
                route: RouteKind::RealLine,
                reported_bound: bound,
            },
        ));
    }
    // general line
    if let Some(line) = detect_line(&union, GEOMETRY_TOL) {
        let ms = mobius_line_to_real(s, &line)?;
        let mt = mobius_line_to_real(t, &line)?;
        let h = real_line_hss(&ms.knots, &mt.knots, eps)?;
        let (y, bound) = cauchy_like_through(&h, m, u, eps, ms.scale)?;
        return Ok((
            y,
            RouteReport {
                route: RouteKind::MappedLine,
                reported_bound: bound,
            },
        ));
    }
    // unit circle via the three-arc split, general circle by rescaling
    let circle = if all_on_unit_circle(&union) {
        Some((Complex64::new(0.0, 0.0), 1.0))
    } else {
        detect_circle(&union, GEOMETRY_TOL)
    };
    if let Some((center, radius)) = circle {
        let shift = |k: &KnotSet| -> Result<KnotSet> {
            KnotSet::new(
                k.knots()
                    .iter()
                    .map(|z| (z - center) / radius)
                    .collect::<Vec<_>>(),
            )
        };
        let s1 = shift(s)?;
        let t1 = shift(t)?;
        // per-term composition through the pure circle matvec
        let mut y = ComplexVector::zeros(n);
        let mut bound = 0.0f64;
        for (fc, gc) in m.coefficient_pairs() {
            let xg = gc.hadamard(u);
            let (cy, cb) = circle_cauchy_matvec(&s1, &t1, &xg, eps)?;
            for i in 0..n {
                y[i] += fc[i] * cy[i] / radius;
            }
            bound += cb * fc.norm_inf() / radius;
        }
        let kind = if center.norm() <= GEOMETRY_TOL && (radius - 1.0).abs() <= GEOMETRY_TOL {
            RouteKind::UnitCircleArcs
        } else {
            RouteKind::MappedCircle
        };
        return Ok((
            y,
            RouteReport {
                route: kind,
                reported_bound: bound,
            },
        ));
    }
    // arbitrary scattered knots: re-knot onto a grid
    reknot_matvec(m, u, eps, amplification_threshold)
}

/// Applies a Cauchy-like operand through a prebuilt pure structure for its
/// basic matrix (the structure may be over mapped knots; `scale` carries the
/// Cauchy scaling of the map).
fn cauchy_like_through(
    h: &HssApprox,
    m: &CauchyLikeOperand,
    u: &ComplexVector,
    eps: f64,
    scale: Complex64,
) -> Result<(ComplexVector, f64)> {
    let n = m.row_knots().len();
    let mut y = ComplexVector::zeros(n);
    let mut bound = 0.0;
    for (fc, gc) in m.coefficient_pairs() {
        let xg = gc.hadamard(u);
        let cy = h.matvec(&xg)?;
        for i in 0..n {
            y[i] += fc[i] * cy[i] * scale;
        }
        bound += fc.norm_inf() * scale.norm() * (u.len() as f64) * eps * xg.norm_inf();
    }
    Ok((y, bound))
}

/// Grid scalar for the re-knotting multiplier: the grid points must avoid
/// the knots being multiplied, which is exactly the rotation-selection
/// criterion.
fn reknot_grid_scalar(t: &KnotSet) -> Complex64 {
    select_shift_scalar(t).0
}

/// P = M C_{t,e}: the re-knotted CV-like operand (coefficient pairs of
/// length d + 1) per the Sylvester identity with D_t C - C D_grid = ones^2.
fn reknot_operand(
    m: &CauchyLikeOperand,
    h_mult: &HssApprox,
    e: Complex64,
) -> Result<CauchyLikeOperand> {
    let t = m.col_knots();
    let grid = KnotSet::dft_grid(e, t.len())?;
    let mut f_cols = Vec::with_capacity(m.length() + 1);
    let mut g_cols = Vec::with_capacity(m.length() + 1);
    for (fc, gc) in m.coefficient_pairs() {
        f_cols.push(fc.clone());
        g_cols.push(h_mult.matvec_transposed(&gc)?);
    }
    // M * ones by direct kernel summation (the arbitrary-knot fallback has
    // no fast basic product; this is one quadratic pass)
    let ones = ComplexVector::ones(t.len());
    let mut m_ones = ComplexVector::zeros(m.row_knots().len());
    for (fc, gc) in m.coefficient_pairs() {
        let inner = crate::kernels::cauchy_matvec_direct(m.row_knots(), t, &gc.hadamard(&ones));
        for i in 0..m_ones.len() {
            m_ones[i] += fc[i] * inner[i];
        }
    }
    f_cols.push(m_ones);
    g_cols.push(ComplexVector::ones(t.len()));
    CauchyLikeOperand::new(m.row_knots().clone(), grid, f_cols, g_cols)
}

fn reknot_matvec(
    m: &CauchyLikeOperand,
    u: &ComplexVector,
    eps: f64,
    amplification_threshold: Option<f64>,
) -> Result<(ComplexVector, RouteReport)> {
    let n = m.row_knots().len();
    let threshold = amplification_threshold.unwrap_or(1.0 / (n as f64 * eps));
    // two symmetric reductions: through the column knots or the row knots;
    // pick the better-conditioned multiplier
    let e_t = reknot_grid_scalar(m.col_knots());
    let h_t = cached_grid_hss(m.col_knots(), e_t, m.col_knots().len(), &[], eps)?;
    let kappa_t = h_t.condition_estimate().unwrap_or(f64::INFINITY);
    let e_s = reknot_grid_scalar(m.row_knots());
    let h_s = cached_grid_hss(m.row_knots(), e_s, m.row_knots().len(), &[], eps)?;
    let kappa_s = h_s.condition_estimate().unwrap_or(f64::INFINITY);

    let (kappa, via_cols) = if kappa_t <= kappa_s {
        (kappa_t, true)
    } else {
        (kappa_s, false)
    };
    if kappa > threshold {
        return Err(Error::ConditioningWarning {
            amplification: kappa,
            threshold,
        });
    }
    if via_cols {
        // x = P (C_{t,e}^{-1} u)
        let z = hss_solve(&h_t, u)?;
        let p = reknot_operand(m, &h_t, e_t)?;
        let y = cauchy_like_matvec(&p, &z, eps)?;
        Ok((
            y,
            RouteReport {
                route: RouteKind::ReknotViaColumns,
                reported_bound: kappa,
            },
        ))
    } else {
        // M^T = sum diag(g) (-C_{t,s}) diag(f); P' = M^T C_{s,e};
        // x = M u = C_{s,e}^{-T} (P'^T u)
        let mt = transpose_operand(m)?;
        let p = reknot_operand(&mt, &h_s, e_s)?;
        let e = p.col_knots().dft_grid_scalar().expect("grid by construction");
        let h_p = cached_grid_hss(
            p.row_knots(),
            e,
            p.col_knots().len(),
            &p.coefficient_pairs(),
            eps,
        )?;
        let w = h_p.matvec_transposed(u)?;
        let y = hss_solve_transposed(&h_s, &w)?;
        Ok((
            y,
            RouteReport {
                route: RouteKind::ReknotViaRows,
                reported_bound: kappa,
            },
        ))
    }
}

fn transpose_operand(m: &CauchyLikeOperand) -> Result<CauchyLikeOperand> {
    let f_cols: Vec<ComplexVector> = m.g_cols.clone();
    let g_cols: Vec<ComplexVector> = m
        .f_cols
        .iter()
        .map(|c| c.scale(Complex64::new(-1.0, 0.0)))
        .collect();
    CauchyLikeOperand::new(m.t.clone(), m.s.clone(), f_cols, g_cols)
}

/// Approximate solve of M x = b for arbitrary knots, routed like the matvec.
/// Line and circle routes handle the pure Cauchy case directly; everything
/// else goes through the re-knotting reduction.
pub fn cauchy_any_knots_solve(
    m: &CauchyLikeOperand,
    b: &ComplexVector,
    eps: f64,
    amplification_threshold: Option<f64>,
) -> Result<(ComplexVector, RouteReport)> {
    let s = m.row_knots();
    let t = m.col_knots();
    let n = s.len();
    if n != t.len() || b.len() != n {
        return Err(Error::DimensionMismatch(
            "solve needs a square operand and a matching rhs".into(),
        ));
    }
    let union: Vec<Complex64> = s.knots().iter().chain(t.knots()).copied().collect();
    if m.is_pure() {
        if all_real(&union) {
            let h = real_line_hss(s, t, eps)?;
            let x = hss_solve(&h, b)?;
            return Ok((
                x,
                RouteReport {
                    route: RouteKind::RealLine,
                    reported_bound: n as f64 * eps,
                },
            ));
        }
        if let Some(line) = detect_line(&union, GEOMETRY_TOL) {
            let ms = mobius_line_to_real(s, &line)?;
            let mt = mobius_line_to_real(t, &line)?;
            let h = real_line_hss(&ms.knots, &mt.knots, eps)?;
            // C = scale C': x = C'^{-1} (b / scale)
            let x = hss_solve(&h, &b.scale(one() / ms.scale))?;
            return Ok((
                x,
                RouteReport {
                    route: RouteKind::MappedLine,
                    reported_bound: n as f64 * eps,
                },
            ));
        }
        if all_on_unit_circle(&union) {
            // single-pole map: C = diag(u) C' diag(v)
            let pole = select_circle_pole(&union);
            let ms = mobius_circle_to_real(s, pole)?;
            let mt = mobius_circle_to_real(t, pole)?;
            let h = real_line_hss(&ms.knots, &mt.knots, eps)?;
            let rhs: ComplexVector =
                ComplexVector::from_fn(n, |i| b[i] / ms.row_factors[i]);
            let y = hss_solve(&h, &rhs)?;
            let x = ComplexVector::from_fn(n, |j| y[j] / mt.col_factors[j]);
            let amp = ms.row_factors.norm_inf() * mt.col_factors.norm_inf();
            return Ok((
                x,
                RouteReport {
                    route: RouteKind::UnitCircleArcs,
                    reported_bound: amp * n as f64 * eps,
                },
            ));
        }
        if let Some((center, radius)) = detect_circle(&union, GEOMETRY_TOL) {
            let shift = |k: &KnotSet| -> Result<KnotSet> {
                KnotSet::new(
                    k.knots()
                        .iter()
                        .map(|z| (z - center) / radius)
                        .collect::<Vec<_>>(),
                )
            };
            let s1 = shift(s)?;
            let t1 = shift(t)?;
            let sub = CauchyLikeOperand::pure(s1, t1)?;
            let (x1, rep) = cauchy_any_knots_solve(&sub, &b.scale(Complex64::new(radius, 0.0)), eps, amplification_threshold)?;
            // C = (1/radius) C1: x = C1^{-1} (radius b)
            return Ok((
                x1,
                RouteReport {
                    route: RouteKind::MappedCircle,
                    reported_bound: rep.reported_bound,
                },
            ));
        }
    }
    // re-knotting reduction: P = M C_{t,e}, P y = b, x = C_{t,e} y
    let threshold = amplification_threshold.unwrap_or(1.0 / (n as f64 * eps));
    let e_t = reknot_grid_scalar(t);
    let h_t = cached_grid_hss(t, e_t, n, &[], eps)?;
    let kappa = h_t.condition_estimate().unwrap_or(f64::INFINITY);
    if kappa > threshold {
        return Err(Error::ConditioningWarning {
            amplification: kappa,
            threshold,
        });
    }
    let p = reknot_operand(m, &h_t, e_t)?;
    let y = cauchy_like_solve(&p, b, eps)?;
    let x = h_t.matvec(&y)?;
    Ok((
        x,
        RouteReport {
            route: RouteKind::ReknotViaColumns,
            reported_bound: kappa,
        },
    ))
}
