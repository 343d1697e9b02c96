//! Polynomial and rational multipoint evaluation/interpolation on top of the
//! Vandermonde and Cauchy pipelines, and the hierarchical log-kernel
//! summation for products prod_j (s - t_j).

use super::mobius::{cauchy_any_knots_matvec, cauchy_any_knots_solve};
use super::{vandermonde_matvec, vandermonde_solve, CauchyLikeOperand};
use crate::error::{Error, Result};
use crate::fft::idft;
use crate::knots::KnotSet;
use crate::vector::ComplexVector;
use num_complex::Complex64;

/// Dense polynomial with ascending coefficients; trailing zeros are kept as
/// given (the degree is formal).
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptyInput("polynomial with no coefficients"));
        }
        for (i, z) in coeffs.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry(i));
            }
        }
        Ok(Self { coeffs })
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Formal degree: index of the last stored coefficient.
    pub fn formal_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Horner evaluation at one point.
    pub fn eval(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

/// Evaluates p at every knot via the fast Vandermonde product. The
/// coefficient count must not exceed the knot count (pad the knots instead).
pub fn poly_multipoint_eval(
    p: &Polynomial,
    s: &KnotSet,
    eps: f64,
) -> Result<ComplexVector> {
    let n = s.len();
    if p.coeffs.len() > n {
        return Err(Error::Inconsistent(format!(
            "polynomial has {} coefficients but only {} evaluation knots",
            p.coeffs.len(),
            n
        )));
    }
    let mut padded = p.coeffs.clone();
    padded.resize(n, Complex64::new(0.0, 0.0));
    vandermonde_matvec(s, &padded.into(), eps)
}

/// Interpolates the coefficients from values at the knots (the inverse
/// Vandermonde pipeline; fails closed on ill-conditioned knot sets).
pub fn poly_interpolate(s: &KnotSet, values: &ComplexVector, eps: f64) -> Result<Polynomial> {
    let x = vandermonde_solve(s, values, eps)?;
    Polynomial::new(x.into_vec())
}

/// Evaluates v(x) = sum_j u_j / (x - t_j) at all s_i: the Cauchy product
/// C_{s,t} u through the geometry-routed fast paths.
pub fn rational_eval(
    s: &KnotSet,
    t: &KnotSet,
    u: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    let m = CauchyLikeOperand::pure(s.clone(), t.clone())?;
    cauchy_any_knots_matvec(&m, u, eps, None).map(|(v, _)| v)
}

/// Recovers the residues u from values v_i = v(s_i): the Cauchy solve.
pub fn rational_interpolate(
    s: &KnotSet,
    t: &KnotSet,
    v: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    let m = CauchyLikeOperand::pure(s.clone(), t.clone())?;
    cauchy_any_knots_solve(&m, v, eps, None).map(|(u, _)| u)
}

const LOG_DIRECT_CAP: usize = 64 * 64;

/// Values prod_j (s_i - t_j) for every target, through hierarchical
/// summation of ln(s - t) = ln(s - c) + ln(1 - q) followed by
/// exponentiation. Per-term principal branches may differ by multiples of
/// 2*pi*i; the exponential collapses the ambiguity.
pub fn log_kernel_eval_from_roots(
    roots: &KnotSet,
    targets: &KnotSet,
    eps: f64,
) -> Result<ComplexVector> {
    if eps <= 0.0 {
        return Err(Error::InvalidTolerance(eps));
    }
    targets.assert_disjoint(roots)?;
    let m = roots.len();
    let n = targets.len();
    let mut logs = ComplexVector::zeros(n);
    let depth_budget = (usize::BITS - m.leading_zeros()) as usize + 2;
    let per_block = eps / (2.0 * depth_budget as f64);
    let t_idx: Vec<usize> = (0..m).collect();
    let s_idx: Vec<usize> = (0..n).collect();
    log_kernel_recurse(
        targets.knots(),
        roots.knots(),
        &s_idx,
        &t_idx,
        per_block,
        0,
        &mut logs,
    )?;
    Ok(ComplexVector::from_fn(n, |i| logs[i].exp()))
}

fn log_kernel_recurse(
    s: &[Complex64],
    t: &[Complex64],
    s_idx: &[usize],
    t_idx: &[usize],
    per_block: f64,
    depth: usize,
    logs: &mut ComplexVector,
) -> Result<()> {
    let direct = |logs: &mut ComplexVector| {
        for &i in s_idx {
            let mut acc = Complex64::new(0.0, 0.0);
            for &j in t_idx {
                acc += (s[i] - t[j]).ln();
            }
            logs[i] += acc;
        }
    };
    if s_idx.len() * t_idx.len() <= LOG_DIRECT_CAP || depth > 48 {
        direct(logs);
        return Ok(());
    }
    // try an expansion around the root centroid
    let c = t_idx.iter().map(|&j| t[j]).sum::<Complex64>() / t_idx.len() as f64;
    let tmax = t_idx
        .iter()
        .map(|&j| (t[j] - c).norm())
        .fold(0.0, f64::max);
    let smin = s_idx
        .iter()
        .map(|&i| (s[i] - c).norm())
        .fold(f64::INFINITY, f64::min);
    let theta = if smin > 0.0 { tmax / smin } else { f64::INFINITY };
    if theta <= 0.5 {
        // |T| ln(s - c) - sum_h m_h / (h (s - c)^h) with the tail below
        // per_block / |T| per term
        let per_term = per_block / t_idx.len() as f64;
        let mut k = 1usize;
        // tail <= theta^{k+1} / ((k+1)(1-theta))
        while theta.powi(k as i32 + 1) / ((k + 1) as f64 * (1.0 - theta)) > per_term && k < 256 {
            k += 1;
        }
        let mut moments = vec![Complex64::new(0.0, 0.0); k + 1];
        for &j in t_idx {
            let d = t[j] - c;
            let mut p = d;
            for mh in moments.iter_mut().skip(1) {
                *mh += p;
                p *= d;
            }
        }
        let count = Complex64::new(t_idx.len() as f64, 0.0);
        for &i in s_idx {
            let base = (s[i] - c).ln() * count;
            let inv = Complex64::new(1.0, 0.0) / (s[i] - c);
            let mut p = inv;
            let mut corr = Complex64::new(0.0, 0.0);
            for (h, mh) in moments.iter().enumerate().skip(1) {
                corr += mh * p / h as f64;
                p *= inv;
            }
            logs[i] += base - corr;
        }
        return Ok(());
    }
    // not separated: split the larger index set by angle (median)
    let split = |idx: &[usize], pts: &[Complex64]| -> (Vec<usize>, Vec<usize>) {
        let mut order: Vec<usize> = idx.to_vec();
        order.sort_by(|&a, &b| {
            pts[a]
                .arg()
                .partial_cmp(&pts[b].arg())
                .unwrap()
                .then(a.cmp(&b))
        });
        let mid = order.len() / 2;
        (order[..mid].to_vec(), order[mid..].to_vec())
    };
    if t_idx.len() >= s_idx.len() && t_idx.len() > 1 {
        let (a, b) = split(t_idx, t);
        log_kernel_recurse(s, t, s_idx, &a, per_block, depth + 1, logs)?;
        log_kernel_recurse(s, t, s_idx, &b, per_block, depth + 1, logs)?;
    } else if s_idx.len() > 1 {
        let (a, b) = split(s_idx, s);
        log_kernel_recurse(s, t, &a, t_idx, per_block, depth + 1, logs)?;
        log_kernel_recurse(s, t, &b, t_idx, per_block, depth + 1, logs)?;
    } else {
        direct(logs);
    }
    Ok(())
}

/// Coefficients of the monic polynomial t(x) = prod_j (x - t_j), recovered
/// by evaluating at the m-th roots of unity and applying the inverse DFT to
/// the values of t(x) - x^m.
pub fn monic_from_roots(roots: &KnotSet, eps: f64) -> Result<Polynomial> {
    let m = roots.len();
    let grid = KnotSet::dft_grid(Complex64::new(1.0, 0.0), m)?;
    let values = log_kernel_eval_from_roots(roots, &grid, eps)?;
    // w(x) = t(x) - x^m has degree <= m - 1 and w(omega^i) = t(omega^i) - 1
    let w_values: ComplexVector =
        ComplexVector::from_fn(m, |i| values[i] - Complex64::new(1.0, 0.0));
    let w = idft(&w_values)?;
    let mut coeffs = w.into_vec();
    coeffs.push(Complex64::new(1.0, 0.0));
    Polynomial::new(coeffs)
}
