//! User-facing fast approximate operations: CV/Cauchy-like/Vandermonde
//! matvec and solve, arbitrary-knot reductions (re-knotting and Moebius
//! maps), polynomial and rational multipoint evaluation and interpolation,
//! and the superfast Toeplitz solve pipeline.

pub mod dispatch;
pub mod functional;
pub mod mobius;
pub mod toeplitz;

pub use functional::{
    log_kernel_eval_from_roots, monic_from_roots, poly_interpolate, poly_multipoint_eval,
    rational_eval, rational_interpolate, Polynomial,
};
pub use mobius::{
    cauchy_any_knots_matvec, cauchy_any_knots_solve, detect_circle, detect_line,
    mobius_circle_to_real, mobius_line_to_real, select_circle_pole, CircleMap, Line, LineMap,
    RouteKind, RouteReport,
};
pub use toeplitz::{toeplitz_solve, toeplitz_solve_with, ToeplitzSolveReport};

use crate::displacement::{Generator, Operator};
use crate::error::{Error, Result};
use crate::fft::{dft, idft, root_of_unity_pow};
use crate::hss::{
    build_cauchy_like_hss, hss_solve_transposed, hss_solve_with, HssApprox, SolveOptions,
};
use crate::knots::{select_shift_scalar, KnotSet};
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex, OnceLock};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// A Cauchy-like matrix sum_j diag(f_j) C_{s,t} diag(g_j) held by its knot
/// sets and generator columns.
#[derive(Debug, Clone)]
pub struct CauchyLikeOperand {
    s: KnotSet,
    t: KnotSet,
    f_cols: Vec<ComplexVector>,
    g_cols: Vec<ComplexVector>,
}

impl CauchyLikeOperand {
    pub fn new(
        s: KnotSet,
        t: KnotSet,
        f_cols: Vec<ComplexVector>,
        g_cols: Vec<ComplexVector>,
    ) -> Result<Self> {
        s.assert_disjoint(&t)?;
        if f_cols.is_empty() || f_cols.len() != g_cols.len() {
            return Err(Error::DimensionMismatch(
                "cauchy-like operand needs d >= 1 matched column pairs".into(),
            ));
        }
        if f_cols.iter().any(|c| c.len() != s.len()) || g_cols.iter().any(|c| c.len() != t.len()) {
            return Err(Error::DimensionMismatch(
                "coefficient column lengths do not match the knot counts".into(),
            ));
        }
        Ok(Self {
            s,
            t,
            f_cols,
            g_cols,
        })
    }

    /// The pure Cauchy matrix C_{s,t} as an operand (unit coefficients).
    pub fn pure(s: KnotSet, t: KnotSet) -> Result<Self> {
        let f = vec![ComplexVector::ones(s.len())];
        let g = vec![ComplexVector::ones(t.len())];
        Self::new(s, t, f, g)
    }

    pub fn from_generator(gen: &Generator) -> Result<Self> {
        match (gen.operator_a(), gen.operator_b()) {
            (Operator::Diagonal(s), Operator::Diagonal(t)) => Self::new(
                s.clone(),
                t.clone(),
                gen.f_columns().to_vec(),
                gen.g_columns().to_vec(),
            ),
            _ => Err(Error::WrongClass {
                expected: "C under (D_s, D_t)",
                found: format!(
                    "({}, {})",
                    gen.operator_a().kind_name(),
                    gen.operator_b().kind_name()
                ),
            }),
        }
    }

    pub fn to_generator(&self) -> Result<Generator> {
        Generator::new(
            Operator::Diagonal(self.s.clone()),
            Operator::Diagonal(self.t.clone()),
            self.f_cols.clone(),
            self.g_cols.clone(),
            self.s.len(),
            self.t.len(),
        )
    }

    pub fn row_knots(&self) -> &KnotSet {
        &self.s
    }

    pub fn col_knots(&self) -> &KnotSet {
        &self.t
    }

    pub fn length(&self) -> usize {
        self.f_cols.len()
    }

    pub fn coefficient_pairs(&self) -> Vec<(ComplexVector, ComplexVector)> {
        self.f_cols
            .iter()
            .cloned()
            .zip(self.g_cols.iter().cloned())
            .collect()
    }

    /// True when the coefficients are exactly the all-ones pair.
    pub fn is_pure(&self) -> bool {
        self.length() == 1
            && self.f_cols[0].iter().all(|z| (z - one()).norm() == 0.0)
            && self.g_cols[0].iter().all(|z| (z - one()).norm() == 0.0)
    }
}

/// 128-bit content key for the memo cache.
fn cache_key(parts: &[&[Complex64]], scalars: &[f64]) -> (u64, u64) {
    let mut k = (0u64, 0u64);
    for seed in [0u64, 1] {
        let mut h = DefaultHasher::new();
        seed.hash(&mut h);
        for p in parts {
            p.len().hash(&mut h);
            for z in *p {
                z.re.to_bits().hash(&mut h);
                z.im.to_bits().hash(&mut h);
            }
        }
        for s in scalars {
            s.to_bits().hash(&mut h);
        }
        if seed == 0 {
            k.0 = h.finish();
        } else {
            k.1 = h.finish();
        }
    }
    k
}

type Cache = Mutex<(Vec<(u64, u64)>, HashMap<(u64, u64), Arc<HssApprox>>)>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new((Vec::new(), HashMap::new())))
}

const CACHE_CAP: usize = 24;

/// Builds (or recalls) the hierarchical structure of a Cauchy-like matrix
/// with grid columns. The memo is a transparent cache: identical inputs give
/// the identical structure.
pub fn cached_grid_hss(
    s: &KnotSet,
    e: Complex64,
    n_cols: usize,
    coeff: &[(ComplexVector, ComplexVector)],
    eps: f64,
) -> Result<Arc<HssApprox>> {
    let mut parts: Vec<&[Complex64]> = vec![s.knots()];
    for (f, g) in coeff {
        parts.push(f.as_slice());
        parts.push(g.as_slice());
    }
    let key = cache_key(&parts, &[e.re, e.im, n_cols as f64, eps]);
    {
        let guard = cache().lock().unwrap();
        if let Some(hit) = guard.1.get(&key) {
            return Ok(hit.clone());
        }
    }
    let built = Arc::new(build_cauchy_like_hss(
        s,
        e,
        n_cols,
        coeff.to_vec(),
        eps,
    )?);
    let mut guard = cache().lock().unwrap();
    if guard.1.len() >= CACHE_CAP {
        // FIFO eviction
        if let Some(old) = guard.0.first().copied() {
            guard.0.remove(0);
            guard.1.remove(&old);
        }
    }
    guard.0.push(key);
    guard.1.insert(key, built.clone());
    Ok(built)
}

/// Approximate C_{s, e-grid} * u.
pub fn cv_matvec(
    s: &KnotSet,
    e: Complex64,
    u: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    let h = cached_grid_hss(s, e, u.len(), &[], eps)?;
    h.matvec(u)
}

/// Approximate solve of C_{s, e-grid} x = b, failing closed on
/// ill-conditioned systems.
pub fn cv_solve(s: &KnotSet, e: Complex64, b: &ComplexVector, eps: f64) -> Result<ComplexVector> {
    let h = cached_grid_hss(s, e, b.len(), &[], eps)?;
    hss_solve_with(&h, b, &SolveOptions::default()).map(|r| r.x)
}

/// Approximate M * u for a Cauchy-like operand whose column knots form a
/// DFT grid; other geometries go through [`cauchy_any_knots_matvec`].
pub fn cauchy_like_matvec(
    m: &CauchyLikeOperand,
    u: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    let e = m.t.dft_grid_scalar().ok_or_else(|| Error::WrongClass {
        expected: "CV form (column knots on a DFT grid); route through the re-knotting or Moebius reductions first",
        found: "general column knots".into(),
    })?;
    let coeff = if m.is_pure() {
        vec![]
    } else {
        m.coefficient_pairs()
    };
    let h = cached_grid_hss(&m.s, e, m.t.len(), &coeff, eps)?;
    h.matvec(u)
}

/// Approximate solve of M x = b for a CV-form Cauchy-like operand.
pub fn cauchy_like_solve(
    m: &CauchyLikeOperand,
    b: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    let e = m.t.dft_grid_scalar().ok_or_else(|| Error::WrongClass {
        expected: "CV form (column knots on a DFT grid); route through the re-knotting or Moebius reductions first",
        found: "general column knots".into(),
    })?;
    let coeff = if m.is_pure() {
        vec![]
    } else {
        m.coefficient_pairs()
    };
    let h = cached_grid_hss(&m.s, e, m.t.len(), &coeff, eps)?;
    hss_solve_with(&h, b, &SolveOptions::default()).map(|r| r.x)
}

/// Overflow guard for the powers s_i^n.
fn check_power_range(s: &KnotSet) -> Result<()> {
    let n = s.len() as f64;
    let smax = s.max_magnitude();
    if n * smax.ln() > 690.0 {
        return Err(Error::MagnitudeOverflow(format!(
            "s_+^n with s_+ = {smax:.3e}, n = {n} exceeds the floating range"
        )));
    }
    Ok(())
}

struct VandermondePipeline {
    f: Complex64,
    /// s_i^n - f^n
    spow: ComplexVector,
    /// global scalar f^{1-n} / n
    scale: Complex64,
}

fn vandermonde_pipeline(s: &KnotSet) -> Result<VandermondePipeline> {
    check_power_range(s)?;
    let n = s.len();
    let (f, phi) = select_shift_scalar(s);
    let spow = ComplexVector::from_fn(n, |i| s.knots()[i].powu(n as u32) - phi);
    let scale = f / phi / n as f64; // f^{1-n} = f / f^n
    Ok(VandermondePipeline { f, spow, scale })
}

fn scale_by_powers(u: &ComplexVector, base: Complex64, invert: bool) -> ComplexVector {
    let mut p = one();
    ComplexVector::from_fn(u.len(), |j| {
        let v = if invert { u[j] / p } else { u[j] * p };
        p *= base;
        v
    })
}

/// Fast approximate V_s * u through the CV factorization; exact FFT route
/// when the knots form a DFT grid.
pub fn vandermonde_matvec(s: &KnotSet, u: &ComplexVector, eps: f64) -> Result<ComplexVector> {
    if u.len() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "vandermonde matvec: {} knots vs vector length {}",
            s.len(),
            u.len()
        )));
    }
    if let Some(f) = s.dft_grid_scalar() {
        // V_f = Omega diag(f^j)
        return dft(&scale_by_powers(u, f, false));
    }
    let pipe = vandermonde_pipeline(s)?;
    let n = s.len();
    let u1 = scale_by_powers(u, pipe.f, false);
    let u2 = dft(&u1)?;
    let u3 = ComplexVector::from_fn(n, |j| u2[j] * root_of_unity_pow(n, j as i64));
    let u4 = cv_matvec(s, pipe.f, &u3, eps)?;
    Ok(ComplexVector::from_fn(n, |i| {
        u4[i] * pipe.spow[i] * pipe.scale
    }))
}

/// Fast approximate V_s^T * u.
pub fn vandermonde_transposed_matvec(
    s: &KnotSet,
    u: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    if u.len() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "vandermonde transposed matvec: {} knots vs vector length {}",
            s.len(),
            u.len()
        )));
    }
    if let Some(f) = s.dft_grid_scalar() {
        // V_f^T = diag(f^j) Omega
        return Ok(scale_by_powers(&dft(u)?, f, false));
    }
    let pipe = vandermonde_pipeline(s)?;
    let n = s.len();
    let u1 = ComplexVector::from_fn(n, |i| u[i] * pipe.spow[i]);
    let h = cached_grid_hss(s, pipe.f, n, &[], eps)?;
    let u2 = h.matvec_transposed(&u1)?;
    let u3 = ComplexVector::from_fn(n, |j| u2[j] * root_of_unity_pow(n, j as i64));
    let u4 = dft(&u3)?;
    Ok(scale_by_powers(&u4, pipe.f, false).scale(pipe.scale))
}

/// Fast approximate solve of V_s x = b (multipoint interpolation).
pub fn vandermonde_solve(s: &KnotSet, b: &ComplexVector, eps: f64) -> Result<ComplexVector> {
    if b.len() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "vandermonde solve: {} knots vs rhs length {}",
            s.len(),
            b.len()
        )));
    }
    if let Some(f) = s.dft_grid_scalar() {
        return Ok(scale_by_powers(&idft(b)?, f, true));
    }
    let pipe = vandermonde_pipeline(s)?;
    let n = s.len();
    let b1 = ComplexVector::from_fn(n, |i| b[i] / pipe.spow[i]);
    let b2 = cv_solve(s, pipe.f, &b1, eps)?;
    let b3 = ComplexVector::from_fn(n, |j| b2[j] * root_of_unity_pow(n, -(j as i64)));
    let b4 = idft(&b3)?;
    let inv_scale = one() / pipe.scale;
    Ok(scale_by_powers(&b4, pipe.f, true).scale(inv_scale))
}

/// Fast approximate solve of V_s^T x = b.
pub fn vandermonde_transposed_solve(
    s: &KnotSet,
    b: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    if b.len() != s.len() {
        return Err(Error::DimensionMismatch(format!(
            "vandermonde transposed solve: {} knots vs rhs length {}",
            s.len(),
            b.len()
        )));
    }
    if let Some(f) = s.dft_grid_scalar() {
        return idft(&scale_by_powers(b, f, true));
    }
    let pipe = vandermonde_pipeline(s)?;
    let n = s.len();
    let inv_scale = one() / pipe.scale;
    let b1 = scale_by_powers(b, pipe.f, true);
    let b2 = idft(&b1)?;
    let b3 = ComplexVector::from_fn(n, |j| b2[j] * root_of_unity_pow(n, -(j as i64)));
    let h = cached_grid_hss(s, pipe.f, n, &[], eps)?;
    let b4 = hss_solve_transposed(&h, &b3)?;
    Ok(ComplexVector::from_fn(n, |i| {
        b4[i] / pipe.spow[i] * inv_scale
    }))
}
