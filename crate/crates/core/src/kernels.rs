//! Shared Cauchy/Vandermonde kernel products.
//!
//! Small problems run the exact quadratic summation; larger ones are routed
//! to the hierarchical fast paths once the knot geometry allows it (the
//! dispatch below is extended by the solver layer through `fast_dispatch`).

use crate::error::Result;
use crate::knots::KnotSet;
use crate::vector::ComplexVector;
use num_complex::Complex64;

/// Below this dimension the exact quadratic kernels are used unconditionally.
pub const DIRECT_THRESHOLD: usize = 384;

/// Default internal tolerance for fast kernel products used inside
/// generator algebra, where callers do not pass an epsilon of their own.
pub const INTERNAL_EPS: f64 = 1e-12;

/// C_{s,t} * x by direct summation.
pub fn cauchy_matvec_direct(s: &KnotSet, t: &KnotSet, x: &ComplexVector) -> ComplexVector {
    let sk = s.knots();
    let tk = t.knots();
    debug_assert_eq!(tk.len(), x.len());
    ComplexVector::from_fn(sk.len(), |i| {
        tk.iter()
            .zip(x.iter())
            .map(|(tj, xj)| xj / (sk[i] - tj))
            .sum()
    })
}

/// C_{s,t}^T * x by direct summation.
pub fn cauchy_transposed_matvec_direct(
    s: &KnotSet,
    t: &KnotSet,
    x: &ComplexVector,
) -> ComplexVector {
    let sk = s.knots();
    let tk = t.knots();
    debug_assert_eq!(sk.len(), x.len());
    ComplexVector::from_fn(tk.len(), |j| {
        sk.iter()
            .zip(x.iter())
            .map(|(si, xi)| xi / (si - tk[j]))
            .sum()
    })
}

/// V_s * x: evaluates the polynomial with coefficients x at every knot.
pub fn vandermonde_matvec_direct(s: &KnotSet, x: &ComplexVector) -> ComplexVector {
    let sk = s.knots();
    ComplexVector::from_fn(sk.len(), |i| {
        // Horner
        let mut acc = Complex64::new(0.0, 0.0);
        for c in x.iter().rev() {
            acc = acc * sk[i] + c;
        }
        acc
    })
}

/// V_s^T * x: power sums sum_i x_i s_i^j.
pub fn vandermonde_transposed_matvec_direct(s: &KnotSet, x: &ComplexVector) -> ComplexVector {
    let sk = s.knots();
    let n = sk.len();
    debug_assert_eq!(n, x.len());
    let mut out = ComplexVector::zeros(x.len());
    let mut pow: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); n];
    for j in 0..x.len() {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            acc += x[i] * pow[i];
            pow[i] *= sk[i];
        }
        out[j] = acc;
    }
    out
}

/// C_{s,t} * x, fast when the geometry supports it.
pub fn cauchy_matvec(s: &KnotSet, t: &KnotSet, x: &ComplexVector) -> Result<ComplexVector> {
    if s.len().max(t.len()) <= DIRECT_THRESHOLD {
        return Ok(cauchy_matvec_direct(s, t, x));
    }
    crate::solvers::dispatch::cauchy_matvec_auto(s, t, x, INTERNAL_EPS)
}

/// C_{s,t}^T * x, fast when the geometry supports it.
pub fn cauchy_transposed_matvec(
    s: &KnotSet,
    t: &KnotSet,
    x: &ComplexVector,
) -> Result<ComplexVector> {
    if s.len().max(t.len()) <= DIRECT_THRESHOLD {
        return Ok(cauchy_transposed_matvec_direct(s, t, x));
    }
    crate::solvers::dispatch::cauchy_transposed_matvec_auto(s, t, x, INTERNAL_EPS)
}

/// V_s * x.
pub fn vandermonde_matvec(s: &KnotSet, x: &ComplexVector) -> Result<ComplexVector> {
    if s.len() <= DIRECT_THRESHOLD {
        return Ok(vandermonde_matvec_direct(s, x));
    }
    crate::solvers::vandermonde_matvec(s, x, INTERNAL_EPS)
}

/// V_s^T * x.
pub fn vandermonde_transposed_matvec(s: &KnotSet, x: &ComplexVector) -> Result<ComplexVector> {
    if s.len() <= DIRECT_THRESHOLD {
        return Ok(vandermonde_transposed_matvec_direct(s, x));
    }
    crate::solvers::vandermonde_transposed_matvec(s, x, INTERNAL_EPS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knots::{cauchy_dense, vandermonde_dense};
    use crate::rng::Rng;

    #[test]
    fn direct_kernels_match_dense() {
        let mut rng = Rng::seed_from_u64(31);
        let s = KnotSet::new((0..12).map(|_| rng.complex_normal()).collect()).unwrap();
        let t = KnotSet::new(
            (0..12)
                .map(|_| rng.complex_normal() + Complex64::new(5.0, 0.0))
                .collect(),
        )
        .unwrap();
        let x = ComplexVector::from_fn(12, |_| rng.complex_normal());

        let c = cauchy_dense(&s, &t).unwrap();
        assert!(
            cauchy_matvec_direct(&s, &t, &x)
                .sub(&c.matvec(&x).unwrap())
                .norm_inf()
                < 1e-12
        );
        assert!(
            cauchy_transposed_matvec_direct(&s, &t, &x)
                .sub(&c.matvec_transposed(&x).unwrap())
                .norm_inf()
                < 1e-12
        );

        let v = vandermonde_dense(&s);
        assert!(
            vandermonde_matvec_direct(&s, &x)
                .sub(&v.matvec(&x).unwrap())
                .norm_inf()
                < 1e-10
        );
        assert!(
            vandermonde_transposed_matvec_direct(&s, &x)
                .sub(&v.matvec_transposed(&x).unwrap())
                .norm_inf()
                < 1e-10
        );
    }
}
