//! Geometry-aware routing for large kernel products used inside the
//! generator algebra: grids go through the cached hierarchical structures,
//! real knots through interval bisection, everything else falls back to the
//! exact quadratic summation.

use super::cached_grid_hss;
use crate::error::Result;
use crate::kernels;
use crate::knots::KnotSet;
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::sync::Arc;

fn all_real(k: &KnotSet) -> bool {
    k.all_real(1e-12)
}

fn line_hss(s: &KnotSet, t: &KnotSet, eps: f64) -> Result<Arc<crate::hss::HssApprox>> {
    // the line structures are cheap to rebuild relative to their use sites;
    // no memo here
    Ok(Arc::new(crate::hss::real_line_hss(s, t, eps)?))
}

pub fn cauchy_matvec_auto(
    s: &KnotSet,
    t: &KnotSet,
    x: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    if let Some(e) = t.dft_grid_scalar() {
        let h = cached_grid_hss(s, e, t.len(), &[], eps)?;
        return h.matvec(x);
    }
    if let Some(e) = s.dft_grid_scalar() {
        // C_{s,t} = -C_{t,s}^T
        let h = cached_grid_hss(t, e, s.len(), &[], eps)?;
        return Ok(h.matvec_transposed(x)?.scale(Complex64::new(-1.0, 0.0)));
    }
    if all_real(s) && all_real(t) {
        let h = line_hss(s, t, eps)?;
        return h.matvec(x);
    }
    Ok(kernels::cauchy_matvec_direct(s, t, x))
}

pub fn cauchy_transposed_matvec_auto(
    s: &KnotSet,
    t: &KnotSet,
    x: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    if let Some(e) = t.dft_grid_scalar() {
        let h = cached_grid_hss(s, e, t.len(), &[], eps)?;
        return h.matvec_transposed(x);
    }
    if let Some(e) = s.dft_grid_scalar() {
        let h = cached_grid_hss(t, e, s.len(), &[], eps)?;
        return Ok(h.matvec(x)?.scale(Complex64::new(-1.0, 0.0)));
    }
    if all_real(s) && all_real(t) {
        let h = line_hss(s, t, eps)?;
        return h.matvec_transposed(x);
    }
    Ok(kernels::cauchy_transposed_matvec_direct(s, t, x))
}
