//! Seeded knot and matrix recipes shared by the CLI and the test suites.
//!
//! `circle` spreads the knots: jittered half-offset positions between the
//! unit-circle grid points with mild radial noise, which keeps CV systems
//! well conditioned. `annulus` scatters angles freely inside a radius band.
//! `clustered` huddles every knot inside a small disc, which makes CV
//! systems numerically rank deficient (the fail-closed fixture).

use crate::knots::KnotSet;
use crate::rng::Rng;
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::f64::consts::PI;

/// Well-spread knots near the unit circle, interleaving the n-point grid.
pub fn circle_knots(rng: &mut Rng, n: usize) -> KnotSet {
    KnotSet::new(
        (0..n)
            .map(|i| {
                let angle =
                    2.0 * PI * (i as f64 + 0.5 + 0.2 * (rng.uniform() - 0.5)) / n as f64;
                Complex64::from_polar(1.0 + 0.1 * (rng.uniform() - 0.5), angle)
            })
            .collect(),
    )
    .expect("jittered grid knots are distinct")
}

/// Random angles at radii in [0.9, 1.6).
pub fn annulus_knots(rng: &mut Rng, n: usize) -> KnotSet {
    KnotSet::new(
        (0..n)
            .map(|_| Complex64::from_polar(rng.uniform_in(0.9, 1.6), rng.uniform_in(0.0, 2.0 * PI)))
            .collect(),
    )
    .expect("random annulus knots are distinct")
}

/// Everything inside the disc of radius 0.3: ill-conditioned CV fixture.
pub fn clustered_knots(rng: &mut Rng, n: usize) -> KnotSet {
    KnotSet::new(
        (0..n)
            .map(|_| {
                Complex64::from_polar(0.05 + 0.25 * rng.uniform(), rng.uniform_in(0.0, 2.0 * PI))
            })
            .collect(),
    )
    .expect("random clustered knots are distinct")
}

/// Perturbed roots of unity (radial and angular noise of relative size
/// `jitter / n`), the well-conditioned Vandermonde fixture.
pub fn perturbed_roots_of_unity(rng: &mut Rng, n: usize, jitter: f64) -> KnotSet {
    KnotSet::new(
        (0..n)
            .map(|i| {
                let angle = 2.0 * PI * (i as f64 + jitter * (rng.uniform() - 0.5)) / n as f64;
                Complex64::from_polar(1.0 + jitter * 0.1 * (rng.uniform() - 0.5), angle)
            })
            .collect(),
    )
    .expect("perturbed roots are distinct")
}

/// Random diagonally dominant Toeplitz data (first column, first row).
pub fn diagonally_dominant_toeplitz(
    rng: &mut Rng,
    n: usize,
) -> (ComplexVector, ComplexVector) {
    let mut col = ComplexVector::from_fn(n, |i| {
        rng.complex_normal() * Complex64::new(1.0 / (1.0 + i as f64), 0.0)
    });
    let mut row = ComplexVector::from_fn(n, |i| {
        rng.complex_normal() * Complex64::new(1.0 / (1.0 + i as f64), 0.0)
    });
    // dominant corner entry
    let dom: f64 = (1..n).map(|i| col[i].norm() + row[i].norm()).sum();
    col[0] = Complex64::new(dom + 1.0, 0.0);
    row[0] = col[0];
    (col, row)
}
