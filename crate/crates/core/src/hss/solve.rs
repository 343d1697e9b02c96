//! Compressed solve on the hierarchical structure: a banded near-field
//! preconditioner factored once, GMRES refinement driven by the fast matvec,
//! and a fail-closed randomized condition screen. For dense-fallback
//! structures the solve is exact elimination.

use super::HssApprox;
use crate::error::{Error, Result};
use crate::matrix::power_iteration_norm;
use crate::vector::ComplexVector;
use num_complex::Complex64;

/// Knobs for [`hss_solve`]; `Default` derives everything from the structure.
#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Relative preconditioned-residual target; default max(1e-12, 0.02 n eps).
    pub tol: Option<f64>,
    /// Fail-closed condition threshold; default 1/(n * eps).
    pub condition_threshold: Option<f64>,
    /// GMRES iteration cap; default 600.
    pub max_iterations: Option<usize>,
    /// Skip the condition screen (used internally by the screen itself).
    pub skip_screen: bool,
}

/// Solve diagnostics alongside the solution.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub x: ComplexVector,
    pub iterations: usize,
    pub residual: f64,
    pub condition_estimate: f64,
}

/// Banded LU with partial pivoting (LAPACK-style storage with fill room).
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize, // effective upper bandwidth incl. pivot fill
    // entry (i, j) lives at data[j * height + (i + ku - j)]
    data: Vec<Complex64>,
    ipiv: Vec<usize>,
}

impl BandLu {
    /// Factors the band |i - j| <= w of the matrix given by `entry`.
    pub fn factor(n: usize, w: usize, entry: impl Fn(usize, usize) -> Complex64) -> Result<Self> {
        let kl = w;
        let ku = 2 * w; // w original + w fill
        let height = kl + ku + 1;
        let mut data = vec![Complex64::new(0.0, 0.0); height * n];
        let idx = |i: usize, j: usize| -> usize { j * height + (i + ku - j) };
        let mut scale = 0.0f64;
        for j in 0..n {
            let lo = j.saturating_sub(w);
            let hi = (j + w + 1).min(n);
            for i in lo..hi {
                let v = entry(i, j);
                scale = scale.max(v.norm());
                data[idx(i, j)] = v;
            }
        }
        let floor = scale * n as f64 * f64::EPSILON;
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let hi = (j + kl + 1).min(n);
            let mut p = j;
            let mut pmax = 0.0;
            for i in j..hi {
                let m = data[idx(i, j)].norm();
                if m > pmax {
                    pmax = m;
                    p = i;
                }
            }
            if pmax <= floor {
                return Err(Error::SingularMatrix(format!(
                    "band pivot {pmax:.3e} below threshold {floor:.3e} at step {j}"
                )));
            }
            ipiv[j] = p;
            if p != j {
                let cmax = (j + ku + 1).min(n);
                for c in j..cmax {
                    data.swap(idx(j, c), idx(p, c));
                }
            }
            let pivot = data[idx(j, j)];
            for i in j + 1..hi {
                let l = data[idx(i, j)] / pivot;
                data[idx(i, j)] = l;
                let cmax = (j + ku + 1).min(n);
                for c in j + 1..cmax {
                    let u = data[idx(j, c)];
                    data[idx(i, c)] -= l * u;
                }
            }
        }
        Ok(Self {
            n,
            kl,
            ku,
            data,
            ipiv,
        })
    }

    fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * (self.kl + self.ku + 1) + (i + self.ku - j)]
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        let mut x = b.to_vec();
        for j in 0..n {
            let p = self.ipiv[j];
            if p != j {
                x.swap(j, p);
            }
            let hi = (j + self.kl + 1).min(n);
            let xj = x[j];
            for i in j + 1..hi {
                x[i] -= self.at(i, j) * xj;
            }
        }
        for j in (0..n).rev() {
            let hi = (j + self.ku + 1).min(n);
            let mut acc = x[j];
            for c in j + 1..hi {
                acc -= self.at(j, c) * x[c];
            }
            x[j] = acc / self.at(j, j);
        }
        x
    }

    /// Solve with the transposed factored matrix.
    pub fn solve_transposed(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.n;
        // A = P^T L U (row pivots interleaved): A^T x = b solves
        // U^T v = b, L^T w = v, then undoes the swaps in reverse.
        let mut x = b.to_vec();
        for j in 0..n {
            let lo = j.saturating_sub(self.ku);
            let mut acc = x[j];
            for c in lo..j {
                acc -= self.at(c, j) * x[c];
            }
            x[j] = acc / self.at(j, j);
        }
        for j in (0..n).rev() {
            let hi = (j + self.kl + 1).min(n);
            let mut acc = x[j];
            for i in j + 1..hi {
                acc -= self.at(i, j) * x[i];
            }
            x[j] = acc;
            let p = self.ipiv[j];
            if p != j {
                x.swap(j, p);
            }
        }
        x
    }
}

impl HssApprox {
    fn band_width(&self) -> usize {
        if self.leaf_sectors == 0 {
            return 0;
        }
        let per = self.cols.div_ceil(self.leaf_sectors);
        ((5 * per) / 2 + 8).min(self.rows.saturating_sub(1))
    }

    pub(crate) fn band_preconditioner(&self) -> Result<&BandLu> {
        self.band_lu
            .get_or_init(|| {
                BandLu::factor(self.rows, self.band_width(), |i, j| {
                    self.kernel.entry(self.row_perm[i], self.col_perm[j])
                })
            })
            .as_ref()
            .map_err(|e| e.clone())
    }

    /// Preconditioner application in original coordinates: solves the banded
    /// near-field approximation C_band z = r.
    fn precondition(&self, r: &ComplexVector, transposed: bool) -> Result<ComplexVector> {
        let band = self.band_preconditioner()?;
        if !transposed {
            let rp: Vec<Complex64> = self.row_perm.iter().map(|&i| r[i]).collect();
            let zp = band.solve(&rp);
            let mut z = ComplexVector::zeros(self.cols);
            for (pos, &orig) in self.col_perm.iter().enumerate() {
                z[orig] = zp[pos];
            }
            Ok(z)
        } else {
            let rp: Vec<Complex64> = self.col_perm.iter().map(|&j| r[j]).collect();
            let zp = band.solve_transposed(&rp);
            let mut z = ComplexVector::zeros(self.rows);
            for (pos, &orig) in self.row_perm.iter().enumerate() {
                z[orig] = zp[pos];
            }
            Ok(z)
        }
    }

    /// Randomized two-sided condition estimate on the compressed operator:
    /// eight power iterations for the largest singular value, six inverse
    /// iterations through loose preconditioned solves for the smallest.
    pub fn condition_estimate(&self) -> Result<f64> {
        self.condition
            .get_or_init(|| self.condition_estimate_impl())
            .clone()
    }

    fn condition_estimate_impl(&self) -> Result<f64> {
        if self.is_dense_fallback() {
            let m = &self.dense_blocks[0].entries;
            let sol = crate::matrix::dense_solve(m, &ComplexVector::ones(self.cols))
                .map_err(|e| e)?;
            return Ok(sol.condition_estimate);
        }
        let n = self.rows;
        let sigma_max = power_iteration_norm(
            n,
            8,
            0x5EED_CAFE,
            |v| self.matvec(v).unwrap(),
            |v| self.matvec_adjoint(v).unwrap(),
        );
        let mut rng = crate::rng::Rng::seed_from_u64(0x5EED_CAF0);
        let mut v = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let mut growth = 0.0f64;
        let opts = SolveOptions {
            tol: Some(1e-8),
            condition_threshold: None,
            max_iterations: Some(150),
            skip_screen: true,
        };
        for _ in 0..6 {
            let nv = v.norm();
            if nv == 0.0 {
                break;
            }
            v = v.scale(Complex64::new(1.0 / nv, 0.0));
            let w = solve_inner(self, &v, &opts, false)?;
            growth = growth.max(w.x.norm());
            v = w.x;
        }
        Ok(sigma_max * growth.max(1.0 / sigma_max.max(1e-300)))
    }
}

fn default_tol(h: &HssApprox) -> f64 {
    (0.02 * h.rows as f64 * h.epsilon).max(1e-12)
}

/// Solve H x = b.
pub fn hss_solve(h: &HssApprox, b: &ComplexVector) -> Result<ComplexVector> {
    hss_solve_with(h, b, &SolveOptions::default()).map(|r| r.x)
}

/// Solve H^T x = b.
pub fn hss_solve_transposed(h: &HssApprox, b: &ComplexVector) -> Result<ComplexVector> {
    solve_entry(h, b, &SolveOptions::default(), true).map(|r| r.x)
}

/// Solve with explicit options and diagnostics.
pub fn hss_solve_with(h: &HssApprox, b: &ComplexVector, opts: &SolveOptions) -> Result<SolveReport> {
    solve_entry(h, b, opts, false)
}

fn solve_entry(
    h: &HssApprox,
    b: &ComplexVector,
    opts: &SolveOptions,
    transposed: bool,
) -> Result<SolveReport> {
    if b.len() != if transposed { h.rows } else { h.cols } {
        return Err(Error::DimensionMismatch(format!(
            "solve rhs of length {} against a {}x{} structure",
            b.len(),
            h.rows,
            h.cols
        )));
    }
    if h.rows != h.cols {
        return Err(Error::DimensionMismatch(
            "solve needs a square structure".into(),
        ));
    }
    let threshold = opts
        .condition_threshold
        .unwrap_or(1.0 / (h.rows as f64 * h.epsilon));
    if h.is_dense_fallback() {
        let m = &h.dense_blocks[0].entries;
        let sol = if transposed {
            let mt = m.transpose();
            crate::matrix::dense_solve(&mt, b)?
        } else {
            crate::matrix::dense_solve(m, b)?
        };
        if !opts.skip_screen && sol.condition_estimate > threshold {
            return Err(Error::IllConditioned {
                estimate: sol.condition_estimate,
                threshold,
            });
        }
        return Ok(SolveReport {
            x: sol.x,
            iterations: 0,
            residual: 0.0,
            condition_estimate: sol.condition_estimate,
        });
    }
    let cond = if opts.skip_screen {
        0.0
    } else {
        let est = h.condition_estimate()?;
        if est > threshold {
            return Err(Error::IllConditioned {
                estimate: est,
                threshold,
            });
        }
        est
    };
    let mut report = solve_inner(h, b, opts, transposed)?;
    report.condition_estimate = cond;
    Ok(report)
}

/// Left-preconditioned restarted GMRES.
fn solve_inner(
    h: &HssApprox,
    b: &ComplexVector,
    opts: &SolveOptions,
    transposed: bool,
) -> Result<SolveReport> {
    let n = b.len();
    let tol = opts.tol.unwrap_or_else(|| default_tol(h));
    let max_iters = opts.max_iterations.unwrap_or(600);
    let restart = 100usize.min(n);
    let apply = |x: &ComplexVector| -> Result<ComplexVector> {
        if transposed {
            h.matvec_transposed(x)
        } else {
            h.matvec(x)
        }
    };
    let pb = h.precondition(b, transposed)?;
    let norm_pb = pb.norm();
    if norm_pb == 0.0 {
        return Ok(SolveReport {
            x: ComplexVector::zeros(n),
            iterations: 0,
            residual: 0.0,
            condition_estimate: 0.0,
        });
    }
    let mut x = ComplexVector::zeros(n);
    let mut total_iters = 0usize;
    let zero = Complex64::new(0.0, 0.0);
    while total_iters < max_iters {
        let r = h.precondition(&b.sub(&apply(&x)?), transposed)?;
        let beta = r.norm();
        if beta <= tol * norm_pb {
            return Ok(SolveReport {
                x,
                iterations: total_iters,
                residual: beta / norm_pb,
                condition_estimate: 0.0,
            });
        }
        let m = restart.min(max_iters - total_iters);
        let mut basis: Vec<ComplexVector> = vec![r.scale(Complex64::new(1.0 / beta, 0.0))];
        let mut hess = vec![vec![zero; 0]; 0];
        let mut cs: Vec<Complex64> = Vec::new();
        let mut sn: Vec<Complex64> = Vec::new();
        let mut g = vec![zero; m + 1];
        g[0] = Complex64::new(beta, 0.0);
        let mut converged_at = None;
        for j in 0..m {
            let mut w = h.precondition(&apply(&basis[j])?, transposed)?;
            let mut col = vec![zero; j + 2];
            for (i, v) in basis.iter().enumerate() {
                let hij: Complex64 = v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
                col[i] = hij;
                w = w.sub(&v.scale(hij));
            }
            let wn = w.norm();
            col[j + 1] = Complex64::new(wn, 0.0);
            // apply accumulated rotations
            for i in 0..j {
                let t = cs[i] * col[i] + sn[i] * col[i + 1];
                col[i + 1] = -sn[i].conj() * col[i] + cs[i] * col[i + 1];
                col[i] = t;
            }
            // new rotation
            let (c, s) = givens(col[j], col[j + 1]);
            let t = c * col[j] + s * col[j + 1];
            col[j] = t;
            col[j + 1] = zero;
            cs.push(c);
            sn.push(s);
            let gj = g[j];
            g[j] = c * gj;
            g[j + 1] = -s.conj() * gj;
            hess.push(col);
            total_iters += 1;
            let res = g[j + 1].norm();
            if res <= tol * norm_pb || wn == 0.0 {
                converged_at = Some(j + 1);
                break;
            }
            basis.push(w.scale(Complex64::new(1.0 / wn, 0.0)));
        }
        let k = converged_at.unwrap_or(hess.len());
        // back substitution on the k x k triangular system
        let mut y = vec![zero; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= hess[j][i] * y[j];
            }
            y[i] = acc / hess[i][i];
        }
        for (j, yj) in y.iter().enumerate() {
            x = x.add(&basis[j].scale(*yj));
        }
        if converged_at.is_some() {
            let r = h.precondition(&b.sub(&apply(&x)?), transposed)?;
            let rel = r.norm() / norm_pb;
            if rel <= tol * 10.0 {
                return Ok(SolveReport {
                    x,
                    iterations: total_iters,
                    residual: rel,
                    condition_estimate: 0.0,
                });
            }
        }
    }
    Err(Error::ConvergenceFailure(format!(
        "GMRES did not reach tol {tol:.2e} within {max_iters} iterations"
    )))
}

fn givens(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
    }
    if an == 0.0 {
        return (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let t = (an * an + bn * bn).sqrt();
    let c = Complex64::new(an / t, 0.0);
    let s = (a / an) * b.conj() / t;
    (c, s)
}
