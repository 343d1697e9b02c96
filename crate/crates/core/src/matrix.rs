//! Dense complex matrices and the factorization oracles built on them:
//! partial-pivot LU with a condition estimate, thin Householder QR, and a
//! one-sided Jacobi SVD used for rank-revealing factorizations.

use crate::error::{Error, Result};
use crate::vector::ComplexVector;
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>, // row-major
}

impl DenseMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyInput("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        for (i, z) in data.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry(i));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Column-stacked constructor.
    pub fn from_columns(cols: &[ComplexVector]) -> Result<Self> {
        if cols.is_empty() {
            return Err(Error::EmptyInput("from_columns with no columns"));
        }
        let rows = cols[0].len();
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch(
                "columns have unequal lengths".into(),
            ));
        }
        Ok(Self::from_fn(rows, cols.len(), |i, j| cols[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> ComplexVector {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> ComplexVector {
        self.data[i * self.cols..(i + 1) * self.cols]
            .to_vec()
            .into()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj_transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * a).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    /// Exact O(mn) product M * u.
    pub fn matvec(&self, u: &ComplexVector) -> Result<ComplexVector> {
        if u.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "matvec of {}x{} with vector of length {}",
                self.rows,
                self.cols,
                u.len()
            )));
        }
        let mut out = ComplexVector::zeros(self.rows);
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            out[i] = row.iter().zip(u.iter()).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    /// M^T * u.
    pub fn matvec_transposed(&self, u: &ComplexVector) -> Result<ComplexVector> {
        if u.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "transposed matvec of {}x{} with vector of length {}",
                self.rows,
                self.cols,
                u.len()
            )));
        }
        let mut out = ComplexVector::zeros(self.cols);
        for i in 0..self.rows {
            let ui = u[i];
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            for (j, a) in row.iter().enumerate() {
                out[j] += a * ui;
            }
        }
        Ok(out)
    }

    /// Largest entry magnitude |M|.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Spectral norm from the Jacobi SVD; intended for moderate sizes.
    pub fn spectral_norm(&self) -> f64 {
        let (_, sigma, _) = self.svd();
        sigma.first().copied().unwrap_or(0.0)
    }

    /// Row permutation P*M given by `perm`, where row i of the result is row
    /// perm[i] of M.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.rows);
        Self::from_fn(self.rows, self.cols, |i, j| self[(perm[i], j)])
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Result<LuFactors> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "LU of a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = self.max_abs();
        let pivot_floor = scale * (n as f64) * f64::EPSILON;
        for k in 0..n {
            let mut pmax = 0.0;
            let mut prow = k;
            for i in k..n {
                let m = lu[i * n + k].norm();
                if m > pmax {
                    pmax = m;
                    prow = i;
                }
            }
            if pmax <= pivot_floor {
                return Err(Error::SingularMatrix(format!(
                    "pivot {pmax:.3e} below threshold {pivot_floor:.3e} at step {k}"
                )));
            }
            if prow != k {
                for j in 0..n {
                    lu.swap(k * n + j, prow * n + j);
                }
                perm.swap(k, prow);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    let t = lu[k * n + j];
                    lu[i * n + j] -= factor * t;
                }
            }
        }
        Ok(LuFactors { n, lu, perm })
    }

    /// Thin Householder QR: M = Q * R with Q of size m x k, R of size k x k,
    /// k = min(m, n). Only the economic part is formed.
    pub fn qr_thin(&self) -> (DenseMatrix, DenseMatrix) {
        let m = self.rows;
        let n = self.cols;
        let k = m.min(n);
        let mut a = self.clone();
        let mut vs: Vec<ComplexVector> = Vec::with_capacity(k);
        for j in 0..k {
            // Householder vector for column j below the diagonal
            let mut v = ComplexVector::zeros(m);
            let mut norm2 = 0.0;
            for i in j..m {
                v[i] = a[(i, j)];
                norm2 += v[i].norm_sqr();
            }
            let norm = norm2.sqrt();
            if norm > 0.0 {
                let ajj = v[j];
                let phase = if ajj.norm() > 0.0 {
                    ajj / ajj.norm()
                } else {
                    Complex64::new(1.0, 0.0)
                };
                v[j] += phase * norm;
                let vnorm = v.norm();
                if vnorm > 0.0 {
                    for i in j..m {
                        v[i] /= vnorm;
                    }
                    // apply I - 2 v v^H to the remaining columns
                    for col in j..n {
                        let mut dot = Complex64::new(0.0, 0.0);
                        for i in j..m {
                            dot += v[i].conj() * a[(i, col)];
                        }
                        let dot2 = dot * 2.0;
                        for i in j..m {
                            let vi = v[i];
                            a[(i, col)] -= vi * dot2;
                        }
                    }
                }
            }
            vs.push(v);
        }
        let r = DenseMatrix::from_fn(k, n.min(self.cols), |i, j| {
            if j >= i {
                a[(i, j)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        // accumulate Q by applying the reflectors to the first k columns of I
        let mut q = DenseMatrix::zeros(m, k);
        for j in 0..k {
            q[(j, j)] = Complex64::new(1.0, 0.0);
        }
        for h in (0..k).rev() {
            let v = &vs[h];
            for col in 0..k {
                let mut dot = Complex64::new(0.0, 0.0);
                for i in h..m {
                    dot += v[i].conj() * q[(i, col)];
                }
                let dot2 = dot * 2.0;
                for i in h..m {
                    let vi = v[i];
                    q[(i, col)] -= vi * dot2;
                }
            }
        }
        (q, r)
    }

    /// One-sided Jacobi SVD: M = U * diag(sigma) * V^H with singular values
    /// sorted in decreasing order. Columns of U beyond the numerical range
    /// of M are dropped together with zero singular values.
    pub fn svd(&self) -> (DenseMatrix, Vec<f64>, DenseMatrix) {
        let transposed = self.rows < self.cols;
        let work = if transposed {
            self.conj_transpose()
        } else {
            self.clone()
        };
        let m = work.rows;
        let n = work.cols;
        let mut a = work;
        let mut v = DenseMatrix::identity(n);
        let tol = 1e-15;
        // squared column norms maintained across rotations
        let mut colsq: Vec<f64> = (0..n)
            .map(|j| (0..m).map(|i| a[(i, j)].norm_sqr()).sum())
            .collect();
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in p + 1..n {
                    let app = colsq[p];
                    let aqq = colsq[q];
                    let denom = (app * aqq).sqrt();
                    if denom == 0.0 {
                        continue;
                    }
                    let mut apq = Complex64::new(0.0, 0.0);
                    for i in 0..m {
                        apq += a[(i, p)].conj() * a[(i, q)];
                    }
                    if apq.norm() <= tol * denom {
                        continue;
                    }
                    off = off.max(apq.norm() / denom);
                    let phi = apq / apq.norm();
                    let zeta = (aqq - app) / (2.0 * apq.norm());
                    let t = if zeta >= 0.0 {
                        1.0 / (zeta + (1.0 + zeta * zeta).sqrt())
                    } else {
                        -1.0 / (-zeta + (1.0 + zeta * zeta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    // columns p, q <- (c*p - conj(s*phi)*q, s*phi*p + c*q)
                    let sp = phi * s;
                    let mut np = 0.0;
                    let mut nq = 0.0;
                    for i in 0..m {
                        let x = a[(i, p)];
                        let y = a[(i, q)];
                        let xp = x * c - y * sp.conj();
                        let yq = x * sp + y * c;
                        np += xp.norm_sqr();
                        nq += yq.norm_sqr();
                        a[(i, p)] = xp;
                        a[(i, q)] = yq;
                    }
                    colsq[p] = np;
                    colsq[q] = nq;
                    for i in 0..n {
                        let x = v[(i, p)];
                        let y = v[(i, q)];
                        v[(i, p)] = x * c - y * sp.conj();
                        v[(i, q)] = x * sp + y * c;
                    }
                }
            }
            if off <= tol {
                break;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        let norms: Vec<f64> = (0..n).map(|j| a.column(j).norm()).collect();
        order.sort_by(|&x, &y| norms[y].partial_cmp(&norms[x]).unwrap());
        let sigma: Vec<f64> = order.iter().map(|&j| norms[j]).collect();
        let u = DenseMatrix::from_fn(m, n, |i, j| {
            let col = order[j];
            if norms[col] > 0.0 {
                a[(i, col)] / norms[col]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let vv = DenseMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
        if transposed {
            // self = (U S V^H)^H = V S U^H
            (vv, sigma, u)
        } else {
            (u, sigma, vv)
        }
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Partial-pivot LU factorization of a square matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl LuFactors {
    pub fn solve(&self, b: &ComplexVector) -> Result<ComplexVector> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "solve with rhs of length {} against order {}",
                b.len(),
                n
            )));
        }
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            for j in 0..i {
                let l = self.lu[i * n + j];
                let t = x[j];
                x[i] -= l * t;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let u = self.lu[i * n + j];
                let t = x[j];
                x[i] -= u * t;
            }
            x[i] /= self.lu[i * n + i];
        }
        Ok(x.into())
    }

    /// Solve M^T x = b through the same factorization.
    pub fn solve_transposed(&self, b: &ComplexVector) -> Result<ComplexVector> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "transposed solve with rhs of length {} against order {}",
                b.len(),
                n
            )));
        }
        // M = P^T L U  =>  M^T = U^T L^T P
        let mut x: Vec<Complex64> = b.to_vec();
        for i in 0..n {
            for j in 0..i {
                let u = self.lu[j * n + i];
                let t = x[j];
                x[i] -= u * t;
            }
            x[i] /= self.lu[i * n + i];
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                let l = self.lu[j * n + i];
                let t = x[j];
                x[i] -= l * t;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, &p) in self.perm.iter().enumerate() {
            out[p] = x[i];
        }
        Ok(out.into())
    }
}

/// Output of [`dense_solve`]: the solution and a two-sided power-iteration
/// condition estimate.
#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: ComplexVector,
    pub condition_estimate: f64,
}

/// Partial-pivot elimination oracle with a condition estimate.
pub fn dense_solve(m: &DenseMatrix, b: &ComplexVector) -> Result<DenseSolution> {
    if m.rows() != m.cols() {
        return Err(Error::DimensionMismatch(format!(
            "dense_solve needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let lu = m.lu()?;
    let x = lu.solve(b)?;
    let sigma_max = power_iteration_norm(m.rows(), 8, 0xD1CE, |v| m.matvec(v).unwrap(), |v| {
        m.conj_transpose().matvec(v).unwrap()
    });
    let inv_norm = power_iteration_norm(
        m.rows(),
        8,
        0xD1CF,
        |v| lu.solve(v).unwrap(),
        |v| {
            // (M^{-1})^H w = conj(M^{-T} conj(w))
            lu.solve_transposed(&v.conj()).unwrap().conj()
        },
    );
    let condition_estimate = if inv_norm > 0.0 {
        sigma_max * inv_norm
    } else {
        f64::INFINITY
    };
    Ok(DenseSolution {
        x,
        condition_estimate,
    })
}

/// Randomized power iteration on A^H A estimating the largest singular value
/// of the operator given by `apply` / `apply_adjoint`.
pub fn power_iteration_norm(
    n: usize,
    iters: usize,
    seed: u64,
    apply: impl Fn(&ComplexVector) -> ComplexVector,
    apply_adjoint: impl Fn(&ComplexVector) -> ComplexVector,
) -> f64 {
    let mut rng = crate::rng::Rng::seed_from_u64(seed);
    let mut v = ComplexVector::from_fn(n, |_| rng.complex_normal());
    let mut norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let mut estimate = 0.0;
    for _ in 0..iters {
        v = v.scale(Complex64::new(1.0 / norm, 0.0));
        let w = apply(&v);
        let wn = w.norm();
        if wn == 0.0 {
            return 0.0;
        }
        estimate = wn;
        v = apply_adjoint(&w);
        norm = v.norm();
        if norm == 0.0 {
            return estimate;
        }
        estimate = estimate.max(norm / wn);
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn matvec_identity_zero_and_hand_case() {
        let id = DenseMatrix::identity(3);
        let u: ComplexVector = vec![c(1.0, 0.0), c(2.0, 1.0), c(-1.0, 3.0)].into();
        assert_eq!(id.matvec(&u).unwrap(), u);

        let z = DenseMatrix::zeros(3, 3);
        assert!(z.matvec(&u).unwrap().norm() == 0.0);

        let m = DenseMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        let ones = ComplexVector::ones(2);
        let out = m.matvec(&ones).unwrap();
        assert_eq!(out.as_slice(), &[c(3.0, 0.0), c(7.0, 0.0)]);
    }

    #[test]
    fn matvec_dimension_mismatch() {
        let m = DenseMatrix::identity(3);
        let u = ComplexVector::ones(2);
        assert!(m.matvec(&u).is_err());
    }

    #[test]
    fn solve_identity_and_diagonal() {
        let id = DenseMatrix::identity(4);
        let b: ComplexVector = vec![c(1.0, 2.0), c(3.0, 0.0), c(0.0, 0.0), c(-1.0, 1.0)].into();
        let sol = dense_solve(&id, &b).unwrap();
        assert!(sol.x.sub(&b).norm_inf() < 1e-14);
        assert!(sol.condition_estimate < 2.0);

        let d = DenseMatrix::from_fn(2, 2, |i, j| {
            if i == j {
                c(2.0 * (i + 1) as f64, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let b2: ComplexVector = vec![c(2.0, 0.0), c(4.0, 0.0)].into();
        let sol2 = dense_solve(&d, &b2).unwrap();
        assert!((sol2.x[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((sol2.x[1] - c(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn solve_rejects_singular() {
        let m = DenseMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        let b = ComplexVector::ones(2);
        assert!(matches!(
            dense_solve(&m, &b),
            Err(Error::SingularMatrix(_))
        ));
    }

    #[test]
    fn solve_random_residual_and_transpose() {
        let mut rng = Rng::seed_from_u64(5);
        let n = 24;
        let m = DenseMatrix::from_fn(n, n, |_, _| rng.complex_normal());
        let b = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let lu = m.lu().unwrap();
        let x = lu.solve(&b).unwrap();
        let r = m.matvec(&x).unwrap().sub(&b);
        assert!(r.norm() <= 1e-10 * m.frobenius_norm() * x.norm());

        let xt = lu.solve_transposed(&b).unwrap();
        let rt = m.transpose().matvec(&xt).unwrap().sub(&b);
        assert!(rt.norm() <= 1e-10 * m.frobenius_norm() * xt.norm());
    }

    #[test]
    fn condition_estimate_tracks_diagonal_scaling() {
        let d = DenseMatrix::from_fn(8, 8, |i, j| {
            if i == j {
                c(if i == 0 { 1e-6 } else { 1.0 }, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        let b = ComplexVector::ones(8);
        let sol = dense_solve(&d, &b).unwrap();
        assert!(
            sol.condition_estimate > 1e4,
            "estimate {} too small",
            sol.condition_estimate
        );
    }

    #[test]
    fn qr_reconstructs_and_is_orthonormal() {
        let mut rng = Rng::seed_from_u64(12);
        let m = DenseMatrix::from_fn(10, 4, |_, _| rng.complex_normal());
        let (q, r) = m.qr_thin();
        let qr = q.matmul(&r).unwrap();
        assert!(qr.sub(&m).max_abs() < 1e-12);
        let qhq = q.conj_transpose().matmul(&q).unwrap();
        assert!(qhq.sub(&DenseMatrix::identity(4)).max_abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_and_reveals_rank() {
        let mut rng = Rng::seed_from_u64(13);
        // build a rank-2 matrix
        let u1 = ComplexVector::from_fn(8, |_| rng.complex_normal());
        let u2 = ComplexVector::from_fn(8, |_| rng.complex_normal());
        let v1 = ComplexVector::from_fn(6, |_| rng.complex_normal());
        let v2 = ComplexVector::from_fn(6, |_| rng.complex_normal());
        let m = DenseMatrix::from_fn(8, 6, |i, j| u1[i] * v1[j] + u2[i] * v2[j]);
        let (u, s, v) = m.svd();
        assert!(s[0] >= s[1] && s[1] > 1e-10);
        assert!(s[2] < 1e-10 * s[0]);
        // reconstruct
        let k = s.len();
        let mut rec = DenseMatrix::zeros(8, 6);
        for t in 0..k {
            for i in 0..8 {
                for j in 0..6 {
                    let term = u[(i, t)] * Complex64::new(s[t], 0.0) * v[(j, t)].conj();
                    rec[(i, j)] += term;
                }
            }
        }
        assert!(rec.sub(&m).max_abs() < 1e-11 * s[0].max(1.0));
    }

    #[test]
    fn svd_wide_matrix() {
        let mut rng = Rng::seed_from_u64(14);
        let m = DenseMatrix::from_fn(3, 7, |_, _| rng.complex_normal());
        let (u, s, v) = m.svd();
        let mut rec = DenseMatrix::zeros(3, 7);
        for t in 0..s.len().min(3) {
            for i in 0..3 {
                for j in 0..7 {
                    rec[(i, j)] += u[(i, t)] * Complex64::new(s[t], 0.0) * v[(j, t)].conj();
                }
            }
        }
        assert!(rec.sub(&m).max_abs() < 1e-11 * s[0].max(1.0));
    }

    #[test]
    fn spectral_norm_of_unitary_scaled() {
        let n = 8;
        let omega = crate::fft::root_of_unity(n);
        let dft = DenseMatrix::from_fn(n, n, |i, j| omega.powu((i * j) as u32));
        // ||Omega|| = sqrt(n)
        assert!((dft.spectral_norm() - (n as f64).sqrt()).abs() < 1e-10);
    }
}
