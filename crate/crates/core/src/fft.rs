//! DFT/FFT kernels, f-circulant and Toeplitz matrix-vector products.
//!
//! The transform convention is Omega = (omega_n^{ij}) with
//! omega_n = exp(+2*pi*i/n), so `idft` applies Omega^{-1} = Omega^H / n.
//! Power-of-two lengths run through an iterative radix-2 kernel; everything
//! else goes through Bluestein's chirp transform on a padded power of two.

use crate::error::{Error, Result};
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::rc::Rc;

/// Primitive n-th root of unity exp(2*pi*i/n).
pub fn root_of_unity(n: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI / n as f64)
}

/// omega_n^k, reduced mod n before evaluation.
pub fn root_of_unity_pow(n: usize, k: i64) -> Complex64 {
    let k = k.rem_euclid(n as i64);
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64)
}

fn twiddle_table(n: usize) -> Rc<Vec<Complex64>> {
    thread_local! {
        static CACHE: RefCell<HashMap<usize, Rc<Vec<Complex64>>>> = RefCell::new(HashMap::new());
    }
    CACHE.with(|cache| {
        let mut guard = cache.borrow_mut();
        if let Some(t) = guard.get(&n) {
            return t.clone();
        }
        let half = (n / 2).max(1);
        let table: Rc<Vec<Complex64>> = Rc::new(
            (0..half)
                .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64))
                .collect(),
        );
        // keep the cache from growing without bound under many lengths
        if guard.len() > 64 {
            guard.clear();
        }
        guard.insert(n, table.clone());
        table
    })
}

/// In-place radix-2 FFT; `forward` applies omega = exp(+2*pi*i/n) twiddles.
fn fft_pow2(data: &mut [Complex64], forward: bool) {
    let n = data.len();
    debug_assert!(n.is_power_of_two());
    if n <= 1 {
        return;
    }
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 0..n - 1 {
        if i < j {
            data.swap(i, j);
        }
        let mut mask = n >> 1;
        while j & mask != 0 {
            j ^= mask;
            mask >>= 1;
        }
        j |= mask;
    }
    let tw = twiddle_table(n);
    let mut len = 2;
    while len <= n {
        let half = len / 2;
        let step = n / len;
        for start in (0..n).step_by(len) {
            for k in 0..half {
                let mut w = tw[k * step];
                if !forward {
                    w = w.conj();
                }
                let a = data[start + k];
                let b = data[start + k + half] * w;
                data[start + k] = a + b;
                data[start + k + half] = a - b;
            }
        }
        len <<= 1;
    }
}

/// Chirp factor exp(sign * pi * i * j^2 / n) with the exponent reduced mod 2n.
fn chirp(n: usize, j: usize, forward: bool) -> Complex64 {
    let m = ((j as u128 * j as u128) % (2 * n as u128)) as f64;
    let angle = PI * m / n as f64;
    Complex64::from_polar(1.0, if forward { angle } else { -angle })
}

/// Chirp values and the transformed symmetric chirp for one Bluestein
/// length, cached per thread (the second FFT of every call is shared).
fn bluestein_tables(n: usize, forward: bool) -> Rc<(Vec<Complex64>, Vec<Complex64>)> {
    thread_local! {
        static CACHE: RefCell<HashMap<(usize, bool), Rc<(Vec<Complex64>, Vec<Complex64>)>>> =
            RefCell::new(HashMap::new());
    }
    CACHE.with(|cache| {
        let mut guard = cache.borrow_mut();
        if let Some(t) = guard.get(&(n, forward)) {
            return t.clone();
        }
        let m = (2 * n - 1).next_power_of_two();
        let chirps: Vec<Complex64> = (0..n).map(|j| chirp(n, j, forward)).collect();
        let mut b = vec![Complex64::new(0.0, 0.0); m];
        for (j, w) in chirps.iter().enumerate() {
            let wc = w.conj();
            b[j] = wc;
            if j > 0 {
                b[m - j] = wc;
            }
        }
        fft_pow2(&mut b, true);
        let table = Rc::new((chirps, b));
        if guard.len() > 64 {
            guard.clear();
        }
        guard.insert((n, forward), table.clone());
        table
    })
}

/// Bluestein transform for arbitrary length.
fn bluestein(input: &[Complex64], forward: bool) -> Vec<Complex64> {
    let n = input.len();
    let m = (2 * n - 1).next_power_of_two();
    let tables = bluestein_tables(n, forward);
    let (chirps, b_spectrum) = (&tables.0, &tables.1);
    let mut a = vec![Complex64::new(0.0, 0.0); m];
    for j in 0..n {
        a[j] = input[j] * chirps[j];
    }
    fft_pow2(&mut a, true);
    for (x, y) in a.iter_mut().zip(b_spectrum) {
        *x *= y;
    }
    fft_pow2(&mut a, false);
    let scale = 1.0 / m as f64;
    (0..n)
        .map(|k| a[k] * scale * chirps[k])
        .collect()
}

fn transform(v: &[Complex64], forward: bool) -> Vec<Complex64> {
    if v.len().is_power_of_two() {
        let mut data = v.to_vec();
        fft_pow2(&mut data, forward);
        data
    } else {
        bluestein(v, forward)
    }
}

/// Omega * v.
pub fn dft(v: &ComplexVector) -> Result<ComplexVector> {
    if v.is_empty() {
        return Err(Error::EmptyInput("dft of an empty vector"));
    }
    Ok(transform(v, true).into())
}

/// Omega^{-1} * v.
pub fn idft(v: &ComplexVector) -> Result<ComplexVector> {
    if v.is_empty() {
        return Err(Error::EmptyInput("idft of an empty vector"));
    }
    let n = v.len() as f64;
    let mut out = transform(v, false);
    for z in &mut out {
        *z /= n;
    }
    Ok(out.into())
}

/// Z_{f^n}(v) * u via the factorization through V_f = Omega diag(f^j).
///
/// The scalar `f` parametrizes V_f; the circulant scalar of the product is
/// f^n. Requires f != 0.
pub fn f_circulant_matvec(
    f: Complex64,
    v: &ComplexVector,
    u: &ComplexVector,
) -> Result<ComplexVector> {
    if f.norm() == 0.0 {
        return Err(Error::InvalidScalar(
            "f-circulant factorization requires f != 0".into(),
        ));
    }
    if v.len() != u.len() {
        return Err(Error::DimensionMismatch(format!(
            "circulant column has length {}, vector has length {}",
            v.len(),
            u.len()
        )));
    }
    if v.is_empty() {
        return Err(Error::EmptyInput("f_circulant_matvec"));
    }
    let n = v.len();
    // powers of f; |f| = 1 in every internal use, so no overflow guard here
    let fpow: Vec<Complex64> = std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| {
        Some(p * f)
    })
    .take(n)
    .collect();
    let scale_in = |x: &ComplexVector| -> ComplexVector {
        x.iter().zip(&fpow).map(|(a, p)| a * p).collect()
    };
    let vf_v = dft(&scale_in(v))?;
    let vf_u = dft(&scale_in(u))?;
    let prod: ComplexVector = vf_v.hadamard(&vf_u);
    let back = idft(&prod)?;
    Ok(back.iter().zip(&fpow).map(|(a, p)| a / p).collect())
}

/// Z_e(v) * u for a circulant scalar e (the matrix Z_e(v), first column v).
///
/// Routes through `f_circulant_matvec` with f = e^{1/n}; e = 0 falls back to
/// the triangular-Toeplitz product via circulant embedding.
pub fn circulant_matvec_by_scalar(
    e: Complex64,
    v: &ComplexVector,
    u: &ComplexVector,
) -> Result<ComplexVector> {
    if v.len() != u.len() {
        return Err(Error::DimensionMismatch(format!(
            "circulant column has length {}, vector has length {}",
            v.len(),
            u.len()
        )));
    }
    let n = v.len();
    if n == 0 {
        return Err(Error::EmptyInput("circulant_matvec_by_scalar"));
    }
    if e.norm() == 0.0 {
        // Z_0(v) is lower-triangular Toeplitz with first column v
        let mut row = ComplexVector::zeros(n);
        row[0] = v[0];
        return toeplitz_matvec(v, &row, u);
    }
    let (r, phi) = e.to_polar();
    let f = Complex64::from_polar(r.powf(1.0 / n as f64), phi / n as f64);
    f_circulant_matvec(f, v, u)
}

/// Transposed product Z_e(v)^T * u, using Z_e(v)^T = J Z_e(v) J.
pub fn circulant_transposed_matvec_by_scalar(
    e: Complex64,
    v: &ComplexVector,
    u: &ComplexVector,
) -> Result<ComplexVector> {
    let res = circulant_matvec_by_scalar(e, v, &u.reflected())?;
    Ok(res.reflected())
}

/// Z_e(v) with the diagonalization V_f^{-1} D(V_f v) V_f precomputed, for
/// repeated products against many vectors (two FFTs per apply).
#[derive(Debug, Clone)]
pub struct CirculantOperator {
    n: usize,
    fpow: Vec<Complex64>,
    spectrum: Vec<Complex64>,
}

impl CirculantOperator {
    pub fn new(e: Complex64, v: &ComplexVector) -> Result<Self> {
        if e.norm() == 0.0 {
            return Err(Error::InvalidScalar(
                "cached circulant operator requires e != 0".into(),
            ));
        }
        let n = v.len();
        if n == 0 {
            return Err(Error::EmptyInput("CirculantOperator"));
        }
        let (r, phi) = e.to_polar();
        let f = Complex64::from_polar(r.powf(1.0 / n as f64), phi / n as f64);
        let fpow: Vec<Complex64> =
            std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * f))
                .take(n)
                .collect();
        let scaled: ComplexVector = v.iter().zip(&fpow).map(|(a, p)| a * p).collect();
        let spectrum = dft(&scaled)?.into_vec();
        Ok(Self { n, fpow, spectrum })
    }

    pub fn apply(&self, u: &ComplexVector) -> Result<ComplexVector> {
        if u.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "circulant operator of order {} applied to length {}",
                self.n,
                u.len()
            )));
        }
        let scaled: ComplexVector = u.iter().zip(&self.fpow).map(|(a, p)| a * p).collect();
        let mut freq = dft(&scaled)?;
        for (z, s) in freq.iter_mut().zip(&self.spectrum) {
            *z *= s;
        }
        let back = idft(&freq)?;
        Ok(back.iter().zip(&self.fpow).map(|(a, p)| a / p).collect())
    }

    /// Z_e(v)^T * u = J Z_e(v) J u.
    pub fn apply_transposed(&self, u: &ComplexVector) -> Result<ComplexVector> {
        Ok(self.apply(&u.reflected())?.reflected())
    }
}

/// Column k of Z_e(w): w rotated down k places with the wrapped entries
/// scaled by e.
pub fn circulant_column(e: Complex64, w: &ComplexVector, k: usize) -> ComplexVector {
    let n = w.len();
    ComplexVector::from_fn(n, |i| {
        if i >= k {
            w[i - k]
        } else {
            e * w[n + i - k]
        }
    })
}

/// T * u for the Toeplitz matrix with the given first column and first row,
/// via embedding into a power-of-two circulant.
pub fn toeplitz_matvec(
    first_col: &ComplexVector,
    first_row: &ComplexVector,
    u: &ComplexVector,
) -> Result<ComplexVector> {
    let n = first_col.len();
    if first_row.len() != n || u.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "toeplitz data lengths {} / {} / {}",
            n,
            first_row.len(),
            u.len()
        )));
    }
    if n == 0 {
        return Err(Error::EmptyInput("toeplitz_matvec"));
    }
    if (first_col[0] - first_row[0]).norm() > 1e-14 * (1.0 + first_col[0].norm()) {
        return Err(Error::Inconsistent(
            "first column and first row disagree at the corner entry".into(),
        ));
    }
    let m = (2 * n - 1).next_power_of_two();
    let mut c = vec![Complex64::new(0.0, 0.0); m];
    c[..n].copy_from_slice(first_col);
    for j in 1..n {
        c[m - j] = first_row[j];
    }
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    x[..n].copy_from_slice(u);
    fft_pow2(&mut c, true);
    fft_pow2(&mut x, true);
    for (a, b) in x.iter_mut().zip(&c) {
        *a *= b;
    }
    fft_pow2(&mut x, false);
    let scale = 1.0 / m as f64;
    Ok((0..n).map(|i| x[i] * scale).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_close(a: &ComplexVector, b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!(
                (x - y).norm() <= tol,
                "mismatch: {x} vs {y} (tol {tol})"
            );
        }
    }

    /// O(n^2) summation oracle for Omega * v.
    fn dft_naive(v: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| root_of_unity_pow(n, (i * j) as i64) * v[j])
                    .sum()
            })
            .collect()
    }

    #[test]
    fn dft_unit_impulse() {
        let v = ComplexVector::unit(4, 0);
        let out = dft(&v).unwrap();
        assert_close(&out, &[c(1.0, 0.0); 4], 1e-14);
    }

    #[test]
    fn dft_constant_vector() {
        let v = ComplexVector::ones(4);
        let out = dft(&v).unwrap();
        assert_close(
            &out,
            &[c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            1e-14,
        );
    }

    #[test]
    fn dft_second_column_gives_root_powers() {
        let v = ComplexVector::unit(4, 1);
        let out = dft(&v).unwrap();
        assert_close(
            &out,
            &[c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)],
            1e-14,
        );
    }

    #[test]
    fn idft_inverts_dft() {
        let v: ComplexVector = vec![c(4.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)].into();
        let out = idft(&v).unwrap();
        assert_close(&out, &[c(1.0, 0.0); 4], 1e-14);

        let ones = ComplexVector::ones(4);
        let back = idft(&ones).unwrap();
        let mut expect = vec![c(0.0, 0.0); 4];
        expect[0] = c(1.0, 0.0);
        assert_close(&back, &expect, 1e-14);

        let mut rng = Rng::seed_from_u64(42);
        let w = ComplexVector::from_fn(8, |_| rng.complex_normal());
        let rt = idft(&dft(&w).unwrap()).unwrap();
        assert_close(&rt, &w, 1e-12);
    }

    #[test]
    fn dft_matches_naive_various_lengths() {
        let mut rng = Rng::seed_from_u64(3);
        for n in [1usize, 2, 3, 5, 7, 12, 16, 33, 100, 257, 512] {
            let v = ComplexVector::from_fn(n, |_| rng.complex_normal());
            let fast = dft(&v).unwrap();
            let slow = dft_naive(&v);
            let scale = 1e-12 * n as f64;
            assert_close(&fast, &slow, scale.max(1e-12));
        }
    }

    #[test]
    fn roundtrip_large_lengths() {
        let mut rng = Rng::seed_from_u64(9);
        for n in [64usize, 1000, 1024] {
            let v = ComplexVector::from_fn(n, |_| rng.complex_normal());
            let rt = idft(&dft(&v).unwrap()).unwrap();
            let err = rt.sub(&v).norm_inf();
            assert!(err <= 1e-12 * n as f64, "n={n}: {err}");
        }
    }

    #[test]
    fn empty_inputs_rejected() {
        let v = ComplexVector::zeros(0);
        assert!(dft(&v).is_err());
        assert!(idft(&v).is_err());
    }

    #[test]
    fn unit_circulant_is_identity_and_shift() {
        // Z_1(e_1) = I
        let v = ComplexVector::unit(3, 0);
        let u: ComplexVector = vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)].into();
        let out = f_circulant_matvec(c(1.0, 0.0), &v, &u).unwrap();
        assert_close(&out, &u, 1e-13);

        // Z_1(e_2) is the cyclic down-shift
        let v2 = ComplexVector::unit(3, 1);
        let out2 = f_circulant_matvec(c(1.0, 0.0), &v2, &u).unwrap();
        assert_close(&out2, &[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)], 1e-13);
    }

    #[test]
    fn f_zero_rejected() {
        let v = ComplexVector::ones(4);
        assert!(matches!(
            f_circulant_matvec(c(0.0, 0.0), &v, &v),
            Err(Error::InvalidScalar(_))
        ));
    }

    /// Dense f^n-circulant construction oracle: column j of Z_phi(v) is
    /// v shifted down j places with wrapped entries scaled by phi.
    fn circulant_dense_matvec(phi: Complex64, v: &[Complex64], u: &[Complex64]) -> Vec<Complex64> {
        let n = v.len();
        let mut out = vec![c(0.0, 0.0); n];
        for j in 0..n {
            for i in 0..n {
                let entry = if i >= j { v[i - j] } else { phi * v[n + i - j] };
                out[i] += entry * u[j];
            }
        }
        out
    }

    #[test]
    fn f_circulant_matches_dense_oracle() {
        let mut rng = Rng::seed_from_u64(7);
        let n = 16;
        let v = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let u = ComplexVector::from_fn(n, |_| rng.complex_normal());
        // f = 1 gives the plain circulant
        let fast = f_circulant_matvec(c(1.0, 0.0), &v, &u).unwrap();
        let dense = circulant_dense_matvec(c(1.0, 0.0), &v, &u);
        assert_close(&fast, &dense, 1e-12);
        // f = exp(i*pi/(2n)) gives an f^n = i circulant
        let f = Complex64::from_polar(1.0, PI / (2.0 * n as f64));
        let phi = f.powu(n as u32);
        let fast2 = f_circulant_matvec(f, &v, &u).unwrap();
        let dense2 = circulant_dense_matvec(phi, &v, &u);
        assert_close(&fast2, &dense2, 1e-12);
    }

    #[test]
    fn circulant_by_scalar_handles_zero() {
        let mut rng = Rng::seed_from_u64(17);
        let n = 8;
        let v = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let u = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let fast = circulant_matvec_by_scalar(c(0.0, 0.0), &v, &u).unwrap();
        let dense = circulant_dense_matvec(c(0.0, 0.0), &v, &u);
        assert_close(&fast, &dense, 1e-12);
        let fast2 = circulant_matvec_by_scalar(c(-1.0, 0.0), &v, &u).unwrap();
        let dense2 = circulant_dense_matvec(c(-1.0, 0.0), &v, &u);
        assert_close(&fast2, &dense2, 1e-12);
    }

    #[test]
    fn toeplitz_identity_and_shift() {
        let e1 = ComplexVector::unit(3, 0);
        let u: ComplexVector = vec![c(1.0, 1.0), c(2.0, 0.0), c(3.0, -1.0)].into();
        let out = toeplitz_matvec(&e1, &e1, &u).unwrap();
        assert_close(&out, &u, 1e-13);

        // lower shift: first col e_2, first row 0
        let col = ComplexVector::unit(3, 1);
        let row = ComplexVector::zeros(3);
        let out2 = toeplitz_matvec(&col, &row, &u).unwrap();
        assert_close(&out2, &[c(0.0, 0.0), c(1.0, 1.0), c(2.0, 0.0)], 1e-13);
    }

    #[test]
    fn toeplitz_corner_mismatch_rejected() {
        let col = ComplexVector::ones(3);
        let mut row = ComplexVector::ones(3);
        row[0] = c(2.0, 0.0);
        let u = ComplexVector::ones(3);
        assert!(matches!(
            toeplitz_matvec(&col, &row, &u),
            Err(Error::Inconsistent(_))
        ));
    }

    #[test]
    fn toeplitz_matches_dense_oracle() {
        let mut rng = Rng::seed_from_u64(11);
        let n = 32;
        let mut col = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let mut row = ComplexVector::from_fn(n, |_| rng.complex_normal());
        row[0] = col[0];
        let u = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let fast = toeplitz_matvec(&col, &row, &u).unwrap();
        // O(n^2) dense oracle
        let mut dense = vec![c(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                let t = if i >= j { col[i - j] } else { row[j - i] };
                dense[i] += t * u[j];
            }
        }
        assert_close(&fast, &dense, 1e-12);
        col[0] = row[0]; // silence unused-mut warning path
    }

    #[test]
    fn reflected_toeplitz_products_are_hankel() {
        // JT and TJ have constant antidiagonals, so a Hankel product H*u is
        // a reflected Toeplitz product; checked densely
        let mut rng = Rng::seed_from_u64(29);
        let n = 24;
        let mut col = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let row = {
            let mut r = ComplexVector::from_fn(n, |_| rng.complex_normal());
            r[0] = col[0];
            r
        };
        let u = ComplexVector::from_fn(n, |_| rng.complex_normal());
        // H = J T: H u = J (T u)
        let tu = toeplitz_matvec(&col, &row, &u).unwrap();
        let hu = tu.reflected();
        // dense Hankel oracle: H[i][j] = T[n-1-i][j]
        let mut dense = vec![c(0.0, 0.0); n];
        for i in 0..n {
            for j in 0..n {
                let (ti, tj) = (n - 1 - i, j);
                let t = if ti >= tj { col[ti - tj] } else { row[tj - ti] };
                dense[i] += t * u[j];
            }
        }
        assert_close(&hu, &dense, 1e-12 * 8.0);
        // constant antidiagonals of J T: entry (i, j) equals entry (i+1, j-1)
        let h_entry = |i: usize, j: usize| {
            let ti = n - 1 - i;
            if ti >= j {
                col[ti - j]
            } else {
                row[j - ti]
            }
        };
        for i in 0..n - 1 {
            for j in 1..n {
                assert!((h_entry(i, j) - h_entry(i + 1, j - 1)).norm() == 0.0);
            }
        }
        col[0] = row[0];
    }

    #[test]
    fn linearity_of_f_circulant() {
        let mut rng = Rng::seed_from_u64(23);
        let n = 8;
        let v = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let u = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let w = ComplexVector::from_fn(n, |_| rng.complex_normal());
        let alpha = c(0.3, -1.2);
        let beta = c(-2.0, 0.7);
        let lhs = f_circulant_matvec(
            c(1.0, 0.0),
            &v,
            &u.scale(alpha).add(&w.scale(beta)),
        )
        .unwrap();
        let rhs = f_circulant_matvec(c(1.0, 0.0), &v, &u)
            .unwrap()
            .scale(alpha)
            .add(&f_circulant_matvec(c(1.0, 0.0), &v, &w).unwrap().scale(beta));
        assert!(lhs.sub(&rhs).norm_inf() <= 1e-12);
    }
}
