//! The superfast Toeplitz solve: a length-2 displacement generator built
//! structurally from the matrix data, the unitary DFT map onto an FCF-like
//! Cauchy matrix, the compressed solve there, and the unitary back-map.

use crate::displacement::{Generator, Operator};
use crate::error::{Error, Result};
use crate::fft::{dft, idft, root_of_unity_pow, toeplitz_matvec};
use crate::hss::{build_cauchy_like_hss, hss_solve_with, SolveOptions};
use crate::transforms::toeplitz_to_cauchy_dft;
use crate::vector::ComplexVector;
use num_complex::Complex64;

/// Solve outcome with the measured residual and the condition estimate of
/// the mapped system.
#[derive(Debug, Clone)]
pub struct ToeplitzSolveReport {
    pub x: ComplexVector,
    /// ||T x - b|| / ||b||
    pub relative_residual: f64,
    pub condition_estimate: f64,
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// The (Z_1, Z_{-1}) displacement generator of the Toeplitz matrix with the
/// given first column and row, assembled structurally (length <= 2):
/// the displacement is nonzero only in the first row and last column.
pub fn toeplitz_generator(
    first_col: &ComplexVector,
    first_row: &ComplexVector,
) -> Result<Generator> {
    let n = first_col.len();
    if first_row.len() != n {
        return Err(Error::DimensionMismatch(
            "toeplitz column/row length mismatch".into(),
        ));
    }
    if n == 0 {
        return Err(Error::EmptyInput("toeplitz_generator"));
    }
    if (first_col[0] - first_row[0]).norm() > 1e-14 * (1.0 + first_col[0].norm()) {
        return Err(Error::Inconsistent(
            "first column and first row disagree at the corner entry".into(),
        ));
    }
    // D = Z_1 T - T Z_{-1}: row 0 and column n-1 only
    // D[0, j] = t_{n-1-j} - t_{-1-j} for j <= n-2, D[0, n-1] = 2 t_0
    // D[i, n-1] = t_{i-n} + t_i for i >= 1
    let mut a = ComplexVector::zeros(n);
    for j in 0..n.saturating_sub(1) {
        a[j] = first_col[n - 1 - j] - first_row[j + 1];
    }
    a[n - 1] = 2.0 * first_col[0];
    let mut bvec = ComplexVector::zeros(n);
    for i in 1..n {
        bvec[i] = first_row[n - i] + first_col[i];
    }
    let mut gen = Generator::new(
        Operator::Shift(one()),
        Operator::Shift(-one()),
        vec![],
        vec![],
        n,
        n,
    )?;
    gen.push_column(ComplexVector::unit(n, 0), a);
    gen.push_column(bvec, ComplexVector::unit(n, n - 1));
    Ok(gen)
}

/// Solves T x = b through the DFT map and the compressed FCF solve.
pub fn toeplitz_solve_with(
    first_col: &ComplexVector,
    first_row: &ComplexVector,
    b: &ComplexVector,
    eps: f64,
) -> Result<ToeplitzSolveReport> {
    let n = first_col.len();
    if b.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "rhs length {} vs matrix order {n}",
            b.len()
        )));
    }
    let gen = toeplitz_generator(first_col, first_row)?;
    let cgen = toeplitz_to_cauchy_dft(&gen)?;
    // C = P T N for P = Omega/sqrt(n), N = D_0^H Omega^H / sqrt(n);
    // T^{-1} = N C^{-1} P, so x = N (C^{-1} (P b))
    let s = match cgen.operator_a() {
        Operator::Diagonal(s) => s.clone(),
        _ => unreachable!("the DFT map yields diagonal operators"),
    };
    let e_col = root_of_unity_pow(2 * n, 1);
    let coeff: Vec<(ComplexVector, ComplexVector)> = cgen
        .f_columns()
        .iter()
        .cloned()
        .zip(cgen.g_columns().iter().cloned())
        .collect();
    let h = build_cauchy_like_hss(&s, e_col, n, coeff, eps)?;
    let sqrt_n = (n as f64).sqrt();
    let pb = dft(b)?.scale(Complex64::new(1.0 / sqrt_n, 0.0));
    let report = hss_solve_with(&h, &pb, &SolveOptions::default())?;
    // x = N y = sqrt(n) D_0^H idft(y)
    let y = idft(&report.x)?;
    let x = ComplexVector::from_fn(n, |i| {
        y[i] * root_of_unity_pow(2 * n, -(i as i64)) * sqrt_n
    });
    let residual = toeplitz_matvec(first_col, first_row, &x)?.sub(b);
    let rel = residual.norm() / b.norm().max(f64::MIN_POSITIVE);
    // c_solve * n * eps * kappa residual contract, failing closed on gross
    // violations rather than returning a silently wrong answer
    let kappa = report.condition_estimate.max(1.0);
    let ceiling = (100.0 * n as f64 * eps * kappa).max(1e-9);
    if rel > ceiling {
        return Err(Error::ConvergenceFailure(format!(
            "toeplitz residual {rel:.3e} above the contract ceiling {ceiling:.3e}"
        )));
    }
    Ok(ToeplitzSolveReport {
        x,
        relative_residual: rel,
        condition_estimate: report.condition_estimate,
    })
}

/// Solve T x = b; see [`toeplitz_solve_with`] for diagnostics.
pub fn toeplitz_solve(
    first_col: &ComplexVector,
    first_row: &ComplexVector,
    b: &ComplexVector,
    eps: f64,
) -> Result<ComplexVector> {
    toeplitz_solve_with(first_col, first_row, b, eps).map(|r| r.x)
}
