//! Text formats for vectors, matrices, knot sets and generators: one entry
//! per line as "re im", matrices prefixed by a "rows cols" header line,
//! generators by a "n d kindA kindB" header with operator parameter blocks.

use crate::displacement::{Generator, Operator};
use crate::error::{Error, Result};
use crate::knots::KnotSet;
use crate::matrix::DenseMatrix;
use crate::vector::ComplexVector;
use num_complex::Complex64;
use std::fmt::Write as _;

fn fmt_c(z: Complex64) -> String {
    format!("{:.17e} {:.17e}", z.re, z.im)
}

fn parse_c(line: &str) -> Result<Complex64> {
    let mut it = line.split_whitespace();
    let re = it
        .next()
        .and_then(|t| t.parse::<f64>().ok())
        .ok_or_else(|| Error::Inconsistent(format!("bad complex entry: {line:?}")))?;
    let im = it
        .next()
        .and_then(|t| t.parse::<f64>().ok())
        .ok_or_else(|| Error::Inconsistent(format!("bad complex entry: {line:?}")))?;
    Ok(Complex64::new(re, im))
}

pub fn write_vector(v: &ComplexVector) -> String {
    let mut out = String::new();
    for z in v.iter() {
        let _ = writeln!(out, "{}", fmt_c(*z));
    }
    out
}

pub fn read_vector(text: &str) -> Result<ComplexVector> {
    let entries: Result<Vec<Complex64>> = text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(parse_c)
        .collect();
    ComplexVector::new(entries?)
}

pub fn write_matrix(m: &DenseMatrix) -> String {
    let mut out = format!("{} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let _ = writeln!(out, "{}", fmt_c(m[(i, j)]));
        }
    }
    out
}

pub fn read_matrix(text: &str) -> Result<DenseMatrix> {
    let mut lines = text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::EmptyInput("matrix text"))?;
    let mut it = header.split_whitespace();
    let rows: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Inconsistent("bad matrix header".into()))?;
    let cols: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Inconsistent("bad matrix header".into()))?;
    let mut data = Vec::with_capacity(rows * cols);
    for line in lines.take(rows * cols) {
        data.push(parse_c(line)?);
    }
    DenseMatrix::new(rows, cols, data)
}

fn write_operator(op: &Operator, out: &mut String) {
    match op {
        Operator::Shift(e) => {
            let _ = writeln!(out, "shift {}", fmt_c(*e));
        }
        Operator::ShiftTransposed(e) => {
            let _ = writeln!(out, "shift-t {}", fmt_c(*e));
        }
        Operator::Diagonal(s) => {
            let _ = writeln!(out, "diag {}", s.len());
            for z in s.knots() {
                let _ = writeln!(out, "{}", fmt_c(*z));
            }
        }
    }
}

fn read_operator<'a>(lines: &mut impl Iterator<Item = &'a str>) -> Result<Operator> {
    let head = lines
        .next()
        .ok_or_else(|| Error::EmptyInput("operator block"))?;
    let mut it = head.split_whitespace();
    let kind = it
        .next()
        .ok_or_else(|| Error::Inconsistent("empty operator line".into()))?;
    match kind {
        "shift" | "shift-t" => {
            let rest: String = it.collect::<Vec<_>>().join(" ");
            let e = parse_c(&rest)?;
            Ok(if kind == "shift" {
                Operator::Shift(e)
            } else {
                Operator::ShiftTransposed(e)
            })
        }
        "diag" => {
            let n: usize = it
                .next()
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Inconsistent("bad diag operator header".into()))?;
            let mut knots = Vec::with_capacity(n);
            for _ in 0..n {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::EmptyInput("diag operator knots"))?;
                knots.push(parse_c(line)?);
            }
            Ok(Operator::Diagonal(KnotSet::new(knots)?))
        }
        other => Err(Error::Inconsistent(format!("unknown operator kind {other:?}"))),
    }
}

/// Serializes a generator: header "n m d", two operator blocks, then the F
/// and G factor columns in the dense text format.
pub fn write_generator(gen: &Generator) -> String {
    let mut out = format!("{} {} {}\n", gen.n_rows(), gen.n_cols(), gen.length());
    write_operator(gen.operator_a(), &mut out);
    write_operator(gen.operator_b(), &mut out);
    for col in gen.f_columns() {
        out.push_str(&write_vector(col));
    }
    for col in gen.g_columns() {
        out.push_str(&write_vector(col));
    }
    out
}

pub fn read_generator(text: &str) -> Result<Generator> {
    let mut lines = text
        .lines()
        .map(|l| l.trim())
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::EmptyInput("generator text"))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Inconsistent("bad generator header".into()))?;
    let m: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Inconsistent("bad generator header".into()))?;
    let d: usize = it
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| Error::Inconsistent("bad generator header".into()))?;
    let a = read_operator(&mut lines)?;
    let b = read_operator(&mut lines)?;
    let mut read_cols = |count: usize, len: usize| -> Result<Vec<ComplexVector>> {
        let mut cols = Vec::with_capacity(count);
        for _ in 0..count {
            let mut entries = Vec::with_capacity(len);
            for _ in 0..len {
                let line = lines
                    .next()
                    .ok_or_else(|| Error::EmptyInput("generator factor entries"))?;
                entries.push(parse_c(line)?);
            }
            cols.push(ComplexVector::new(entries)?);
        }
        Ok(cols)
    };
    let f_cols = read_cols(d, n)?;
    let g_cols = read_cols(d, m)?;
    Generator::new(a, b, f_cols, g_cols, n, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    #[test]
    fn vector_and_matrix_round_trip() {
        let mut rng = Rng::seed_from_u64(90);
        let v = ComplexVector::from_fn(7, |_| rng.complex_normal());
        let back = read_vector(&write_vector(&v)).unwrap();
        assert_eq!(v, back);

        let m = DenseMatrix::from_fn(3, 5, |_, _| rng.complex_normal());
        let back = read_matrix(&write_matrix(&m)).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn generator_round_trip() {
        let mut rng = Rng::seed_from_u64(91);
        let n = 6;
        let s = KnotSet::new((0..n).map(|_| rng.complex_normal()).collect()).unwrap();
        let gen = Generator::new(
            Operator::Diagonal(s),
            Operator::Shift(Complex64::new(0.5, -0.25)),
            vec![ComplexVector::from_fn(n, |_| rng.complex_normal())],
            vec![ComplexVector::from_fn(n, |_| rng.complex_normal())],
            n,
            n,
        )
        .unwrap();
        let text = write_generator(&gen);
        let back = read_generator(&text).unwrap();
        assert_eq!(back.length(), gen.length());
        assert_eq!(back.operator_a(), gen.operator_a());
        assert_eq!(back.operator_b(), gen.operator_b());
        assert_eq!(back.f_columns(), gen.f_columns());
        assert_eq!(back.g_columns(), gen.g_columns());
    }
}
