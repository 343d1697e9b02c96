//! Complex vectors with finiteness checked at the validated constructor.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Deref, DerefMut, Index, IndexMut};

/// A dense complex vector.
///
/// [`ComplexVector::new`] rejects NaN/Inf entries; `From<Vec<Complex64>>`
/// wraps computed values without re-checking.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

impl ComplexVector {
    /// Validated constructor: every entry must be finite.
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFiniteEntry(i));
            }
        }
        Ok(Self { entries })
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            entries: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn ones(n: usize) -> Self {
        Self {
            entries: vec![Complex64::new(1.0, 0.0); n],
        }
    }

    /// The coordinate vector e_{i+1} (one-based in the usual notation).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.entries[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize) -> Complex64) -> Self {
        Self {
            entries: (0..n).map(f).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.entries
    }

    /// Reversed copy (multiplication by the reflection matrix J).
    pub fn reflected(&self) -> Self {
        let mut e = self.entries.clone();
        e.reverse();
        Self { entries: e }
    }

    pub fn conj(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self {
            entries: self.entries.iter().map(|z| z * a).collect(),
        }
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a * b)
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Unconjugated dot product a^T b.
    pub fn dot(&self, other: &Self) -> Complex64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Max-magnitude (infinity) norm.
    pub fn norm_inf(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl From<Vec<Complex64>> for ComplexVector {
    fn from(entries: Vec<Complex64>) -> Self {
        Self { entries }
    }
}

impl Deref for ComplexVector {
    type Target = [Complex64];
    fn deref(&self) -> &[Complex64] {
        &self.entries
    }
}

impl DerefMut for ComplexVector {
    fn deref_mut(&mut self) -> &mut [Complex64] {
        &mut self.entries
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.entries[i]
    }
}

impl IndexMut<usize> for ComplexVector {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.entries[i]
    }
}

impl FromIterator<Complex64> for ComplexVector {
    fn from_iter<T: IntoIterator<Item = Complex64>>(iter: T) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}
