//! Structured-matrix computation kit.
//!
//! The crate implements displacement representations of Toeplitz, Hankel,
//! Vandermonde and Cauchy-type matrices, generator-level structure
//! transformations among those classes, hierarchical (HSS-style) compression
//! of Cauchy matrices with knots on circles and lines, and the fast
//! approximate matrix-vector products and linear solvers built on top,
//! including polynomial/rational multipoint evaluation and interpolation and
//! a superfast Toeplitz solve pipeline.

pub mod displacement;
pub mod error;
pub mod fixtures;
pub mod fft;
pub mod kernels;
pub mod knots;
pub mod matrix;
pub mod rng;
pub mod hss;
pub mod solvers;
pub mod textio;
pub mod transforms;
pub mod vector;

pub use displacement::{Generator, Operator, StructureClass};
pub use error::{Error, Result};
pub use knots::KnotSet;
pub use matrix::{dense_solve, DenseMatrix, DenseSolution};
pub use vector::ComplexVector;

pub use num_complex::Complex64;
