//! Transient 2D exterior wave fields from Krylov reduced-order models.
//!
//! The pipeline has three stages:
//!
//! 1. [`zolotarev`] and [`stieltjes`] build a frequency-independent perfectly
//!    matched layer: the optimal `[k-1/k]` rational approximation of `1/sqrt(s)`
//!    on a spectral interval, converted into purely imaginary finite-difference
//!    steps.
//! 2. [`grid`] and [`operator`] glue those steps onto a uniform interior grid
//!    and assemble the complex, `M`-symmetric five-point operator.
//! 3. [`lanczos`], [`tridiag`] and [`sctde`] project the operator onto a Krylov
//!    subspace with a renormalized bi-Lanczos recursion and evaluate the
//!    stability-corrected time-domain exponent `Re[exp(-sqrt(A) t) / sqrt(A)] b`
//!    on the projected tridiagonal matrix.
//!
//! [`reference`] holds the validation oracles (a Yee-grid FDTD solver with an
//! ADE perfectly matched layer, and the analytic homogeneous-medium response),
//! and [`harness`] wires everything into scenarios, convergence studies and the
//! `wavecast` command line tool.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // negated comparisons reject NaN

pub mod dense;
pub mod elliptic;
pub mod error;
pub mod grid;
pub mod harness;
pub mod lanczos;
pub mod operator;
pub mod reference;
pub mod sctde;
pub mod signal;
pub mod stieltjes;
pub mod tridiag;
pub mod zolotarev;

pub use error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
