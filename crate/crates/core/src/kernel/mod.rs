//! Spectral kernels for Metzler matrices: Perron roots, Hurwitz tests and
//! nonnegative eigenpairs.

mod eigen;
mod perron;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub use eigen::{nonneg_eigenpairs, structural_eigenpairs};
pub use perron::{is_hurwitz, linear_certificate, perron_pair, spectral_abscissa, HurwitzVerdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda: f64,
    /// Max-norm 1.
    pub v: Vec<f64>,
    /// `‖Mv - λv‖∞`.
    pub residual: f64,
}

impl EigenPair {
    pub(crate) fn new(m: &DMatrix<f64>, lambda: f64, mut v: Vec<f64>) -> Self {
        let scale = v.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
        if scale > 0.0 {
            v.iter_mut().for_each(|x| *x /= scale);
        }
        let residual = residual(m, lambda, &v);
        Self { lambda, v, residual }
    }
}

pub(crate) fn residual(m: &DMatrix<f64>, lambda: f64, v: &[f64]) -> f64 {
    let n = v.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        let mut acc = -lambda * v[i];
        for j in 0..n {
            acc += m[(i, j)] * v[j];
        }
        worst = worst.max(acc.abs());
    }
    worst
}

pub fn is_metzler(m: &DMatrix<f64>) -> bool {
    require_metzler(m).is_ok()
}

pub(crate) fn require_metzler(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    if m.nrows() == 0 {
        return Err(Error::DimensionMismatch("empty matrix".into()));
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && m[(i, j)] < -tol::METZLER {
                return Err(Error::InvalidArgument(format!(
                    "matrix is not Metzler: entry ({i}, {j}) = {}",
                    m[(i, j)]
                )));
            }
        }
    }
    Ok(())
}

/// Copy of `m` with off-diagonal float dust below zero removed.
pub(crate) fn clean_metzler(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && out[(i, j)] < 0.0 {
                out[(i, j)] = 0.0;
            }
        }
    }
    out
}

/// Entrywise max-abs norm scale used for relative tolerances.
pub(crate) fn scale_of(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(1.0_f64, |a, x| a.max(x.abs()))
}
