//! Internal dense/sparse helpers. Problem matrices are stored dense; the hot
//! loops (RK4 right-hand sides, value iteration, simulation) run on a
//! compressed-row view that skips structural zeros.

use nalgebra::{DMatrix, DVector};

use crate::exec::{self, Execution};
use crate::problem::ProblemSpec;

/// Row count above which matrix-vector products fan out across threads.
const PAR_NNZ: usize = 250_000;

#[derive(Debug, Clone)]
pub(crate) struct SparseRows {
    ncols: usize,
    ptr: Vec<usize>,
    idx: Vec<usize>,
    val: Vec<f64>,
}

impl SparseRows {
    pub fn from_dense(m: &DMatrix<f64>) -> Self {
        let mut ptr = Vec::with_capacity(m.nrows() + 1);
        let mut idx = Vec::new();
        let mut val = Vec::new();
        ptr.push(0);
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let a = m[(i, j)];
                if a != 0.0 {
                    idx.push(j);
                    val.push(a);
                }
            }
            ptr.push(idx.len());
        }
        Self {
            ncols: m.ncols(),
            ptr,
            idx,
            val,
        }
    }

    /// Compressed rows of `m'`.
    pub fn transpose_of(m: &DMatrix<f64>) -> Self {
        Self::from_dense(&m.transpose())
    }

    pub fn nrows(&self) -> usize {
        self.ptr.len() - 1
    }

    pub fn nnz(&self) -> usize {
        self.val.len()
    }

    #[inline]
    pub fn row_dot(&self, i: usize, x: &[f64]) -> f64 {
        let (a, b) = (self.ptr[i], self.ptr[i + 1]);
        self.idx[a..b]
            .iter()
            .zip(&self.val[a..b])
            .map(|(&j, &v)| v * x[j])
            .sum()
    }

    pub fn mul_into(&self, x: &[f64], out: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(out.len(), self.nrows());
        let exec = if self.nnz() >= PAR_NNZ {
            Execution::Parallel
        } else {
            Execution::Sequential
        };
        exec::fill_rows(exec, out, |i| self.row_dot(i, x));
    }
}

/// Evaluates the Bellman right-hand side
/// `s + A'p - E'|r + B'p| + G'|-δ + H'p|` without allocating.
#[derive(Debug, Clone)]
pub(crate) struct BellmanRhs {
    at: SparseRows,
    bt: SparseRows,
    et: SparseRows,
    ht: SparseRows,
    gt: SparseRows,
    s: Vec<f64>,
    r: Vec<f64>,
    delta: Vec<f64>,
}

#[derive(Debug, Clone)]
pub(crate) struct RhsScratch {
    ctrl: Vec<f64>,
    dist: Vec<f64>,
    tmp: Vec<f64>,
}

impl BellmanRhs {
    pub fn new(spec: &ProblemSpec) -> Self {
        Self {
            at: SparseRows::transpose_of(spec.a()),
            bt: SparseRows::transpose_of(spec.b()),
            et: SparseRows::transpose_of(spec.e()),
            ht: SparseRows::transpose_of(spec.h()),
            gt: SparseRows::transpose_of(spec.g()),
            s: spec.s().iter().copied().collect(),
            r: spec.r().iter().copied().collect(),
            delta: spec.delta().iter().copied().collect(),
        }
    }

    pub fn scratch(&self) -> RhsScratch {
        RhsScratch {
            ctrl: vec![0.0; self.bt.nrows()],
            dist: vec![0.0; self.ht.nrows()],
            tmp: vec![0.0; self.at.nrows()],
        }
    }

    pub fn eval(&self, p: &[f64], out: &mut [f64], sc: &mut RhsScratch) {
        self.bt.mul_into(p, &mut sc.ctrl);
        for (c, r) in sc.ctrl.iter_mut().zip(&self.r) {
            *c = (*c + r).abs();
        }
        self.ht.mul_into(p, &mut sc.dist);
        for (d, delta) in sc.dist.iter_mut().zip(&self.delta) {
            *d = (*d - delta).abs();
        }
        self.at.mul_into(p, out);
        for (o, s) in out.iter_mut().zip(&self.s) {
            *o += s;
        }
        self.et.mul_into(&sc.ctrl, &mut sc.tmp);
        for (o, t) in out.iter_mut().zip(&sc.tmp) {
            *o -= t;
        }
        self.gt.mul_into(&sc.dist, &mut sc.tmp);
        for (o, t) in out.iter_mut().zip(&sc.tmp) {
            *o += t;
        }
    }
}

pub(crate) fn abs_matrix(m: &DMatrix<f64>) -> DMatrix<f64> {
    m.map(f64::abs)
}

pub(crate) fn abs_vector(v: &DVector<f64>) -> DVector<f64> {
    v.map(f64::abs)
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Smallest off-diagonal entry and its position; `None` for 1x1 or empty.
pub(crate) fn min_offdiag(m: &DMatrix<f64>) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if i != j && best.is_none_or(|(_, _, v)| m[(i, j)] < v) {
                best = Some((i, j, m[(i, j)]));
            }
        }
    }
    best
}

pub(crate) fn matrix_inf_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.nrows())
        .map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `sign(args)` with `sign(0) = +1`, and the mask of entries with
/// `|arg| <= tol`.
pub(crate) fn signs_with_ties(args: &[f64], tol: f64) -> (Vec<i8>, Vec<bool>) {
    let sigma = args.iter().map(|&a| if a < 0.0 && a.abs() > tol { -1 } else { 1 }).collect();
    let ties = args.iter().map(|a| a.abs() <= tol).collect();
    (sigma, ties)
}

/// Switching functions `r + B'p` of the bang-bang controller.
pub(crate) fn control_arguments(spec: &ProblemSpec, p: &[f64]) -> Vec<f64> {
    let b = spec.b();
    (0..spec.m())
        .map(|i| spec.r()[i] + (0..spec.n()).map(|k| b[(k, i)] * p[k]).sum::<f64>())
        .collect()
}

/// Tie tolerance `1e-9 (1 + ‖r‖∞ + ‖p‖∞ ‖B‖∞)`.
pub(crate) fn tie_tolerance(spec: &ProblemSpec, p: &[f64]) -> f64 {
    let r = spec.r().iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    crate::tol::TIE_SCALE * (1.0 + r + inf_norm(p) * matrix_inf_norm(spec.b()))
}

/// `diag(σ) E`.
pub(crate) fn signed_rows(e: &DMatrix<f64>, sigma: &[i8]) -> DMatrix<f64> {
    let mut k = e.clone();
    for (i, &s) in sigma.iter().enumerate() {
        if s < 0 {
            k.row_mut(i).apply(|x| *x = 0.0 - *x);
        } else if s == 0 {
            k.row_mut(i).fill(0.0);
        }
    }
    k
}

/// Serde adapter writing a matrix as a list of rows.
pub(crate) mod row_major {
    use nalgebra::DMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &DMatrix<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.row_iter().map(|r| r.iter().copied().collect()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<DMatrix<f64>, D::Error> {
        let rows = Vec::<Vec<f64>>::deserialize(d)?;
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged matrix rows"));
        }
        Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
    }
}
