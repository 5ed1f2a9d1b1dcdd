//! Infinite-horizon value: the algebraic Bellman equation
//! `0 = s + A'p - E'|r + B'p| + G'|H'p - δ|`, solved by value iteration on
//! the rate-`h` discretization `p_{k+1} = p_k + F(p_k) / h`.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::write_table;
use crate::finite::{gamma_check, GammaCheck};
use crate::linalg::{abs_matrix, control_arguments, inf_norm, signed_rows, signs_with_ties, tie_tolerance, BellmanRhs};
use crate::problem::{require_valid, ProblemSpec};
use crate::tol;

/// Consecutive non-shrinking increments required to call growth divergent.
const GROWTH_RUN: usize = 100;
/// Steps this many ulps of `‖p‖` count as converged regardless of the ratio.
const ROUNDING_STEPS: f64 = 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ViStatus {
    Converged,
    Diverged,
    IterCap,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ViOptions {
    /// Discretization rate; [`default_rate`] when `None`.
    pub h: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub divergence_cap: f64,
    pub trace: bool,
}

impl Default for ViOptions {
    fn default() -> Self {
        Self {
            h: None,
            tol: tol::FIXED_POINT,
            max_iter: tol::VI_ITER_CAP,
            divergence_cap: tol::VI_DIVERGENCE_CAP,
            trace: false,
        }
    }
}

impl ViOptions {
    pub fn with_rate(h: f64) -> Self {
        Self { h: Some(h), ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub p_norm: f64,
    pub step_norm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValueVector {
    pub p: Vec<f64>,
    /// `‖s + A'p - E'|r + B'p| + G'|H'p - δ|‖∞` at the returned `p`.
    pub residual: f64,
    pub iterations: usize,
    pub h: f64,
    pub status: ViStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRow>>,
}

impl ValueVector {
    pub fn converged(&self) -> bool {
        self.status == ViStatus::Converged
    }

    pub fn value(&self, x0: &[f64]) -> f64 {
        self.p.iter().zip(x0).map(|(a, b)| a * b).sum()
    }

    /// CSV with header `k,p_norm,step_norm`; empty body without a trace.
    pub fn write_trace_csv<W: Write>(&self, w: W) -> Result<()> {
        let header = ["k", "p_norm", "step_norm"].map(String::from);
        let rows = self
            .trace
            .iter()
            .flatten()
            .map(|r| vec![r.k as f64, r.p_norm, r.step_norm]);
        write_table(w, &header, rows)
    }
}

/// `max(0, max_i -(A - |B|E - |H|G)_ii) + 1`.
pub fn default_rate(spec: &ProblemSpec) -> f64 {
    let m = shift_matrix(spec);
    let worst = (0..spec.n()).map(|i| -m[(i, i)]).fold(0.0, f64::max);
    worst + 1.0
}

fn shift_matrix(spec: &ProblemSpec) -> DMatrix<f64> {
    spec.metzler_test_matrix() - abs_matrix(spec.h()) * spec.g()
}

fn check_rate(spec: &ProblemSpec, h: f64) -> Result<()> {
    let m = shift_matrix(spec);
    let ok = h.is_finite() && h > 0.0 && (0..spec.n()).all(|i| m[(i, i)] + h >= -tol::METZLER);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("rate h = {h} violates the shift condition")))
    }
}

/// Value iteration from `p_0 = 0`.
///
/// Stops once `‖F(p_k)‖∞ <= tol · max(1, ‖p_k‖∞)` and the distance to
/// the limit, estimated from the contraction ratio `ρ` of successive steps
/// as `‖Δ‖ ρ / (1 - ρ)`, is below the same bound; returns `p_{k+1}`.
/// Reports `Diverged` when `‖p_k‖∞` exceeds the cap after at least
/// [`GROWTH_RUN`] consecutive non-shrinking steps, `IterCap` otherwise.
/// The horizon field of `spec` is ignored.
pub fn value_iteration(spec: &ProblemSpec, opts: &ViOptions) -> Result<ValueVector> {
    require_valid(spec)?;
    let h = opts.h.unwrap_or_else(|| default_rate(spec));
    check_rate(spec, h)?;
    let n = spec.n();
    let rhs = BellmanRhs::new(spec);
    let mut sc = rhs.scratch();
    let mut p = vec![0.0; n];
    let mut f = vec![0.0; n];
    let mut trace = opts.trace.then(Vec::new);
    let mut last_step = 0.0;
    let mut growth = 0usize;
    let mut status = ViStatus::IterCap;
    let mut k = 0;
    while k < opts.max_iter {
        rhs.eval(&p, &mut f, &mut sc);
        let res = inf_norm(&f);
        let p_norm = inf_norm(&p);
        let step = res / h;
        for i in 0..n {
            p[i] += f[i] / h;
        }
        k += 1;
        if let Some(t) = trace.as_mut() {
            t.push(TraceRow {
                k,
                p_norm: inf_norm(&p),
                step_norm: step,
            });
        }
        let bound = opts.tol * p_norm.max(1.0);
        if res <= bound {
            let ratio = if last_step > 0.0 { step / last_step } else { 0.0 };
            let settled = step <= ROUNDING_STEPS * f64::EPSILON * p_norm.max(1.0)
                || (ratio < 1.0 && step * ratio / (1.0 - ratio) <= bound);
            if settled {
                status = ViStatus::Converged;
                break;
            }
        }
        growth = if step >= last_step * (1.0 - 1e-12) { growth + 1 } else { 0 };
        last_step = step;
        let big = inf_norm(&p);
        if !big.is_finite() || (big > opts.divergence_cap && growth >= GROWTH_RUN) {
            status = ViStatus::Diverged;
            break;
        }
    }
    let residual = bellman_residual(spec, &p)?;
    Ok(ValueVector {
        p,
        residual,
        iterations: k,
        h,
        status,
        trace,
    })
}

/// `‖s + A'p - E'|r + B'p| + G'|H'p - δ|‖∞`.
pub fn bellman_residual(spec: &ProblemSpec, p: &[f64]) -> Result<f64> {
    if p.len() != spec.n() {
        return Err(Error::DimensionMismatch(format!("p has length {}, expected {}", p.len(), spec.n())));
    }
    let rhs = BellmanRhs::new(spec);
    let mut out = vec![0.0; spec.n()];
    rhs.eval(p, &mut out, &mut rhs.scratch());
    Ok(inf_norm(&out))
}

/// `γ >= F'p` elementwise within `tol_sol`.
pub fn check_gamma_infinite(spec: &ProblemSpec, p: &[f64]) -> Result<GammaCheck> {
    gamma_check(spec, p)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StaticGain {
    pub sigma: Vec<i8>,
    pub ties: Vec<bool>,
    #[serde(with = "crate::linalg::row_major")]
    pub k: DMatrix<f64>,
}

/// `σ_i = sign(r_i + p'B_i)`, ties resolved to `+1`; `K = diag(σ) E`.
pub fn extract_static_gain(spec: &ProblemSpec, p: &[f64]) -> StaticGain {
    let (sigma, ties) = signs_with_ties(&control_arguments(spec, p), tie_tolerance(spec, p));
    let k = signed_rows(spec.e(), &sigma);
    StaticGain { sigma, ties, k }
}

/// `‖p(h1) - p(h2)‖∞` for two discretization rates.
pub fn h_invariance_check(spec: &ProblemSpec, h1: f64, h2: f64) -> Result<f64> {
    let a = value_iteration(spec, &ViOptions::with_rate(h1))?;
    let b = value_iteration(spec, &ViOptions::with_rate(h2))?;
    for (h, v) in [(h1, &a), (h2, &b)] {
        if !v.converged() {
            return Err(Error::SolveFailed(format!("value iteration at h = {h} ended {:?}", v.status)));
        }
    }
    Ok(a.p.iter().zip(&b.p).fold(0.0, |m, (x, y)| m.max((x - y).abs())))
}
