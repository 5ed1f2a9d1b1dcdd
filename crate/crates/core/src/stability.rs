//! Detectability and closed-loop stabilization certificates.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::infinite::{bellman_residual, value_iteration, ViOptions};
use crate::kernel::{is_hurwitz, nonneg_eigenpairs, EigenPair};
use crate::linalg::{control_arguments, inf_norm, tie_tolerance};
use crate::problem::ProblemSpec;
use crate::tol;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Detectability {
    pub detectable: bool,
    /// Some witness has `|λ| <= tol_eig`.
    pub marginal: bool,
    /// Nonnegative eigenpairs with `λ >= 0` invisible to the output.
    pub witnesses: Vec<EigenPair>,
}

/// `(C, M)` is detectable iff `C v > tol_eig` for every nonnegative
/// eigenvector `v` of `M` with eigenvalue `λ >= 0`.
pub fn detectability_check(c_row: &[f64], m: &DMatrix<f64>) -> Result<Detectability> {
    let c = DMatrix::from_row_slice(1, c_row.len(), c_row);
    detectability_check_rows(&c, m)
}

/// Multi-row output: a nonnegative eigenvector is seen when some entry of
/// `Cv` exceeds `tol_eig`.
pub fn detectability_check_rows(c: &DMatrix<f64>, m: &DMatrix<f64>) -> Result<Detectability> {
    if c.ncols() != m.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "output has {} columns, matrix has {} rows",
            c.ncols(),
            m.nrows()
        )));
    }
    if let Some((idx, &value)) = c.iter().enumerate().find(|(_, &x)| x < -tol::SOL) {
        return Err(Error::NegativeCostRow { index: idx, value });
    }
    let c = c.map(|x| x.max(0.0));
    let pairs = nonneg_eigenpairs(m, 0.0)?;
    let witnesses: Vec<EigenPair> = pairs
        .into_iter()
        .filter(|pair| {
            let seen = &c * DVector::from_column_slice(&pair.v);
            seen.iter().all(|&y| y <= tol::EIG)
        })
        .collect();
    Ok(Detectability {
        detectable: witnesses.is_empty(),
        marginal: witnesses.iter().any(|w| w.lambda.abs() <= tol::EIG),
        witnesses,
    })
}

/// `s - E'|r| > 0` strictly, which makes every admissible closed loop
/// detectable.
pub fn strict_cost_margin(spec: &ProblemSpec) -> bool {
    let margin = spec.s() - spec.e().transpose() * spec.r().map(f64::abs);
    margin.iter().all(|&x| x > tol::EIG)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClosedLoopCertificate {
    pub hurwitz: bool,
    pub abscissa: f64,
    pub detectable: bool,
    pub marginal: bool,
    pub witnesses: Vec<EigenPair>,
    /// `s - K'r`.
    pub cost_row: Vec<f64>,
    /// `v >= 1` with `(A - BK) v <= -1` when Hurwitz.
    pub lyapunov: Option<Vec<f64>>,
    /// `K` is optimal for a solution of the Bellman equation.
    pub bellman_solved: bool,
}

/// Certificate for `u = -Kx` using the value from value iteration.
pub fn closed_loop_certificate(spec: &ProblemSpec, k: &DMatrix<f64>) -> Result<ClosedLoopCertificate> {
    let vi = value_iteration(spec, &ViOptions::default())?;
    let p = vi.converged().then_some(vi.p);
    closed_loop_certificate_with(spec, k, p.as_deref())
}

/// Certificate for `u = -Kx` given a candidate Bellman solution `p`.
///
/// Detectable plus Bellman-optimal but not Hurwitz is reported as
/// [`Error::Contradiction`].
pub fn closed_loop_certificate_with(
    spec: &ProblemSpec,
    k: &DMatrix<f64>,
    p: Option<&[f64]>,
) -> Result<ClosedLoopCertificate> {
    spec.check_gain_bounds(k)?;
    let n = spec.n();
    let cost_row: Vec<f64> = (spec.s() - k.transpose() * spec.r()).iter().copied().collect();
    if let Some(i) = cost_row.iter().position(|&x| x < -tol::SOL) {
        return Err(Error::NegativeCostRow {
            index: i,
            value: cost_row[i],
        });
    }
    let cost_row: Vec<f64> = cost_row.into_iter().map(|x| x.max(0.0)).collect();
    let m = spec.a() - spec.b() * k;
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] < -tol::METZLER {
                return Err(Error::NonMetzlerClosedLoop {
                    row: i,
                    col: j,
                    value: m[(i, j)],
                });
            }
        }
    }
    let det = detectability_check(&cost_row, &m)?;
    let verdict = is_hurwitz(&m)?;
    let bellman_solved = match p {
        Some(p) => is_optimal_for(spec, k, p)?,
        None => false,
    };
    if bellman_solved && det.detectable && !verdict.hurwitz {
        return Err(Error::Contradiction(format!(
            "detectable Bellman-optimal controller with closed-loop abscissa {}",
            verdict.abscissa
        )));
    }
    Ok(ClosedLoopCertificate {
        hurwitz: verdict.hurwitz,
        abscissa: verdict.abscissa,
        detectable: det.detectable,
        marginal: det.marginal,
        witnesses: det.witnesses,
        cost_row,
        lyapunov: verdict.certificate,
        bellman_solved,
    })
}

/// `p` solves the Bellman equation and `K` attains its minimum: untied
/// rows equal `sign(r_i + p'B_i) E_i`; tied rows are free within `|K| <= E`.
fn is_optimal_for(spec: &ProblemSpec, k: &DMatrix<f64>, p: &[f64]) -> Result<bool> {
    let res = bellman_residual(spec, p)?;
    if res > tol::SOL * (1.0 + inf_norm(p)) {
        return Ok(false);
    }
    let args = control_arguments(spec, p);
    let tie = tie_tolerance(spec, p);
    for (i, &arg) in args.iter().enumerate() {
        if arg.abs() <= tie {
            continue;
        }
        let target = spec.e().row(i) * arg.signum();
        if (k.row(i) - target).amax() > tol::METZLER {
            return Ok(false);
        }
    }
    Ok(true)
}
