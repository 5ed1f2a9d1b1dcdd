//! Linear-programming route for the linear regulator (`H = G = 0`).
//!
//! Primal: `max 𝟙'p` over `p, ζ >= 0` with `A'p >= E'ζ - s` and
//! `-ζ <= r + B'p <= ζ`. Dual: `min s'x + r'u` over `x >= 0`, `u` free,
//! with `Ax + Bu <= -𝟙` and `|u| <= Ex`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::infinite::bellman_residual;
use crate::kernel::spectral_abscissa;
use crate::linalg::{control_arguments, signed_rows, signs_with_ties, tie_tolerance};
use crate::lp::{solve_lp, LpModel, LpSolution, LpStatus, Objective, RowSense};
use crate::problem::{require_valid, ProblemSpec};
use crate::tol;

/// Ray entries below this magnitude are not reported as driven.
const RAY_TOL: f64 = 1e-9;

fn require_regulator(spec: &ProblemSpec) -> Result<()> {
    require_valid(spec)?;
    if !spec.has_no_bounded_disturbance() {
        return Err(Error::ModelMismatch(
            "the LP route covers only problems without the bounded disturbance (H = G = 0)".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrimalLr {
    pub status: LpStatus,
    pub p: Vec<f64>,
    pub zeta: Vec<f64>,
    pub objective: f64,
    /// Objective of the simplex dual certificate.
    pub dual_bound: f64,
    /// Indices of `p` moved by the improving ray when unbounded.
    pub unbounded_entries: Vec<usize>,
    pub ray: Option<Vec<f64>>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualLr {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

pub fn primal_model(spec: &ProblemSpec) -> LpModel {
    let (n, m) = (spec.n(), spec.m());
    let (a, b, e) = (spec.a(), spec.b(), spec.e());
    let mut cost = vec![1.0; n];
    cost.extend(std::iter::repeat_n(0.0, m));
    let mut lp = LpModel::new(Objective::Maximize, cost);
    for i in 0..n {
        let mut row: Vec<f64> = (0..n).map(|k| a[(k, i)]).collect();
        row.extend((0..m).map(|j| -e[(j, i)]));
        lp.add_row(row, RowSense::Ge, -spec.s()[i]);
    }
    for j in 0..m {
        for sign in [1.0, -1.0] {
            let mut row: Vec<f64> = (0..n).map(|k| sign * b[(k, j)]).collect();
            row.extend((0..m).map(|q| if q == j { -1.0 } else { 0.0 }));
            lp.add_row(row, RowSense::Le, -sign * spec.r()[j]);
        }
    }
    lp
}

pub fn dual_model(spec: &ProblemSpec) -> LpModel {
    let (n, m) = (spec.n(), spec.m());
    let (a, b, e) = (spec.a(), spec.b(), spec.e());
    let mut cost: Vec<f64> = spec.s().iter().copied().collect();
    cost.extend(spec.r().iter().copied());
    let mut lp = LpModel::new(Objective::Minimize, cost);
    for j in 0..m {
        lp.set_bounds(n + j, f64::NEG_INFINITY, f64::INFINITY);
    }
    for i in 0..n {
        let mut row: Vec<f64> = a.row(i).iter().copied().collect();
        row.extend(b.row(i).iter().copied());
        lp.add_row(row, RowSense::Le, -1.0);
    }
    for j in 0..m {
        for sign in [1.0, -1.0] {
            let mut row: Vec<f64> = (0..n).map(|k| -e[(j, k)]).collect();
            row.extend((0..m).map(|q| if q == j { sign } else { 0.0 }));
            lp.add_row(row, RowSense::Le, 0.0);
        }
    }
    lp
}

fn primal_from(spec: &ProblemSpec, sol: LpSolution) -> PrimalLr {
    let n = spec.n();
    let unbounded_entries = sol
        .ray
        .as_ref()
        .map(|ray| (0..n).filter(|&i| ray[i].abs() > RAY_TOL).collect())
        .unwrap_or_default();
    PrimalLr {
        status: sol.status,
        p: sol.x[..n].to_vec(),
        zeta: sol.x[n..].to_vec(),
        objective: sol.objective,
        dual_bound: sol.dual_objective,
        unbounded_entries,
        ray: sol.ray,
        iterations: sol.iterations,
    }
}

pub fn solve_primal_lr(spec: &ProblemSpec) -> Result<PrimalLr> {
    require_regulator(spec)?;
    let sol = solve_lp(&primal_model(spec))?;
    Ok(primal_from(spec, sol))
}

pub fn solve_dual_lr(spec: &ProblemSpec) -> Result<DualLr> {
    require_regulator(spec)?;
    let n = spec.n();
    let sol = solve_lp(&dual_model(spec))?;
    Ok(DualLr {
        status: sol.status,
        x: sol.x[..n].to_vec(),
        u: sol.x[n..].to_vec(),
        objective: sol.objective,
        iterations: sol.iterations,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ControllerCandidate {
    pub sigma: Vec<i8>,
    #[serde(with = "crate::linalg::row_major")]
    pub k: DMatrix<f64>,
    pub hurwitz: bool,
    pub abscissa: f64,
}

fn candidate(spec: &ProblemSpec, sigma: Vec<i8>) -> Result<ControllerCandidate> {
    let k = signed_rows(spec.e(), &sigma);
    let abscissa = spectral_abscissa(&(spec.a() - spec.b() * &k))?;
    Ok(ControllerCandidate {
        sigma,
        k,
        hurwitz: abscissa < -tol::EIG,
        abscissa,
    })
}

/// Bang-bang controllers consistent with `p`.
///
/// Channels with a clear switching sign are fixed. Tied channels follow the
/// dual optimizer when `dual_u` is given (`u = -Kx`, so `σ_i = -sign(u_i)`,
/// with `+1` when `u_i` vanishes too); otherwise every sign combination is
/// returned, all-`+1` first.
pub fn extract_lp_controller(
    spec: &ProblemSpec,
    p: &[f64],
    dual_u: Option<&[f64]>,
    exec: Execution,
) -> Result<Vec<ControllerCandidate>> {
    if p.len() != spec.n() {
        return Err(Error::DimensionMismatch(format!("p has length {}, expected {}", p.len(), spec.n())));
    }
    let (sigma, ties) = signs_with_ties(&control_arguments(spec, p), tie_tolerance(spec, p));
    let tied: Vec<usize> = (0..ties.len()).filter(|&i| ties[i]).collect();
    if let Some(u) = dual_u {
        let mut s = sigma;
        for &i in &tied {
            s[i] = if u[i] > tol::LP { -1 } else { 1 };
        }
        return Ok(vec![candidate(spec, s)?]);
    }
    if tied.len() >= usize::BITS as usize || 1usize << tied.len() > tol::MAX_TIE_COMBINATIONS {
        return Err(Error::TieExplosion { ties: tied.len() });
    }
    let patterns: Vec<Vec<i8>> = (0..1usize << tied.len())
        .map(|code| {
            let mut s = sigma.clone();
            for (bit, &i) in tied.iter().enumerate() {
                if code >> bit & 1 == 1 {
                    s[i] = -1;
                }
            }
            s
        })
        .collect();
    exec::map(exec, &patterns, |s| candidate(spec, s.clone()))
        .into_iter()
        .collect()
}

/// Sign grid `D ∈ {-1, 0, 1}^m` enumerated in base-3 order.
pub fn sign_grid(m: usize) -> Vec<Vec<i8>> {
    let total = 3usize.pow(m as u32);
    (0..total)
        .map(|mut code| {
            (0..m)
                .map(|_| {
                    let d = (code % 3) as i8 - 1;
                    code /= 3;
                    d
                })
                .collect()
        })
        .collect()
}

/// First `D` on the sign grid with `A - BDE` Hurwitz, if any.
pub fn hurwitz_on_grid(spec: &ProblemSpec, exec: Execution) -> Result<Option<Vec<i8>>> {
    if spec.m() > 12 {
        return Err(Error::InvalidArgument(format!("sign grid over {} channels is too large", spec.m())));
    }
    let grid = sign_grid(spec.m());
    let flags = exec::map(exec, &grid, |d| {
        let k = signed_rows(spec.e(), d);
        spectral_abscissa(&(spec.a() - spec.b() * k)).map(|l| l < -tol::EIG)
    });
    for (d, flag) in grid.into_iter().zip(flags) {
        if flag? {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub primal_bounded: bool,
    pub dual_feasible: bool,
    pub hurwitz_exists: bool,
    pub witness: Option<Vec<i8>>,
    pub primal_status: LpStatus,
    pub dual_status: LpStatus,
}

impl Lemma1Report {
    pub fn agree(&self) -> bool {
        self.primal_bounded == self.dual_feasible && self.dual_feasible == self.hurwitz_exists
    }
}

/// Evaluates primal boundedness, dual feasibility and the sign-grid Hurwitz
/// search independently.
pub fn lemma1_equivalence_check(spec: &ProblemSpec, exec: Execution) -> Result<Lemma1Report> {
    let primal = solve_primal_lr(spec)?;
    let dual = solve_dual_lr(spec)?;
    let witness = hurwitz_on_grid(spec, exec)?;
    Ok(Lemma1Report {
        primal_bounded: primal.status == LpStatus::Optimal,
        dual_feasible: dual.status != LpStatus::Infeasible,
        hurwitz_exists: witness.is_some(),
        witness,
        primal_status: primal.status,
        dual_status: dual.status,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LrLpOutcome {
    pub primal: PrimalLr,
    pub dual: DualLr,
    /// Bellman residual of the primal `p` when optimal.
    pub bellman_residual: Option<f64>,
    pub candidates: Vec<ControllerCandidate>,
}

/// Both LPs, the residual of the primal optimizer and its controllers.
/// Tied channels are enumerated when the enumeration fits, otherwise the
/// dual optimizer picks their signs.
pub fn solve_lr(spec: &ProblemSpec, exec: Execution) -> Result<LrLpOutcome> {
    let primal = solve_primal_lr(spec)?;
    let dual = solve_dual_lr(spec)?;
    let (bellman, candidates) = if primal.status == LpStatus::Optimal {
        let res = bellman_residual(spec, &primal.p)?;
        let cands = match extract_lp_controller(spec, &primal.p, None, exec) {
            Err(Error::TieExplosion { .. }) if dual.status == LpStatus::Optimal => {
                extract_lp_controller(spec, &primal.p, Some(&dual.u), exec)?
            }
            other => other?,
        };
        (Some(res), cands)
    } else {
        (None, Vec::new())
    };
    Ok(LrLpOutcome {
        primal,
        dual,
        bellman_residual: bellman,
        candidates,
    })
}
