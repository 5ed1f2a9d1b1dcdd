//! Worst-case disturbance synthesis and closed-loop simulation.

use std::io::Write;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::{numbered, write_table};
use crate::finite::{GainSchedule, ValueTrajectory};
use crate::linalg::{inf_norm, matrix_inf_norm, signs_with_ties};
use crate::problem::ProblemSpec;
use crate::tol;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WorstCase {
    /// `v = diag(σ_v) G x`.
    pub sigma_v: Vec<i8>,
    pub ties: Vec<bool>,
    /// `γ - F'p`; `w = 0` is optimal when every entry is `>= -tol_sol`.
    pub w_margin: Vec<f64>,
    pub w_zero: bool,
}

/// Maximizing disturbance for a value `p`: `σ_v = sign(H'p - δ)` with
/// ties resolved to `+1`, and `w = 0` when `γ >= F'p`.
pub fn worst_case_policies(spec: &ProblemSpec, p: &[f64]) -> Result<WorstCase> {
    if p.len() != spec.n() {
        return Err(Error::DimensionMismatch(format!("p has length {}, expected {}", p.len(), spec.n())));
    }
    let (h, f) = (spec.h(), spec.f());
    let args: Vec<f64> = (0..spec.c())
        .map(|j| (0..spec.n()).map(|i| h[(i, j)] * p[i]).sum::<f64>() - spec.delta()[j])
        .collect();
    let delta = spec.delta().iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    let tie = tol::TIE_SCALE * (1.0 + delta + inf_norm(p) * matrix_inf_norm(h));
    let (sigma_v, ties) = signs_with_ties(&args, tie);
    let w_margin: Vec<f64> = (0..spec.l())
        .map(|j| spec.gamma()[j] - (0..spec.n()).map(|i| f[(i, j)] * p[i]).sum::<f64>())
        .collect();
    Ok(WorstCase {
        w_zero: w_margin.iter().all(|&m| m >= -tol::SOL),
        sigma_v,
        ties,
        w_margin,
    })
}

/// Worst-case signs along a finite-horizon value trajectory.
pub fn worst_case_schedule(spec: &ProblemSpec, traj: &ValueTrajectory) -> Result<Vec<Vec<i8>>> {
    traj.p
        .iter()
        .map(|p| worst_case_policies(spec, p).map(|w| w.sigma_v))
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub enum Feedback<'a> {
    Static(&'a DMatrix<f64>),
    Scheduled(&'a GainSchedule),
}

#[derive(Debug, Clone, Copy)]
pub enum VPolicy<'a> {
    None,
    Fixed(&'a [i8]),
    /// Signs on the schedule grid of the matching [`Feedback::Scheduled`].
    Scheduled(&'a [Vec<i8>]),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<Vec<f64>>,
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub w: Vec<Vec<f64>>,
    /// `∫ s'x + r'u - δ'v dt`.
    pub cost: Vec<f64>,
}

impl Trajectory {
    pub fn final_cost(&self) -> f64 {
        *self.cost.last().expect("trajectory has an initial point")
    }

    /// CSV with header `t,x_1,…,x_n,J`, keeping every `every`-th sample
    /// and the last one.
    pub fn write_csv<W: Write>(&self, w: W, every: usize) -> Result<()> {
        let n = self.x[0].len();
        let header = [vec!["t".to_string()], numbered("x", n), vec!["J".to_string()]].concat();
        let every = every.max(1);
        let last = self.t.len() - 1;
        let rows = (0..self.t.len()).filter(|&k| k % every == 0 || k == last).map(|k| {
            let mut row = Vec::with_capacity(n + 2);
            row.push(self.t[k]);
            row.extend_from_slice(&self.x[k]);
            row.push(self.cost[k]);
            row
        });
        write_table(w, &header, rows)
    }
}

/// Closed loop `ẋ = (A - BK + H diag(σ_v) G) x` from `spec.x0()` by RK4,
/// with the running cost integrated alongside. Gains and signs are held
/// over each step at their values from the start of the step.
pub fn simulate(spec: &ProblemSpec, feedback: Feedback, v: VPolicy, t_sim: f64, steps: usize) -> Result<Trajectory> {
    if !(t_sim > 0.0 && t_sim.is_finite()) || steps == 0 {
        return Err(Error::InvalidArgument(format!("need T > 0 and steps >= 1, got T = {t_sim}, steps = {steps}")));
    }
    let (n, c) = (spec.n(), spec.c());
    let check_k = |k: &DMatrix<f64>| spec.check_gain_bounds(k);
    match feedback {
        Feedback::Static(k) => check_k(k)?,
        Feedback::Scheduled(s) => {
            if s.sigma.first().is_some_and(|sig| sig.len() != spec.m()) {
                return Err(Error::DimensionMismatch("gain schedule has the wrong channel count".into()));
            }
        }
    }
    let sign_len_ok = match v {
        VPolicy::None => true,
        VPolicy::Fixed(s) => s.len() == c,
        VPolicy::Scheduled(s) => s.iter().all(|x| x.len() == c),
    };
    if !sign_len_ok {
        return Err(Error::DimensionMismatch(format!("disturbance signs must have length {c}")));
    }

    let dt = t_sim / steps as f64;
    let zero_signs = vec![0i8; c];
    let sched_index = |t: f64| match feedback {
        Feedback::Scheduled(s) => {
            let step = if s.grid.len() > 1 { s.grid[1] - s.grid[0] } else { 1.0 };
            ((t / step).floor().max(0.0) as usize).min(s.grid.len() - 1)
        }
        Feedback::Static(_) => 0,
    };
    let gain_at = |t: f64| match feedback {
        Feedback::Static(k) => k.clone(),
        Feedback::Scheduled(s) => s.gain(sched_index(t)),
    };
    let signs_at = |t: f64| -> Vec<i8> {
        match v {
            VPolicy::None => zero_signs.clone(),
            VPolicy::Fixed(s) => s.to_vec(),
            VPolicy::Scheduled(s) => s[sched_index(t).min(s.len() - 1)].clone(),
        }
    };

    let x0: Vec<f64> = spec.x0().iter().copied().collect();
    let mut out = Trajectory {
        t: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        u: Vec::with_capacity(steps + 1),
        v: Vec::with_capacity(steps + 1),
        w: Vec::with_capacity(steps + 1),
        cost: Vec::with_capacity(steps + 1),
    };
    let mut x = x0;
    let mut j = 0.0;
    let mut cached: Option<(DMatrix<f64>, Vec<i8>, DMatrix<f64>, Vec<f64>, DMatrix<f64>)> = None;
    for k in 0..=steps {
        let t = k as f64 * dt;
        let kmat = gain_at(t);
        let sigma = signs_at(t);
        let stale = cached.as_ref().is_none_or(|(kc, sc, ..)| *kc != kmat || *sc != sigma);
        if stale {
            let mut dg = spec.g().clone();
            for (i, &sg) in sigma.iter().enumerate() {
                dg.row_mut(i).scale_mut(sg as f64);
            }
            let closed = spec.a() - spec.b() * &kmat + spec.h() * &dg;
            // Running cost row: s' - r'K - δ' diag(σ) G.
            let row = spec.s().transpose() - spec.r().transpose() * &kmat - spec.delta().transpose() * &dg;
            let row: Vec<f64> = row.iter().copied().collect();
            cached = Some((kmat, sigma, closed, row, dg));
        }
        let (kmat, _, closed, row, dg) = cached.as_ref().expect("cache filled above");
        let xv = nalgebra::DVector::from_column_slice(&x);
        out.t.push(t);
        out.u.push((-(kmat * &xv)).iter().copied().collect());
        out.v.push((dg * &xv).iter().copied().collect());
        out.w.push(vec![0.0; spec.l()]);
        out.x.push(x.clone());
        out.cost.push(j);
        if k == steps {
            break;
        }
        // RK4 on the augmented linear system (x, J).
        let deriv = |x: &[f64]| -> (Vec<f64>, f64) {
            let xv = nalgebra::DVector::from_column_slice(x);
            let dx: Vec<f64> = (closed * &xv).iter().copied().collect();
            let dj: f64 = row.iter().zip(x).map(|(a, b)| a * b).sum();
            (dx, dj)
        };
        let (k1, j1) = deriv(&x);
        let x2: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * dt * k1[i]).collect();
        let (k2, j2) = deriv(&x2);
        let x3: Vec<f64> = (0..n).map(|i| x[i] + 0.5 * dt * k2[i]).collect();
        let (k3, j3) = deriv(&x3);
        let x4: Vec<f64> = (0..n).map(|i| x[i] + dt * k3[i]).collect();
        let (k4, j4) = deriv(&x4);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        j += dt / 6.0 * (j1 + 2.0 * j2 + 2.0 * j3 + j4);
        if x.iter().any(|v| !v.is_finite()) || !j.is_finite() {
            return Err(Error::NonFiniteState { t: t + dt });
        }
    }
    Ok(out)
}
