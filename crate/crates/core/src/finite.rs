//! Finite-horizon value function: the HJB ODE
//! `-ṗ = s + A'p - E'|r + B'p| + G'|-δ + H'p|`, `p(T) = 0`.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export::{numbered, write_table};
use crate::linalg::{control_arguments, signed_rows, signs_with_ties, tie_tolerance, BellmanRhs};
use crate::problem::{require_valid, Horizon, ProblemSpec};
use crate::tol;

/// `max(10⁴, ⌈1000 T⌉)`.
pub fn default_steps(horizon: f64) -> usize {
    ((1000.0 * horizon).ceil() as usize).max(10_000)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValueTrajectory {
    /// Forward grid `0 = t_0 < … < t_N = T`.
    pub grid: Vec<f64>,
    /// `p(t_k)`; the last entry is exactly zero.
    pub p: Vec<Vec<f64>>,
    pub step: f64,
}

impl ValueTrajectory {
    pub fn horizon(&self) -> f64 {
        *self.grid.last().expect("grid is never empty")
    }

    pub fn p0(&self) -> &[f64] {
        &self.p[0]
    }

    /// Grid index holding the value in effect at time `t` (clamped).
    pub fn index_at(&self, t: f64) -> usize {
        let k = (t / self.step).floor();
        if k <= 0.0 {
            0
        } else {
            (k as usize).min(self.grid.len() - 1)
        }
    }

    /// `(t, p(t)'x0)` along the grid.
    pub fn cost_curve(&self, x0: &[f64]) -> Vec<(f64, f64)> {
        self.grid
            .iter()
            .zip(&self.p)
            .map(|(&t, p)| (t, p.iter().zip(x0).map(|(a, b)| a * b).sum()))
            .collect()
    }

    /// CSV with header `t,p_1,…,p_n`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let n = self.p[0].len();
        let header = [vec!["t".to_string()], numbered("p", n)].concat();
        let rows = self.grid.iter().zip(&self.p).map(|(&t, p)| {
            let mut row = Vec::with_capacity(n + 1);
            row.push(t);
            row.extend_from_slice(p);
            row
        });
        write_table(w, &header, rows)
    }
}

/// Integrates the HJB ODE backward from `p(T) = 0` with classical RK4 at
/// step `T / steps`.
pub fn solve_hjb_ode(spec: &ProblemSpec, steps: usize) -> Result<ValueTrajectory> {
    require_valid(spec)?;
    let Horizon::Finite(horizon) = spec.horizon() else {
        return Err(Error::InvalidArgument("finite-horizon solve needs a finite horizon".into()));
    };
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!("horizon must be positive, got {horizon}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    let n = spec.n();
    let h = horizon / steps as f64;
    let rhs = BellmanRhs::new(spec);
    let mut sc = rhs.scratch();
    let mut k1 = vec![0.0; n];
    let mut k2 = vec![0.0; n];
    let mut k3 = vec![0.0; n];
    let mut k4 = vec![0.0; n];
    let mut tmp = vec![0.0; n];

    // Integrated in time-to-go τ = T - t: dp/dτ = F(p), p(0) = 0.
    let mut backward = Vec::with_capacity(steps + 1);
    let mut p = vec![0.0; n];
    backward.push(p.clone());
    for k in 0..steps {
        rhs.eval(&p, &mut k1, &mut sc);
        for i in 0..n {
            tmp[i] = p[i] + 0.5 * h * k1[i];
        }
        rhs.eval(&tmp, &mut k2, &mut sc);
        for i in 0..n {
            tmp[i] = p[i] + 0.5 * h * k2[i];
        }
        rhs.eval(&tmp, &mut k3, &mut sc);
        for i in 0..n {
            tmp[i] = p[i] + h * k3[i];
        }
        rhs.eval(&tmp, &mut k4, &mut sc);
        for i in 0..n {
            p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteState {
                t: horizon - (k + 1) as f64 * h,
            });
        }
        backward.push(p.clone());
    }
    backward.reverse();
    let mut grid: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    grid[steps] = horizon;
    Ok(ValueTrajectory { grid, p: backward, step: h })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaCheck {
    pub admissible: bool,
    /// `γ - F'p`.
    pub margin: Vec<f64>,
}

pub(crate) fn gamma_check(spec: &ProblemSpec, p: &[f64]) -> Result<GammaCheck> {
    if p.len() != spec.n() {
        return Err(Error::DimensionMismatch(format!("p has length {}, expected {}", p.len(), spec.n())));
    }
    let threshold = spec.f().transpose() * DVector::from_column_slice(p);
    let margin: Vec<f64> = spec.gamma().iter().zip(threshold.iter()).map(|(g, t)| g - t).collect();
    Ok(GammaCheck {
        admissible: margin.iter().all(|&m| m >= -tol::SOL),
        margin,
    })
}

/// `γ >= F'p(0)` elementwise within `tol_sol`.
pub fn check_gamma_finite(spec: &ProblemSpec, traj: &ValueTrajectory) -> Result<GammaCheck> {
    gamma_check(spec, traj.p0())
}

/// `p(0)'x0`.
pub fn value_at(traj: &ValueTrajectory, x0: &[f64]) -> Result<f64> {
    if x0.len() != traj.p0().len() {
        return Err(Error::DimensionMismatch(format!(
            "x0 has length {}, expected {}",
            x0.len(),
            traj.p0().len()
        )));
    }
    Ok(traj.p0().iter().zip(x0).map(|(a, b)| a * b).sum())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GainSchedule {
    pub grid: Vec<f64>,
    /// `σ(t_k) ∈ {-1, +1}^m`.
    pub sigma: Vec<Vec<i8>>,
    pub ties: Vec<Vec<bool>>,
    #[serde(with = "crate::linalg::row_major")]
    e: DMatrix<f64>,
}

impl GainSchedule {
    /// `K(t_k) = diag(σ(t_k)) E`.
    pub fn gain(&self, k: usize) -> DMatrix<f64> {
        signed_rows(&self.e, &self.sigma[k])
    }

    /// Grid indices where some channel changes sign.
    pub fn switches(&self) -> Vec<usize> {
        (1..self.sigma.len()).filter(|&k| self.sigma[k] != self.sigma[k - 1]).collect()
    }

    /// CSV with header `t,σ_1,…,σ_m,tie_1,…,tie_m`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let m = self.e.nrows();
        let header = [vec!["t".to_string()], numbered("sigma", m), numbered("tie", m)].concat();
        let rows = (0..self.grid.len()).map(|k| {
            let mut row = Vec::with_capacity(2 * m + 1);
            row.push(self.grid[k]);
            row.extend(self.sigma[k].iter().map(|&s| s as f64));
            row.extend(self.ties[k].iter().map(|&t| if t { 1.0 } else { 0.0 }));
            row
        });
        write_table(w, &header, rows)
    }
}

/// `σ_i(t) = sign(r_i + p(t)'B_i)` with ties resolved to `+1`.
pub fn extract_gain_schedule(spec: &ProblemSpec, traj: &ValueTrajectory) -> GainSchedule {
    let (sigma, ties) = traj
        .p
        .iter()
        .map(|p| signs_with_ties(&control_arguments(spec, p), tie_tolerance(spec, p)))
        .unzip();
    GainSchedule {
        grid: traj.grid.clone(),
        sigma,
        ties,
        e: spec.e().clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::examples::{scalar_example, tie_example};

    #[test]
    fn scalar_closed_form() {
        let t = 5.0;
        let spec = scalar_example(Horizon::Finite(t));
        let traj = solve_hjb_ode(&spec, 5000).unwrap();
        for (tk, p) in traj.grid.iter().zip(&traj.p) {
            let exact = 1.0 - (-2.0 * (t - tk)).exp();
            assert!((p[0] - exact).abs() < 1e-10, "t={tk}");
        }
        assert_eq!(traj.p.last().unwrap(), &vec![0.0]);
        assert_eq!(traj.horizon(), t);
    }

    #[test]
    fn zero_cost_gives_zero_value() {
        let base = tie_example(Horizon::Finite(3.0));
        let spec = ProblemSpec::builder(
            base.a().clone(),
            base.b().clone(),
            base.e().clone(),
            DVector::zeros(3),
            DVector::zeros(2),
        )
        .horizon(Horizon::Finite(3.0))
        .build()
        .unwrap();
        let traj = solve_hjb_ode(&spec, 100).unwrap();
        assert!(traj.p.iter().flatten().all(|&x| x == 0.0));
    }

    #[test]
    fn tie_example_value_and_schedule() {
        let spec = tie_example(Horizon::Finite(10.0));
        let traj = solve_hjb_ode(&spec, default_steps(10.0)).unwrap();
        let v = value_at(&traj, &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - 3.0 * (1.0 - (-10.0_f64).exp())).abs() < 1e-6);
        let sched = extract_gain_schedule(&spec, &traj);
        let last = sched.grid.len() - 1;
        for k in 0..last {
            assert!(sched.ties[k][0], "channel 1 tied at k={k}");
            assert_eq!(sched.sigma[k], vec![1, 1]);
        }
        assert!(!sched.ties[0][1]);
        assert_eq!(sched.ties[last], vec![true, true]);
        assert_eq!(sched.gain(0), spec.e().clone());
        assert!(sched.switches().is_empty());
    }

    #[test]
    fn gamma_margin_and_empty_channel() {
        let spec = scalar_example(Horizon::Finite(20.0));
        let traj = solve_hjb_ode(&spec, 20_000).unwrap();
        let chk = check_gamma_finite(&spec, &traj).unwrap();
        assert!(chk.admissible && chk.margin.is_empty());

        let spec = ProblemSpec::builder(
            spec.a().clone(),
            spec.b().clone(),
            spec.e().clone(),
            spec.s().clone(),
            spec.r().clone(),
        )
        .unconstrained_disturbance(DMatrix::from_element(1, 1, 1.0), DVector::from_element(1, 2.0))
        .horizon(Horizon::Finite(20.0))
        .build()
        .unwrap();
        let chk = check_gamma_finite(&spec, &traj).unwrap();
        let expected = 2.0 - (1.0 - (-40.0_f64).exp());
        assert!((chk.margin[0] - expected).abs() < 1e-9);
    }

    #[test]
    fn rejects_infinite_horizon_and_zero_steps() {
        let spec = scalar_example(Horizon::Infinite);
        assert!(matches!(solve_hjb_ode(&spec, 10), Err(Error::InvalidArgument(_))));
        let spec = scalar_example(Horizon::Finite(1.0));
        assert!(matches!(solve_hjb_ode(&spec, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn default_step_rule() {
        assert_eq!(default_steps(1.0), 10_000);
        assert_eq!(default_steps(24.0), 24_000);
        assert_eq!(default_steps(10.0005), 10_001);
    }

    #[test]
    fn csv_headers() {
        let spec = tie_example(Horizon::Finite(1.0));
        let traj = solve_hjb_ode(&spec, 10).unwrap();
        let mut buf = Vec::new();
        traj.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("t,p_1,p_2,p_3\n"));
        assert_eq!(text.lines().count(), 12);
        let mut buf = Vec::new();
        extract_gain_schedule(&spec, &traj).write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("t,sigma_1,sigma_2,tie_1,tie_2\n"));
    }
}
