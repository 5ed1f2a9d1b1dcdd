//! Minimal l1-induced gain with respect to the unconstrained disturbance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::finite::{default_steps, solve_hjb_ode};
use crate::infinite::{value_iteration, ViOptions};
use crate::problem::{Horizon, ProblemSpec};
use crate::tol;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GainReport {
    /// `F'p(0)` (finite horizon) or `F'p` (infinite horizon), per channel.
    pub gamma_star: Vec<f64>,
    /// `max_i γ*_i`, or 0 without channels.
    pub scalar: f64,
    /// The current `γ` dominates `γ*`, so the minimax value is finite and
    /// equals the value without `w`.
    pub finite_value: bool,
    /// The gain reading holds only without the bounded disturbance.
    pub l1_interpretation: bool,
    pub p: Vec<f64>,
}

pub fn min_l1_gain(spec: &ProblemSpec) -> Result<GainReport> {
    min_l1_gain_with(spec, None)
}

/// As [`min_l1_gain`] with an explicit RK4 step count for finite horizons.
pub fn min_l1_gain_with(spec: &ProblemSpec, steps: Option<usize>) -> Result<GainReport> {
    let p = match spec.horizon() {
        Horizon::Finite(t) => solve_hjb_ode(spec, steps.unwrap_or_else(|| default_steps(t)))?.p0().to_vec(),
        Horizon::Infinite => {
            let vi = value_iteration(spec, &ViOptions::default())?;
            if !vi.converged() {
                return Err(Error::SolveFailed(format!(
                    "value iteration ended {:?} after {} iterations",
                    vi.status, vi.iterations
                )));
            }
            vi.p
        }
    };
    let f = spec.f();
    let gamma_star: Vec<f64> = (0..spec.l())
        .map(|j| (0..spec.n()).map(|i| f[(i, j)] * p[i]).sum())
        .collect();
    let scalar = gamma_star.iter().copied().fold(0.0, f64::max);
    let finite_value = spec.gamma().iter().zip(&gamma_star).all(|(g, s)| g - s >= -tol::SOL);
    Ok(GainReport {
        gamma_star,
        scalar,
        finite_value,
        l1_interpretation: spec.has_no_bounded_disturbance(),
        p,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::examples::scalar_example;
    use nalgebra::{DMatrix, DVector};

    fn with_rain(horizon: Horizon, f: f64, gamma: f64) -> ProblemSpec {
        let base = scalar_example(horizon);
        ProblemSpec::builder(
            base.a().clone(),
            base.b().clone(),
            base.e().clone(),
            base.s().clone(),
            base.r().clone(),
        )
        .unconstrained_disturbance(DMatrix::from_element(1, 1, f), DVector::from_element(1, gamma))
        .horizon(horizon)
        .build()
        .unwrap()
    }

    #[test]
    fn scalar_infinite_gain() {
        let g = min_l1_gain(&with_rain(Horizon::Infinite, 1.0, 2.0)).unwrap();
        assert!((g.gamma_star[0] - 1.0).abs() < 1e-9);
        assert!(g.finite_value && g.l1_interpretation);
        let g = min_l1_gain(&with_rain(Horizon::Infinite, 1.0, 0.5)).unwrap();
        assert!(!g.finite_value);
    }

    #[test]
    fn zero_input_matrix() {
        let g = min_l1_gain(&with_rain(Horizon::Infinite, 0.0, 0.0)).unwrap();
        assert_eq!(g.gamma_star, vec![0.0]);
        assert_eq!(g.scalar, 0.0);
    }

    #[test]
    fn grows_with_horizon() {
        let mut last = 0.0;
        for t in [0.5, 1.0, 2.0, 4.0] {
            let g = min_l1_gain_with(&with_rain(Horizon::Finite(t), 1.0, 2.0), Some(2000)).unwrap();
            let exact = 1.0 - (-2.0 * t).exp();
            assert!((g.gamma_star[0] - exact).abs() < 1e-9);
            assert!(g.gamma_star[0] >= last);
            last = g.gamma_star[0];
        }
    }
}
