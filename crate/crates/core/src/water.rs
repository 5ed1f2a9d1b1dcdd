//! Line-shaped water-flow networks: `n` sections draining downstream, one
//! controlled and one disturbed flow between each pair of neighbours.

use std::io::Write;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::export::write_table;
use crate::infinite::{value_iteration, ViOptions};
use crate::problem::{validate, Horizon, ProblemSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterParams {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub zeta_u: f64,
    pub zeta_v: f64,
    pub rho_s: f64,
    pub rho_u: f64,
    pub rho_v: f64,
    /// Adds `F = 𝟙` with bound `gamma`.
    pub rain: bool,
    pub gamma: f64,
    pub horizon: Horizon,
}

impl Default for WaterParams {
    fn default() -> Self {
        Self {
            n: 100,
            alpha: 3.0,
            beta: 10.0,
            zeta_u: 10.0,
            zeta_v: 3.0,
            rho_s: 1.0,
            rho_u: 0.0,
            rho_v: 1.0,
            rain: false,
            gamma: 0.0,
            horizon: Horizon::Infinite,
        }
    }
}

impl WaterParams {
    pub fn with_n(&self, n: usize) -> Self {
        Self { n, ..self.clone() }
    }

    /// Checks the parameter invariants.
    ///
    /// The last section pays `r_{n-1}` per unit of control capacity with no
    /// offsetting disturbance cost, so the cost hypothesis needs
    /// `ζ_u ρ_u = 0` on top of `ζ_u ρ_u <= ζ_v ρ_v`.
    pub fn check(&self) -> Result<()> {
        let fields = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("zeta_u", self.zeta_u),
            ("zeta_v", self.zeta_v),
            ("rho_s", self.rho_s),
            ("rho_u", self.rho_u),
            ("rho_v", self.rho_v),
            ("gamma", self.gamma),
        ];
        for (name, v) in fields {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvariantViolation(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if self.n < 2 {
            return Err(Error::InvariantViolation(format!("need at least 2 sections, got {}", self.n)));
        }
        if self.zeta_u <= 0.0 {
            return Err(Error::InvariantViolation("zeta_u must be > 0 so every control has authority".into()));
        }
        if self.beta < self.zeta_u {
            return Err(Error::InvariantViolation(format!(
                "beta = {} < zeta_u = {} breaks the Metzler structure",
                self.beta, self.zeta_u
            )));
        }
        if self.zeta_u * self.rho_u > self.zeta_v * self.rho_v {
            return Err(Error::InvariantViolation(format!(
                "zeta_u rho_u = {} exceeds zeta_v rho_v = {}",
                self.zeta_u * self.rho_u,
                self.zeta_v * self.rho_v
            )));
        }
        if self.zeta_u * self.rho_u > 0.0 {
            return Err(Error::InvariantViolation(format!(
                "cost margin of the last section is -zeta_u rho_u = {}",
                -self.zeta_u * self.rho_u
            )));
        }
        Ok(())
    }
}

/// Network matrices without invariant checks.
pub fn assemble_water_spec(params: &WaterParams) -> Result<ProblemSpec> {
    let n = params.n;
    if n < 2 {
        return Err(Error::InvariantViolation(format!("need at least 2 sections, got {n}")));
    }
    let m = n - 1;
    let nf = n as f64;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = if i == 0 { -params.alpha } else { -(params.alpha + params.beta) };
        if i + 1 < n {
            a[(i, i + 1)] = params.beta;
        }
    }
    let mut b = DMatrix::zeros(n, m);
    let mut e = DMatrix::zeros(m, n);
    let mut g = DMatrix::zeros(m, n);
    for j in 0..m {
        b[(j, j)] = -1.0;
        b[(j + 1, j)] = 1.0;
        e[(j, j + 1)] = params.zeta_u;
        g[(j, j)] = (j + 1) as f64 * params.zeta_v / nf;
    }
    let h = -&b;
    let mut s = DVector::zeros(n);
    s[0] = params.rho_s;
    let r = DVector::from_fn(m, |j, _| params.rho_u * (j + 2) as f64 / nf);
    let delta = DVector::from_element(m, params.rho_v);
    let mut builder = ProblemSpec::builder(a, b, e, s, r)
        .bounded_disturbance(h, g, delta)
        .x0(DVector::from_element(n, 1.0))
        .horizon(params.horizon);
    if params.rain {
        builder = builder.unconstrained_disturbance(DMatrix::from_element(n, 1, 1.0), DVector::from_element(1, params.gamma));
    }
    builder.build()
}

/// Checked network instance; always passes validation.
pub fn build_water_spec(params: &WaterParams) -> Result<ProblemSpec> {
    params.check()?;
    let spec = assemble_water_spec(params)?;
    let report = validate(&spec)?;
    if !report.passed() {
        return Err(Error::InvariantViolation(report.messages.join("; ")));
    }
    Ok(spec)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    /// `𝟙'p = p'x0`; `None` when the instance failed.
    pub cost: Option<f64>,
    pub iterations: usize,
    pub seconds: f64,
    pub error: Option<String>,
}

/// Infinite-horizon cost for each network size; failures are recorded
/// per row.
pub fn sweep_cost_vs_n(template: &WaterParams, ns: &[usize], exec: Execution) -> Vec<SweepRow> {
    exec::map(exec, ns, |&n| {
        let start = Instant::now();
        let outcome = build_water_spec(&template.with_n(n).clone_infinite())
            .and_then(|spec| value_iteration(&spec, &ViOptions::default()));
        let seconds = start.elapsed().as_secs_f64();
        match outcome {
            Ok(v) if v.converged() => SweepRow {
                n,
                cost: Some(v.p.iter().sum()),
                iterations: v.iterations,
                seconds,
                error: None,
            },
            Ok(v) => SweepRow {
                n,
                cost: None,
                iterations: v.iterations,
                seconds,
                error: Some(format!("value iteration ended {:?}", v.status)),
            },
            Err(e) => SweepRow {
                n,
                cost: None,
                iterations: 0,
                seconds,
                error: Some(e.to_string()),
            },
        }
    })
}

impl WaterParams {
    fn clone_infinite(&self) -> Self {
        Self {
            horizon: Horizon::Infinite,
            ..self.clone()
        }
    }
}

/// CSV with header `n,cost,iterations,seconds`; failed rows carry `NaN`.
pub fn write_sweep_csv<W: Write>(w: W, rows: &[SweepRow]) -> Result<()> {
    let header = ["n", "cost", "iterations", "seconds"].map(String::from);
    let body = rows
        .iter()
        .map(|r| vec![r.n as f64, r.cost.unwrap_or(f64::NAN), r.iterations as f64, r.seconds]);
    write_table(w, &header, body)
}
