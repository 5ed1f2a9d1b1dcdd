//! Problem data for the minimax linear regulator and its standing
//! hypotheses: `A - |B|E` Metzler and `s >= E'|r| - G'|δ|`.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{abs_matrix, abs_vector, min_offdiag};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Horizon {
    Finite(f64),
    Infinite,
}

/// Immutable problem data. Disturbance blocks may have zero width
/// (`l = 0` or `c = 0`); they are always stored as explicit matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    f: DMatrix<f64>,
    h: DMatrix<f64>,
    e: DMatrix<f64>,
    g: DMatrix<f64>,
    s: DVector<f64>,
    r: DVector<f64>,
    gamma: DVector<f64>,
    delta: DVector<f64>,
    x0: DVector<f64>,
    horizon: Horizon,
}

/// Builder for [`ProblemSpec`]; disturbance blocks default to zero width.
#[derive(Debug, Clone)]
pub struct ProblemBuilder {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    e: DMatrix<f64>,
    s: DVector<f64>,
    r: DVector<f64>,
    f: Option<DMatrix<f64>>,
    gamma: Option<DVector<f64>>,
    h: Option<DMatrix<f64>>,
    g: Option<DMatrix<f64>>,
    delta: Option<DVector<f64>>,
    x0: Option<DVector<f64>>,
    horizon: Horizon,
}

impl ProblemBuilder {
    pub fn unconstrained_disturbance(mut self, f: DMatrix<f64>, gamma: DVector<f64>) -> Self {
        self.f = Some(f);
        self.gamma = Some(gamma);
        self
    }

    pub fn bounded_disturbance(mut self, h: DMatrix<f64>, g: DMatrix<f64>, delta: DVector<f64>) -> Self {
        self.h = Some(h);
        self.g = Some(g);
        self.delta = Some(delta);
        self
    }

    pub fn x0(mut self, x0: DVector<f64>) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn horizon(mut self, horizon: Horizon) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn build(self) -> Result<ProblemSpec> {
        let n = self.a.nrows();
        let l = self.f.as_ref().map_or(0, |f| f.ncols());
        let c = self.h.as_ref().map_or(0, |h| h.ncols());
        let spec = ProblemSpec {
            f: self.f.unwrap_or_else(|| DMatrix::zeros(n, 0)),
            gamma: self.gamma.unwrap_or_else(|| DVector::zeros(l)),
            h: self.h.unwrap_or_else(|| DMatrix::zeros(n, 0)),
            g: self.g.unwrap_or_else(|| DMatrix::zeros(c, n)),
            delta: self.delta.unwrap_or_else(|| DVector::zeros(c)),
            x0: self.x0.unwrap_or_else(|| DVector::from_element(n, 1.0)),
            a: self.a,
            b: self.b,
            e: self.e,
            s: self.s,
            r: self.r,
            horizon: self.horizon,
        };
        spec.check_dimensions()?;
        spec.check_finite()?;
        Ok(spec)
    }
}

impl ProblemSpec {
    /// Starts a builder from the mandatory blocks. `x0` defaults to `𝟙` and
    /// the horizon to infinite.
    pub fn builder(a: DMatrix<f64>, b: DMatrix<f64>, e: DMatrix<f64>, s: DVector<f64>, r: DVector<f64>) -> ProblemBuilder {
        ProblemBuilder {
            a,
            b,
            e,
            s,
            r,
            f: None,
            gamma: None,
            h: None,
            g: None,
            delta: None,
            x0: None,
            horizon: Horizon::Infinite,
        }
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }
    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }
    pub fn f(&self) -> &DMatrix<f64> {
        &self.f
    }
    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }
    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }
    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }
    pub fn s(&self) -> &DVector<f64> {
        &self.s
    }
    pub fn r(&self) -> &DVector<f64> {
        &self.r
    }
    pub fn gamma(&self) -> &DVector<f64> {
        &self.gamma
    }
    pub fn delta(&self) -> &DVector<f64> {
        &self.delta
    }
    pub fn x0(&self) -> &DVector<f64> {
        &self.x0
    }
    pub fn horizon(&self) -> Horizon {
        self.horizon
    }

    /// State dimension `n`.
    pub fn n(&self) -> usize {
        self.a.nrows()
    }
    /// Control channels `m`.
    pub fn m(&self) -> usize {
        self.b.ncols()
    }
    /// Unconstrained-disturbance channels `l`.
    pub fn l(&self) -> usize {
        self.f.ncols()
    }
    /// Bounded-disturbance channels `c`.
    pub fn c(&self) -> usize {
        self.h.ncols()
    }

    pub fn with_horizon(&self, horizon: Horizon) -> Self {
        Self {
            horizon,
            ..self.clone()
        }
    }

    pub fn with_x0(&self, x0: DVector<f64>) -> Result<Self> {
        if x0.len() != self.n() {
            return Err(Error::DimensionMismatch(format!("x0 has length {}, expected {}", x0.len(), self.n())));
        }
        Ok(Self { x0, ..self.clone() })
    }

    pub fn with_gamma(&self, gamma: DVector<f64>) -> Result<Self> {
        if gamma.len() != self.l() {
            return Err(Error::DimensionMismatch(format!("gamma has length {}, expected {}", gamma.len(), self.l())));
        }
        Ok(Self { gamma, ..self.clone() })
    }

    /// Same problem with the unconstrained disturbance removed (`l = 0`).
    pub fn without_unconstrained_disturbance(&self) -> Self {
        Self {
            f: DMatrix::zeros(self.n(), 0),
            gamma: DVector::zeros(0),
            ..self.clone()
        }
    }

    /// True when the bounded disturbance is absent (`c = 0` or `H = G = 0`).
    pub fn has_no_bounded_disturbance(&self) -> bool {
        self.c() == 0 || (self.h.iter().all(|&x| x == 0.0) && self.g.iter().all(|&x| x == 0.0))
    }

    fn check_dimensions(&self) -> Result<()> {
        let n = self.n();
        let (m, l, c) = (self.m(), self.l(), self.c());
        let shape = |name: &str, mat: &DMatrix<f64>, rows: usize, cols: usize| {
            if mat.nrows() != rows || mat.ncols() != cols {
                Err(Error::DimensionMismatch(format!(
                    "{name} is {}x{}, expected {rows}x{cols}",
                    mat.nrows(),
                    mat.ncols()
                )))
            } else {
                Ok(())
            }
        };
        let len = |name: &str, v: &DVector<f64>, want: usize| {
            if v.len() != want {
                Err(Error::DimensionMismatch(format!("{name} has length {}, expected {want}", v.len())))
            } else {
                Ok(())
            }
        };
        shape("A", &self.a, n, n)?;
        shape("B", &self.b, n, m)?;
        shape("F", &self.f, n, l)?;
        shape("H", &self.h, n, c)?;
        shape("E", &self.e, m, n)?;
        shape("G", &self.g, c, n)?;
        len("s", &self.s, n)?;
        len("r", &self.r, m)?;
        len("gamma", &self.gamma, l)?;
        len("delta", &self.delta, c)?;
        len("x0", &self.x0, n)?;
        if let Horizon::Finite(t) = self.horizon {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::InvalidArgument(format!("finite horizon must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn check_finite(&self) -> Result<()> {
        let mats = [("A", &self.a), ("B", &self.b), ("F", &self.f), ("H", &self.h), ("E", &self.e), ("G", &self.g)];
        for (name, m) in mats {
            if m.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("{name} contains a non-finite entry")));
            }
        }
        let vecs = [("s", &self.s), ("r", &self.r), ("gamma", &self.gamma), ("delta", &self.delta), ("x0", &self.x0)];
        for (name, v) in vecs {
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Parse(format!("{name} contains a non-finite entry")));
            }
        }
        Ok(())
    }

    /// `A - |B|E`, the worst-case Metzler test matrix.
    pub fn metzler_test_matrix(&self) -> DMatrix<f64> {
        &self.a - abs_matrix(&self.b) * &self.e
    }

    /// `s - E'|r| + G'|δ|`, elementwise nonnegative under the cost hypothesis.
    pub fn cost_margin(&self) -> DVector<f64> {
        &self.s - self.e.transpose() * abs_vector(&self.r) + self.g.transpose() * abs_vector(&self.delta)
    }

    /// Checks `|K| <= E` elementwise within the sign tolerance.
    pub fn check_gain_bounds(&self, k: &DMatrix<f64>) -> Result<()> {
        if k.nrows() != self.m() || k.ncols() != self.n() {
            return Err(Error::DimensionMismatch(format!(
                "K is {}x{}, expected {}x{}",
                k.nrows(),
                k.ncols(),
                self.m(),
                self.n()
            )));
        }
        for i in 0..self.m() {
            for j in 0..self.n() {
                if k[(i, j)].abs() > self.e[(i, j)] + tol::METZLER {
                    return Err(Error::ControllerOutOfBounds { row: i, col: j });
                }
            }
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ProblemFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ProblemFile::from_spec(self)).expect("problem file serializes")
    }
}

/// On-disk layout: matrices as arrays of rows, absent disturbance keys mean
/// zero-width blocks.
#[derive(Debug, Serialize, Deserialize)]
struct ProblemFile {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<f64>>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    f: Option<Vec<Vec<f64>>>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    h: Option<Vec<Vec<f64>>>,
    #[serde(rename = "E")]
    e: Vec<Vec<f64>>,
    #[serde(rename = "G", default, skip_serializing_if = "Option::is_none")]
    g: Option<Vec<Vec<f64>>>,
    s: Vec<f64>,
    r: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta: Option<Vec<f64>>,
    x0: Vec<f64>,
    horizon: Horizon,
}

fn rows_of(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

/// Rebuilds a matrix from rows. `ncols_hint` fixes the width when there are
/// no rows to infer it from.
fn matrix_from_rows(name: &str, rows: &[Vec<f64>], nrows: usize, ncols_hint: Option<usize>) -> Result<DMatrix<f64>> {
    if rows.len() != nrows {
        return Err(Error::DimensionMismatch(format!("{name} has {} rows, expected {nrows}", rows.len())));
    }
    let ncols = match rows.first() {
        Some(r) => r.len(),
        None => ncols_hint.unwrap_or(0),
    };
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch(format!("{name} row {bad} has {} entries, expected {ncols}", rows[bad].len())));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

impl ProblemFile {
    fn from_spec(spec: &ProblemSpec) -> Self {
        let has_w = spec.l() > 0;
        let has_v = spec.c() > 0;
        Self {
            a: rows_of(&spec.a),
            b: rows_of(&spec.b),
            f: has_w.then(|| rows_of(&spec.f)),
            h: has_v.then(|| rows_of(&spec.h)),
            e: rows_of(&spec.e),
            g: has_v.then(|| rows_of(&spec.g)),
            s: spec.s.iter().copied().collect(),
            r: spec.r.iter().copied().collect(),
            gamma: has_w.then(|| spec.gamma.iter().copied().collect()),
            delta: has_v.then(|| spec.delta.iter().copied().collect()),
            x0: spec.x0.iter().copied().collect(),
            horizon: spec.horizon,
        }
    }

    fn into_spec(self) -> Result<ProblemSpec> {
        let n = self.a.len();
        let a = matrix_from_rows("A", &self.a, n, Some(n))?;
        let m = self.r.len();
        let b = matrix_from_rows("B", &self.b, n, Some(m))?;
        let e = matrix_from_rows("E", &self.e, b.ncols(), Some(n))?;
        let mut builder = ProblemSpec::builder(a, b, e, DVector::from_vec(self.s), DVector::from_vec(self.r))
            .x0(DVector::from_vec(self.x0))
            .horizon(self.horizon);

        match (self.f, self.gamma) {
            (None, None) => {}
            (Some(f), Some(gamma)) => {
                let f = matrix_from_rows("F", &f, n, Some(gamma.len()))?;
                builder = builder.unconstrained_disturbance(f, DVector::from_vec(gamma));
            }
            (Some(_), None) => return Err(Error::DimensionMismatch("F given without gamma".into())),
            (None, Some(g)) if g.is_empty() => {}
            (None, Some(_)) => return Err(Error::DimensionMismatch("gamma given without F".into())),
        }

        match (self.h, self.g, self.delta) {
            (None, None, None) => {}
            (Some(h), Some(g), Some(delta)) => {
                let c = delta.len();
                let h = matrix_from_rows("H", &h, n, Some(c))?;
                let g = matrix_from_rows("G", &g, h.ncols(), Some(n))?;
                builder = builder.bounded_disturbance(h, g, DVector::from_vec(delta));
            }
            _ => {
                return Err(Error::DimensionMismatch(
                    "bounded disturbance needs all of H, G and delta".into(),
                ))
            }
        }
        builder.build()
    }
}

/// Outcome of checking the standing hypotheses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub metzler_ok: bool,
    /// Smallest off-diagonal entry of `A - |B|E`; `+∞` (serialized as
    /// `null`) when `n = 1`.
    pub metzler_margin: f64,
    pub cost_condition_ok: bool,
    /// `s - E'|r| + G'|δ|`.
    pub cost_margin: Vec<f64>,
    pub messages: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.metzler_ok && self.cost_condition_ok
    }
}

/// Checks sign constraints on the data (hard errors) and evaluates both
/// hypothesis gates (reported, not raised).
pub fn validate(spec: &ProblemSpec) -> Result<ValidationReport> {
    spec.check_dimensions()?;
    let nonneg_mats = [("F", &spec.f), ("E", &spec.e), ("G", &spec.g)];
    for (name, m) in nonneg_mats {
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                if m[(i, j)] < -tol::METZLER {
                    return Err(Error::NegativeEntry {
                        matrix: name,
                        row: i,
                        col: j,
                        value: m[(i, j)],
                    });
                }
            }
        }
    }
    let nonneg_vecs = [("gamma", &spec.gamma), ("x0", &spec.x0)];
    for (name, v) in nonneg_vecs {
        if let Some(i) = v.iter().position(|&x| x < -tol::METZLER) {
            return Err(Error::NegativeEntry {
                matrix: name,
                row: i,
                col: 0,
                value: v[i],
            });
        }
    }
    for i in 0..spec.m() {
        let max = spec.e.row(i).iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(max > 0.0) {
            return Err(Error::ZeroControlRow { row: i });
        }
    }

    let mut messages = Vec::new();
    let metzler_margin = min_offdiag(&spec.metzler_test_matrix()).map_or(f64::INFINITY, |(_, _, v)| v);
    let metzler_ok = metzler_margin >= -tol::METZLER;
    if !metzler_ok {
        messages.push(format!("A - |B|E is not Metzler: smallest off-diagonal entry {metzler_margin}"));
    }
    let margin = spec.cost_margin();
    let min_margin = margin.iter().copied().fold(f64::INFINITY, f64::min);
    let cost_condition_ok = spec.n() == 0 || min_margin >= -tol::METZLER;
    if !cost_condition_ok {
        let worst = margin.iter().position(|&x| x == min_margin).unwrap_or(0);
        messages.push(format!("s < E'|r| - G'|delta| at state {worst} (margin {min_margin})"));
    }
    Ok(ValidationReport {
        metzler_ok,
        metzler_margin,
        cost_condition_ok,
        cost_margin: margin.iter().copied().collect(),
        messages,
    })
}

/// Runs [`validate`] and turns a failed gate into [`Error::ValidationFailed`].
pub fn require_valid(spec: &ProblemSpec) -> Result<ValidationReport> {
    let report = validate(spec)?;
    if !report.passed() {
        return Err(Error::ValidationFailed(report.messages.join("; ")));
    }
    Ok(report)
}

/// Data used across examples and tests.
pub mod examples {
    use super::*;

    /// Three-state example with a persistent tie on the first control
    /// channel; the value is `(1 - e^{-(T-t)}) 𝟙`.
    pub fn tie_example(horizon: Horizon) -> ProblemSpec {
        let a = DMatrix::from_row_slice(3, 3, &[-2.0, 1.0, 0.0, 1.0, -2.0, 0.0, 0.0, 0.0, 1.0]);
        let b = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, -1.0, 0.0, 0.0, 2.0]);
        let e = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        ProblemSpec::builder(a, b, e, DVector::from_element(3, 1.0), DVector::zeros(2))
            .horizon(horizon)
            .build()
            .expect("tie example is well formed")
    }

    /// Three-state example whose third state is unstable and invisible to
    /// the cost; the Bellman solution is `[1, 1, 0]`.
    pub fn undetectable_example() -> ProblemSpec {
        let a = DMatrix::from_row_slice(3, 3, &[-2.0, 1.0, 0.0, 1.0, -2.0, 0.0, 0.0, 0.0, 1.0]);
        let b = DMatrix::from_column_slice(3, 1, &[1.0, -1.0, 0.0]);
        let e = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        ProblemSpec::builder(a, b, e, DVector::from_row_slice(&[1.0, 1.0, 0.0]), DVector::zeros(1))
            .build()
            .expect("undetectable example is well formed")
    }

    /// `ẋ = -x + u`, `|u| <= x`, cost `2x`; value `p = 1` at infinite horizon.
    pub fn scalar_example(horizon: Horizon) -> ProblemSpec {
        ProblemSpec::builder(
            DMatrix::from_element(1, 1, -1.0),
            DMatrix::from_element(1, 1, 1.0),
            DMatrix::from_element(1, 1, 1.0),
            DVector::from_element(1, 2.0),
            DVector::zeros(1),
        )
        .horizon(horizon)
        .build()
        .expect("scalar example is well formed")
    }
}
