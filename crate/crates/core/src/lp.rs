//! Dense two-phase revised simplex.
//!
//! Models are stated with general row senses and variable bounds; they are
//! rewritten internally to `min c'z, Âz = b̂ (b̂ >= 0), z >= 0`:
//! finite lower bounds are shifted out, upper-only variables are mirrored,
//! free variables are split into positive parts and finite upper bounds
//! become extra rows. The basis inverse is kept explicitly, updated by
//! eta pivots and refactorized from an LU decomposition every
//! [`REFACTOR_EVERY`] pivots.
//!
//! Pricing is Dantzig's rule; after `50 * rows` consecutive degenerate
//! pivots the phase switches to Bland's rule, which cannot cycle.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

pub const REFACTOR_EVERY: usize = 64;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_FACTOR: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub struct LpModel {
    objective: Objective,
    cost: Vec<f64>,
    rows: Vec<Vec<f64>>,
    senses: Vec<RowSense>,
    rhs: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl LpModel {
    /// New model with every variable bounded to `[0, +∞)`.
    pub fn new(objective: Objective, cost: Vec<f64>) -> Self {
        let n = cost.len();
        Self {
            objective,
            cost,
            rows: Vec::new(),
            senses: Vec::new(),
            rhs: Vec::new(),
            lower: vec![0.0; n],
            upper: vec![f64::INFINITY; n],
        }
    }

    pub fn add_row(&mut self, coeffs: Vec<f64>, sense: RowSense, rhs: f64) -> usize {
        self.rows.push(coeffs);
        self.senses.push(sense);
        self.rhs.push(rhs);
        self.rows.len() - 1
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.lower[var] = lower;
        self.upper[var] = upper;
    }

    pub fn num_vars(&self) -> usize {
        self.cost.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> Objective {
        self.objective
    }

    fn check(&self) -> Result<()> {
        let n = self.num_vars();
        if let Some(i) = self.rows.iter().position(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!(
                "LP row {i} has {} coefficients, expected {n}",
                self.rows[i].len()
            )));
        }
        for j in 0..n {
            let (lo, hi) = (self.lower[j], self.upper[j]);
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY || lo > hi {
                return Err(Error::InvalidArgument(format!("variable {j} has bounds [{lo}, {hi}]")));
            }
        }
        let finite = self.cost.iter().chain(self.rhs.iter()).chain(self.rows.iter().flatten()).all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("LP data must be finite".into()));
        }
        Ok(())
    }

    /// Plain-text tabular dump for debugging.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sense = match self.objective {
            Objective::Minimize => "min",
            Objective::Maximize => "max",
        };
        let _ = write!(out, "{sense:>6} |");
        for c in &self.cost {
            let _ = write!(out, " {c:>10.4}");
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let _ = write!(out, "r{i:<5} |");
            for a in row {
                let _ = write!(out, " {a:>10.4}");
            }
            let op = match self.senses[i] {
                RowSense::Le => "<=",
                RowSense::Eq => "==",
                RowSense::Ge => ">=",
            };
            let _ = writeln!(out, "  {op} {:>10.4}", self.rhs[i]);
        }
        let _ = write!(out, "{:>6} |", "lo");
        for l in &self.lower {
            let _ = write!(out, " {l:>10.4}");
        }
        out.push('\n');
        let _ = write!(out, "{:>6} |", "hi");
        for u in &self.upper {
            let _ = write!(out, " {u:>10.4}");
        }
        out.push('\n');
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasicVar {
    Structural(usize),
    Slack(usize),
    BoundSlack(usize),
    Artificial(usize),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point: optimizer when optimal, last basic point otherwise.
    pub x: Vec<f64>,
    pub objective: f64,
    /// Row prices `∂objective/∂rhs`.
    pub duals: Vec<f64>,
    pub dual_objective: f64,
    pub reduced_costs: Vec<f64>,
    pub basis: Vec<BasicVar>,
    pub iterations: usize,
    /// Improving direction in the original variables (max-norm 1) when
    /// unbounded.
    pub ray: Option<Vec<f64>>,
    /// Phase-1 row multipliers when infeasible.
    pub farkas: Option<Vec<f64>>,
    /// Phase-1 optimum: sum of artificial values.
    pub infeasibility: f64,
}

impl LpSolution {
    /// `max_i` violation of rows and bounds at `x`.
    pub fn primal_residual(&self, model: &LpModel) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, row) in model.rows.iter().enumerate() {
            let ax: f64 = row.iter().zip(&self.x).map(|(a, x)| a * x).sum();
            let v = match model.senses[i] {
                RowSense::Le => ax - model.rhs[i],
                RowSense::Ge => model.rhs[i] - ax,
                RowSense::Eq => (ax - model.rhs[i]).abs(),
            };
            worst = worst.max(v);
        }
        for (j, &x) in self.x.iter().enumerate() {
            worst = worst.max(model.lower[j] - x).max(x - model.upper[j]);
        }
        worst
    }
}

#[derive(Debug, Clone, Copy)]
enum VarMap {
    Shift { col: usize, lo: f64 },
    Mirror { col: usize, hi: f64 },
    Split { pos: usize, neg: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum ColKind {
    Part,
    Slack(usize),
    BoundSlack(usize),
    Artificial,
}

struct Standard {
    a: DMatrix<f64>,
    b: Vec<f64>,
    cost: Vec<f64>,
    kinds: Vec<ColKind>,
    flips: Vec<f64>,
    var_map: Vec<VarMap>,
    model_rows: usize,
    initial_basis: Vec<usize>,
    part_owner: Vec<Option<usize>>,
}

impl Standard {
    fn build(model: &LpModel) -> Self {
        let n = model.num_vars();
        let sign = match model.objective {
            Objective::Minimize => 1.0,
            Objective::Maximize => -1.0,
        };
        let mut var_map = Vec::with_capacity(n);
        let mut cols: Vec<(ColKind, Option<usize>)> = Vec::new();
        let mut bound_rows: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            let (lo, hi) = (model.lower[j], model.upper[j]);
            if lo.is_finite() {
                let col = cols.len();
                cols.push((ColKind::Part, Some(j)));
                var_map.push(VarMap::Shift { col, lo });
                if hi.is_finite() {
                    bound_rows.push((col, hi - lo));
                }
            } else if hi.is_finite() {
                let col = cols.len();
                cols.push((ColKind::Part, Some(j)));
                var_map.push(VarMap::Mirror { col, hi });
            } else {
                let pos = cols.len();
                cols.push((ColKind::Part, Some(j)));
                cols.push((ColKind::Part, Some(j)));
                var_map.push(VarMap::Split { pos, neg: pos + 1 });
            }
        }
        let n_parts = cols.len();
        let model_rows = model.num_rows();
        let total_rows = model_rows + bound_rows.len();

        for (i, s) in model.senses.iter().enumerate() {
            if *s != RowSense::Eq {
                cols.push((ColKind::Slack(i), None));
            }
        }
        for (k, (col, _)) in bound_rows.iter().enumerate() {
            let owner = cols[*col].1.expect("part column has an owner");
            let _ = k;
            cols.push((ColKind::BoundSlack(owner), None));
        }

        let mut a = DMatrix::zeros(total_rows, cols.len());
        let mut b = vec![0.0; total_rows];
        let mut cost = vec![0.0; cols.len()];

        for j in 0..n {
            let c = sign * model.cost[j];
            match var_map[j] {
                VarMap::Shift { col, .. } => cost[col] = c,
                VarMap::Mirror { col, .. } => cost[col] = -c,
                VarMap::Split { pos, neg } => {
                    cost[pos] = c;
                    cost[neg] = -c;
                }
            }
        }
        for (i, row) in model.rows.iter().enumerate() {
            let mut rhs = model.rhs[i];
            for (j, &aij) in row.iter().enumerate() {
                if aij == 0.0 {
                    continue;
                }
                match var_map[j] {
                    VarMap::Shift { col, lo } => {
                        a[(i, col)] = aij;
                        rhs -= aij * lo;
                    }
                    VarMap::Mirror { col, hi } => {
                        a[(i, col)] = -aij;
                        rhs -= aij * hi;
                    }
                    VarMap::Split { pos, neg } => {
                        a[(i, pos)] = aij;
                        a[(i, neg)] = -aij;
                    }
                }
            }
            b[i] = rhs;
        }
        let mut col = n_parts;
        for (i, s) in model.senses.iter().enumerate() {
            match s {
                RowSense::Le => {
                    a[(i, col)] = 1.0;
                    col += 1;
                }
                RowSense::Ge => {
                    a[(i, col)] = -1.0;
                    col += 1;
                }
                RowSense::Eq => {}
            }
        }
        for (k, (part, width)) in bound_rows.iter().enumerate() {
            let row = model_rows + k;
            a[(row, *part)] = 1.0;
            a[(row, col)] = 1.0;
            b[row] = *width;
            col += 1;
        }

        let mut flips = vec![1.0; total_rows];
        for i in 0..total_rows {
            if b[i] < 0.0 {
                flips[i] = -1.0;
                b[i] = -b[i];
                for j in 0..a.ncols() {
                    a[(i, j)] = -a[(i, j)];
                }
            }
        }

        // Slacks with a +1 entry seed the basis; remaining rows get artificials.
        let mut initial_basis = vec![usize::MAX; total_rows];
        for j in n_parts..cols.len() {
            for i in 0..total_rows {
                if a[(i, j)] == 1.0 && initial_basis[i] == usize::MAX {
                    initial_basis[i] = j;
                }
            }
        }
        let mut kinds: Vec<ColKind> = cols.iter().map(|c| c.0).collect();
        let mut part_owner: Vec<Option<usize>> = cols.iter().map(|c| c.1).collect();
        let missing: Vec<usize> = (0..total_rows).filter(|&i| initial_basis[i] == usize::MAX).collect();
        if !missing.is_empty() {
            let base = a.ncols();
            let mut grown = DMatrix::zeros(total_rows, base + missing.len());
            grown.view_mut((0, 0), (total_rows, base)).copy_from(&a);
            for (k, &i) in missing.iter().enumerate() {
                grown[(i, base + k)] = 1.0;
                initial_basis[i] = base + k;
                kinds.push(ColKind::Artificial);
                part_owner.push(None);
                cost.push(0.0);
            }
            a = grown;
        }

        Self {
            a,
            b,
            cost,
            kinds,
            flips,
            var_map,
            model_rows,
            initial_basis,
            part_owner,
        }
    }

    fn is_artificial(&self, j: usize) -> bool {
        self.kinds[j] == ColKind::Artificial
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded { entering: usize, direction: Vec<f64> },
}

struct Simplex<'a> {
    st: &'a Standard,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    binv: DMatrix<f64>,
    xb: Vec<f64>,
    since_refactor: usize,
    iterations: usize,
    iteration_cap: usize,
}

impl<'a> Simplex<'a> {
    fn new(st: &'a Standard) -> Result<Self> {
        let m = st.b.len();
        let mut in_basis = vec![false; st.a.ncols()];
        for &j in &st.initial_basis {
            in_basis[j] = true;
        }
        let mut s = Self {
            st,
            basis: st.initial_basis.clone(),
            in_basis,
            binv: DMatrix::identity(m, m),
            xb: st.b.clone(),
            since_refactor: 0,
            iterations: 0,
            iteration_cap: 200 * (m + st.a.ncols()) + 10_000,
        };
        s.refactor()?;
        Ok(s)
    }

    fn refactor(&mut self) -> Result<()> {
        let m = self.basis.len();
        if m == 0 {
            return Ok(());
        }
        let bmat = DMatrix::from_fn(m, m, |i, k| self.st.a[(i, self.basis[k])]);
        let lu = bmat.lu();
        let inv = lu
            .try_inverse()
            .ok_or_else(|| Error::NumericalBreakdown(format!("singular basis after {} pivots", self.iterations)))?;
        if inv.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalBreakdown("non-finite basis inverse".into()));
        }
        self.binv = inv;
        let b = DVector::from_column_slice(&self.st.b);
        let xb = &self.binv * b;
        self.xb = xb.iter().copied().collect();
        self.since_refactor = 0;
        Ok(())
    }

    fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.basis.len();
        let mut y = vec![0.0; m];
        for (k, &j) in self.basis.iter().enumerate() {
            let cb = cost[j];
            if cb != 0.0 {
                for i in 0..m {
                    y[i] += cb * self.binv[(k, i)];
                }
            }
        }
        y
    }

    fn column(&self, j: usize) -> Vec<f64> {
        let m = self.basis.len();
        let mut w = vec![0.0; m];
        for i in 0..m {
            let aij = self.st.a[(i, j)];
            if aij != 0.0 {
                for k in 0..m {
                    w[k] += self.binv[(k, i)] * aij;
                }
            }
        }
        w
    }

    fn reduced_cost(&self, cost: &[f64], y: &[f64], j: usize) -> f64 {
        let mut d = cost[j];
        for (i, yi) in y.iter().enumerate() {
            d -= yi * self.st.a[(i, j)];
        }
        d
    }

    fn pivot(&mut self, row: usize, entering: usize, w: &[f64], step: f64) -> Result<()> {
        let m = self.basis.len();
        for i in 0..m {
            self.xb[i] -= step * w[i];
        }
        self.xb[row] = step;
        let piv = w[row];
        for k in 0..m {
            self.binv[(row, k)] /= piv;
        }
        for i in 0..m {
            if i != row && w[i] != 0.0 {
                let f = w[i];
                for k in 0..m {
                    let v = self.binv[(row, k)];
                    self.binv[(i, k)] -= f * v;
                }
            }
        }
        self.in_basis[self.basis[row]] = false;
        self.in_basis[entering] = true;
        self.basis[row] = entering;
        self.iterations += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        Ok(())
    }

    fn run(&mut self, cost: &[f64], allow_artificial: bool) -> Result<PhaseEnd> {
        let m = self.basis.len();
        let ncols = self.st.a.ncols();
        let mut bland = false;
        let mut degenerate_run = 0usize;
        loop {
            if self.iterations > self.iteration_cap {
                return Err(Error::NumericalBreakdown(format!("iteration limit {} reached", self.iteration_cap)));
            }
            let y = self.duals(cost);
            let mut entering = None;
            let mut best = -tol::LP;
            for j in 0..ncols {
                if self.in_basis[j] || (!allow_artificial && self.st.is_artificial(j)) {
                    continue;
                }
                let d = self.reduced_cost(cost, &y, j);
                if bland {
                    if d < -tol::LP {
                        entering = Some(j);
                        break;
                    }
                } else if d < best {
                    best = d;
                    entering = Some(j);
                }
            }
            let Some(q) = entering else {
                return Ok(PhaseEnd::Optimal);
            };
            let w = self.column(q);

            let mut leave: Option<(usize, f64)> = None;
            for i in 0..m {
                let stuck_artificial = !allow_artificial && self.st.is_artificial(self.basis[i]);
                let ratio = if w[i] > PIVOT_TOL {
                    self.xb[i].max(0.0) / w[i]
                } else if stuck_artificial && w[i] < -PIVOT_TOL {
                    0.0
                } else {
                    continue;
                };
                let better = match leave {
                    None => true,
                    Some((r, best_ratio)) => {
                        if ratio < best_ratio - 1e-12 {
                            true
                        } else if ratio <= best_ratio + 1e-12 {
                            if bland {
                                self.basis[i] < self.basis[r]
                            } else {
                                w[i].abs() > w[r].abs()
                            }
                        } else {
                            false
                        }
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((row, step)) = leave else {
                return Ok(PhaseEnd::Unbounded { entering: q, direction: w });
            };
            if step <= 1e-12 {
                degenerate_run += 1;
                if degenerate_run > DEGENERATE_FACTOR * m.max(1) {
                    bland = true;
                }
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, q, &w, step)?;
        }
    }

    /// Pivots zero-level artificials out of the basis where possible.
    fn expel_artificials(&mut self) -> Result<()> {
        let m = self.basis.len();
        for row in 0..m {
            if !self.st.is_artificial(self.basis[row]) {
                continue;
            }
            let mut choice = None;
            for j in 0..self.st.a.ncols() {
                if self.in_basis[j] || self.st.is_artificial(j) {
                    continue;
                }
                let w = self.column(j);
                if w[row].abs() > 1e-7 {
                    choice = Some((j, w));
                    break;
                }
            }
            if let Some((j, w)) = choice {
                let step = self.xb[row] / w[row];
                self.pivot(row, j, &w, step)?;
            }
        }
        Ok(())
    }

    fn point(&self) -> Vec<f64> {
        let mut z = vec![0.0; self.st.a.ncols()];
        for (k, &j) in self.basis.iter().enumerate() {
            z[j] = self.xb[k];
        }
        z
    }
}

fn to_model_vars(st: &Standard, z: &[f64], with_offsets: bool) -> Vec<f64> {
    st.var_map
        .iter()
        .map(|vm| match *vm {
            VarMap::Shift { col, lo } => z[col] + if with_offsets { lo } else { 0.0 },
            VarMap::Mirror { col, hi } => (if with_offsets { hi } else { 0.0 }) - z[col],
            VarMap::Split { pos, neg } => z[pos] - z[neg],
        })
        .collect()
}

fn describe_basis(st: &Standard, basis: &[usize]) -> Vec<BasicVar> {
    basis
        .iter()
        .map(|&j| match st.kinds[j] {
            ColKind::Part => BasicVar::Structural(st.part_owner[j].expect("part column has an owner")),
            ColKind::Slack(i) => BasicVar::Slack(i),
            ColKind::BoundSlack(v) => BasicVar::BoundSlack(v),
            ColKind::Artificial => {
                let row = (0..st.b.len()).find(|&i| st.a[(i, j)] != 0.0).unwrap_or(0);
                BasicVar::Artificial(row)
            }
        })
        .collect()
}

fn objective_value(model: &LpModel, x: &[f64]) -> f64 {
    model.cost.iter().zip(x).map(|(c, x)| c * x).sum()
}

/// Lagrangian dual bound `b'y + Σ_j opt_{x_j ∈ [l_j, u_j]} d_j x_j`.
fn dual_bound(model: &LpModel, y: &[f64]) -> (f64, Vec<f64>) {
    let n = model.num_vars();
    let mut d = model.cost.clone();
    for (i, row) in model.rows.iter().enumerate() {
        for j in 0..n {
            d[j] -= row[j] * y[i];
        }
    }
    let mut val: f64 = model.rhs.iter().zip(y).map(|(b, y)| b * y).sum();
    let minimize = model.objective == Objective::Minimize;
    for j in 0..n {
        if d[j].abs() <= tol::LP {
            continue;
        }
        let at_lower = (d[j] > 0.0) == minimize;
        let bound = if at_lower { model.lower[j] } else { model.upper[j] };
        val += d[j] * bound;
    }
    (val, d)
}

/// Solves `model` to optimality, or proves it infeasible or unbounded.
pub fn solve_lp(model: &LpModel) -> Result<LpSolution> {
    model.check()?;
    let st = Standard::build(model);
    let m = st.b.len();
    let ncols = st.a.ncols();
    let mut sx = Simplex::new(&st)?;

    let phase1_cost: Vec<f64> = (0..ncols).map(|j| if st.is_artificial(j) { 1.0 } else { 0.0 }).collect();
    let has_artificials = phase1_cost.iter().any(|&c| c > 0.0);
    let mut infeasibility = 0.0;
    if has_artificials {
        match sx.run(&phase1_cost, true)? {
            PhaseEnd::Optimal => {}
            PhaseEnd::Unbounded { .. } => {
                return Err(Error::NumericalBreakdown("phase 1 reported an unbounded direction".into()));
            }
        }
        sx.refactor()?;
        infeasibility = sx
            .basis
            .iter()
            .zip(&sx.xb)
            .filter(|(j, _)| st.is_artificial(**j))
            .map(|(_, v)| v.max(0.0))
            .sum();
        let scale = 1.0 + st.b.iter().fold(0.0_f64, |a, b| a.max(b.abs()));
        if infeasibility > tol::LP * scale {
            let y = sx.duals(&phase1_cost);
            let farkas: Vec<f64> = (0..st.model_rows).map(|i| y[i] * st.flips[i]).collect();
            let z = sx.point();
            let x = to_model_vars(&st, &z, true);
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: objective_value(model, &x),
                x,
                duals: vec![0.0; st.model_rows],
                dual_objective: f64::NAN,
                reduced_costs: vec![0.0; model.num_vars()],
                basis: describe_basis(&st, &sx.basis),
                iterations: sx.iterations,
                ray: None,
                farkas: Some(farkas),
                infeasibility,
            });
        }
        sx.expel_artificials()?;
    }

    let end = sx.run(&st.cost, false)?;
    let z = sx.point();
    let x = to_model_vars(&st, &z, true);
    let objective = objective_value(model, &x);
    let basis = describe_basis(&st, &sx.basis);
    match end {
        PhaseEnd::Unbounded { entering, direction } => {
            let mut dz = vec![0.0; ncols];
            dz[entering] = 1.0;
            for (k, &j) in sx.basis.iter().enumerate() {
                dz[j] = -direction[k];
            }
            let mut ray = to_model_vars(&st, &dz, false);
            let scale = ray.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
            if scale > 0.0 {
                ray.iter_mut().for_each(|r| *r /= scale);
            }
            Ok(LpSolution {
                status: LpStatus::Unbounded,
                x,
                objective,
                duals: vec![0.0; st.model_rows],
                dual_objective: f64::NAN,
                reduced_costs: vec![0.0; model.num_vars()],
                basis,
                iterations: sx.iterations,
                ray: Some(ray),
                farkas: None,
                infeasibility,
            })
        }
        PhaseEnd::Optimal => {
            sx.refactor()?;
            let y_int = sx.duals(&st.cost);
            let sign = match model.objective {
                Objective::Minimize => 1.0,
                Objective::Maximize => -1.0,
            };
            let duals: Vec<f64> = (0..st.model_rows).map(|i| sign * st.flips[i] * y_int[i]).collect();
            let (dual_objective, reduced_costs) = dual_bound(model, &duals);
            debug_assert_eq!(y_int.len(), m);
            Ok(LpSolution {
                status: LpStatus::Optimal,
                x,
                objective,
                duals,
                dual_objective,
                reduced_costs,
                basis,
                iterations: sx.iterations,
                ray: None,
                farkas: None,
                infeasibility,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_regulator_primal() {
        // max p  s.t.  -p - ζ >= -2,  p - ζ <= 0,  -p - ζ <= 0
        let mut lp = LpModel::new(Objective::Maximize, vec![1.0, 0.0]);
        lp.add_row(vec![-1.0, -1.0], RowSense::Ge, -2.0);
        lp.add_row(vec![1.0, -1.0], RowSense::Le, 0.0);
        lp.add_row(vec![-1.0, -1.0], RowSense::Le, 0.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 1.0).abs() < 1e-12);
        assert!((sol.x[1] - 1.0).abs() < 1e-12);
        assert!((sol.objective - 1.0).abs() < 1e-12);
        assert!((sol.dual_objective - sol.objective).abs() < 1e-9);
    }

    #[test]
    fn infeasible_row() {
        let mut lp = LpModel::new(Objective::Minimize, vec![0.0]);
        lp.add_row(vec![1.0], RowSense::Le, -1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.infeasibility > 0.5);
        // Farkas: y'A >= 0 componentwise on x >= 0 with y'b < 0 for the <= row.
        let y = sol.farkas.unwrap();
        assert!(y[0] != 0.0);
    }

    #[test]
    fn unbounded_without_rows() {
        let lp = LpModel::new(Objective::Maximize, vec![1.0]);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
        assert_eq!(sol.ray.unwrap(), vec![1.0]);
    }

    #[test]
    fn free_and_boxed_variables() {
        // min x - y,  x free, y in [-1, 3],  x + y >= 1,  x >= -5 via row
        let mut lp = LpModel::new(Objective::Minimize, vec![1.0, -1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, -1.0, 3.0);
        lp.add_row(vec![1.0, 1.0], RowSense::Ge, 1.0);
        lp.add_row(vec![1.0, 0.0], RowSense::Ge, -5.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] + 2.0).abs() < 1e-9, "{:?}", sol.x);
        assert!((sol.x[1] - 3.0).abs() < 1e-9);
        assert!((sol.objective + 5.0).abs() < 1e-9);
        assert!((sol.dual_objective - sol.objective).abs() < 1e-9);
        assert!(sol.primal_residual(&lp) < 1e-9);
    }

    #[test]
    fn upper_only_variable() {
        // max x with x <= 4 via bound only
        let mut lp = LpModel::new(Objective::Maximize, vec![1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, 4.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert_eq!(sol.x, vec![4.0]);
        assert!((sol.dual_objective - 4.0).abs() < 1e-12);
    }

    #[test]
    fn equality_rows_and_redundancy() {
        // x + y = 2, 2x + 2y = 4 (redundant), min x
        let mut lp = LpModel::new(Objective::Minimize, vec![1.0, 0.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Eq, 2.0);
        lp.add_row(vec![2.0, 2.0], RowSense::Eq, 4.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!(sol.x[0].abs() < 1e-12);
        assert!((sol.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance for Dantzig pricing.
        let mut lp = LpModel::new(Objective::Minimize, vec![-0.75, 150.0, -0.02, 6.0]);
        lp.add_row(vec![0.25, -60.0, -0.04, 9.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.5, -90.0, -0.02, 3.0], RowSense::Le, 0.0);
        lp.add_row(vec![0.0, 0.0, 1.0, 0.0], RowSense::Le, 1.0);
        let sol = solve_lp(&lp).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.objective + 0.05).abs() < 1e-9, "{}", sol.objective);
    }

    #[test]
    fn bad_bounds_rejected() {
        let mut lp = LpModel::new(Objective::Minimize, vec![1.0]);
        lp.set_bounds(0, 2.0, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::InvalidArgument(_))));
        let mut lp = LpModel::new(Objective::Minimize, vec![1.0]);
        lp.add_row(vec![1.0, 2.0], RowSense::Le, 1.0);
        assert!(matches!(solve_lp(&lp), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn text_dump_lists_rows() {
        let mut lp = LpModel::new(Objective::Maximize, vec![1.0, 2.0]);
        lp.add_row(vec![1.0, 1.0], RowSense::Le, 3.0);
        let text = lp.to_text();
        assert!(text.starts_with("   max"));
        assert!(text.contains("<="));
        assert_eq!(text.lines().count(), 4);
    }
}
