//! Command logic behind the `minimax-lr` binary. Every command returns a
//! JSON report; tables and trajectories go to CSV files.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use minimax_lr::error::ErrorClass;
use minimax_lr::exec::Execution;
use minimax_lr::export::{numbered, save_table};
use minimax_lr::finite::{check_gamma_finite, default_steps, extract_gain_schedule, solve_hjb_ode, value_at};
use minimax_lr::gain::min_l1_gain;
use minimax_lr::infinite::{extract_static_gain, value_iteration, ViOptions};
use minimax_lr::kernel::{is_hurwitz, spectral_abscissa};
use minimax_lr::lr_lp::{extract_lp_controller, lemma1_equivalence_check, solve_lr, ControllerCandidate};
use minimax_lr::problem::examples::{tie_example, undetectable_example};
use minimax_lr::problem::validate;
use minimax_lr::sim::{simulate, worst_case_policies, worst_case_schedule, Feedback, VPolicy};
use minimax_lr::stability::{closed_loop_certificate, closed_loop_certificate_with, detectability_check};
use minimax_lr::water::{build_water_spec, sweep_cost_vs_n, write_sweep_csv, WaterParams};
use minimax_lr::{DMatrix, DVector, Error, Horizon, ProblemSpec, Result};

#[derive(Debug, Parser)]
#[command(name = "minimax-lr", version, about = "Minimax linear-regulator synthesis for positive systems")]
pub struct Cli {
    /// Run data-parallel stages on one thread.
    #[arg(long, global = true)]
    pub sequential: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the standing hypotheses of a problem file.
    Validate { file: PathBuf },
    #[command(subcommand)]
    Solve(Solve),
    /// Stability, detectability and gain certificate for a controller.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        controller: PathBuf,
    },
    /// Simulate the closed loop and write the trajectory as CSV.
    Simulate(SimulateArgs),
    #[command(subcommand)]
    Gen(Gen),
    /// Emit the data behind a figure or worked example.
    Repro {
        target: ReproTarget,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Solve {
    /// Integrate the value ODE backward from the horizon.
    Finite {
        file: PathBuf,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Value iteration and/or the linear programs.
    Infinite {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Vi)]
        method: Method,
        /// Discretization rate for value iteration.
        #[arg(long)]
        h: Option<f64>,
        /// Write the value-iteration trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Vi,
    Lp,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Disturbance {
    None,
    Worst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReproTarget {
    Fig3,
    Fig4,
    Fig5,
    Example1,
    Example2,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub file: PathBuf,
    /// Static gain `K`; the optimal gain is used when omitted.
    #[arg(long)]
    pub controller: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Disturbance::None)]
    pub disturbance: Disturbance,
    #[arg(long = "T", default_value_t = 10.0)]
    pub t: f64,
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Keep every k-th sample in the CSV.
    #[arg(long, default_value_t = 1)]
    pub every: usize,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Gen {
    /// Line network of water reservoirs.
    Water(WaterArgs),
}

#[derive(Debug, Args)]
pub struct WaterArgs {
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 3.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10.0)]
    pub beta: f64,
    #[arg(long, default_value_t = 10.0)]
    pub zeta_u: f64,
    #[arg(long, default_value_t = 3.0)]
    pub zeta_v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho_s: f64,
    #[arg(long, default_value_t = 0.0)]
    pub rho_u: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho_v: f64,
    #[arg(long)]
    pub rain: bool,
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Finite horizon; infinite when omitted.
    #[arg(long = "T")]
    pub horizon: Option<f64>,
    /// Output path; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

impl WaterArgs {
    pub fn params(&self) -> WaterParams {
        WaterParams {
            n: self.n,
            alpha: self.alpha,
            beta: self.beta,
            zeta_u: self.zeta_u,
            zeta_v: self.zeta_v,
            rho_s: self.rho_s,
            rho_u: self.rho_u,
            rho_v: self.rho_v,
            rain: self.rain,
            gamma: self.gamma,
            horizon: self.horizon.map_or(Horizon::Infinite, Horizon::Finite),
        }
    }
}

/// What `main` should print and the process exit code.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub exit: i32,
}

impl Outcome {
    fn json(v: &Value) -> Self {
        Self {
            stdout: pretty(v),
            exit: 0,
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

pub fn exit_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Validation => 1,
        ErrorClass::Solve => 2,
        ErrorClass::Io => 3,
    }
}

/// Machine-readable error line for stderr.
pub fn error_json(err: &Error) -> String {
    let class = match err.class() {
        ErrorClass::Validation => "validation",
        ErrorClass::Solve => "solve",
        ErrorClass::Io => "io",
    };
    json!({ "error": err.kind(), "class": class, "message": err.to_string() }).to_string()
}

pub fn run(cli: Cli) -> Result<Outcome> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Validate { file } => {
            let report = validate_file(&file)?;
            Ok(Outcome {
                stdout: pretty(&serde_json::to_value(&report).expect("report serializes")),
                exit: if report.passed() { 0 } else { 1 },
            })
        }
        Command::Solve(Solve::Finite { file, steps, out_dir }) => {
            solve_finite(&ProblemSpec::load(&file)?, steps, &out_dir).map(|v| Outcome::json(&v))
        }
        Command::Solve(Solve::Infinite { file, method, h, trace }) => {
            solve_infinite(&ProblemSpec::load(&file)?, method, h, trace.as_deref(), exec).map(|v| Outcome::json(&v))
        }
        Command::Analyze { file, controller } => {
            analyze(&ProblemSpec::load(&file)?, &load_controller(&controller)?).map(|v| Outcome::json(&v))
        }
        Command::Simulate(args) => {
            let spec = ProblemSpec::load(&args.file)?;
            let k = args.controller.as_deref().map(load_controller).transpose()?;
            match &args.out {
                Some(path) => {
                    let summary = simulate_to(&spec, k.as_ref(), &args, create(path)?)?;
                    Ok(Outcome::json(&summary))
                }
                None => {
                    let mut buf = Vec::new();
                    simulate_to(&spec, k.as_ref(), &args, &mut buf)?;
                    Ok(Outcome {
                        stdout: String::from_utf8(buf).expect("CSV is UTF-8"),
                        exit: 0,
                    })
                }
            }
        }
        Command::Gen(Gen::Water(args)) => {
            let text = build_water_spec(&args.params())?.to_json();
            match &args.out {
                Some(path) => {
                    std::fs::write(path, &text)?;
                    Ok(Outcome::json(&json!({ "problem": path })))
                }
                None => Ok(Outcome { stdout: text, exit: 0 }),
            }
        }
        Command::Repro { target, out_dir } => {
            std::fs::create_dir_all(&out_dir)?;
            let v = match target {
                ReproTarget::Fig3 => repro_fig3(&out_dir)?,
                ReproTarget::Fig4 => repro_fig4(&out_dir)?,
                ReproTarget::Fig5 => repro_fig5(&out_dir, exec)?,
                ReproTarget::Example1 => repro_example1(&out_dir, exec)?,
                ReproTarget::Example2 => repro_example2(exec)?,
            };
            Ok(Outcome::json(&v))
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn validate_file(path: &Path) -> Result<minimax_lr::ValidationReport> {
    validate(&ProblemSpec::load(path)?)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ControllerFile {
    Bare(Vec<Vec<f64>>),
    Keyed {
        #[serde(rename = "K")]
        k: Vec<Vec<f64>>,
    },
}

/// Reads `K` from JSON, either as a list of rows or as `{"K": rows}`.
pub fn load_controller(path: &Path) -> Result<DMatrix<f64>> {
    let text = std::fs::read_to_string(path)?;
    let rows = match serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))? {
        ControllerFile::Bare(rows) | ControllerFile::Keyed { k: rows } => rows,
    };
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::DimensionMismatch("controller rows have different lengths".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

fn horizon_of(spec: &ProblemSpec) -> Result<f64> {
    match spec.horizon() {
        Horizon::Finite(t) => Ok(t),
        Horizon::Infinite => Err(Error::InvalidArgument("the problem has an infinite horizon".into())),
    }
}

pub fn solve_finite(spec: &ProblemSpec, steps: Option<usize>, out_dir: &Path) -> Result<Value> {
    let report = validate(spec)?;
    if !report.passed() {
        return Err(Error::ValidationFailed(report.messages.join("; ")));
    }
    let t = horizon_of(spec)?;
    let steps = steps.unwrap_or_else(|| default_steps(t));
    let traj = solve_hjb_ode(spec, steps)?;
    let sched = extract_gain_schedule(spec, &traj);
    let gamma = check_gamma_finite(spec, &traj)?;
    std::fs::create_dir_all(out_dir)?;
    let traj_path = out_dir.join("trajectory.csv");
    let gain_path = out_dir.join("gain_schedule.csv");
    traj.write_csv(create(&traj_path)?)?;
    sched.write_csv(create(&gain_path)?)?;
    let gamma_star: Vec<f64> = gamma.margin.iter().zip(spec.gamma().iter()).map(|(m, g)| g - m).collect();
    Ok(json!({
        "horizon": t,
        "steps": steps,
        "value": value_at(&traj, spec.x0().as_slice())?,
        "p0": traj.p0(),
        "trajectory_csv": traj_path,
        "gain_csv": gain_path,
        "gamma_star": gamma_star,
        "gamma_admissible": gamma.admissible,
        "switches": sched.switches().len(),
    }))
}

fn candidate_json(spec: &ProblemSpec, cand: &ControllerCandidate, p: &[f64]) -> Value {
    let cert = closed_loop_certificate_with(spec, &cand.k, Some(p));
    json!({
        "sigma": cand.sigma,
        "K": rows(&cand.k),
        "hurwitz": cand.hurwitz,
        "abscissa": cand.abscissa,
        "detectable": cert.as_ref().ok().map(|c| c.detectable),
        "certificate_error": cert.err().map(|e| e.to_string()),
    })
}

fn inf_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

pub fn solve_infinite(
    spec: &ProblemSpec,
    method: Method,
    h: Option<f64>,
    trace: Option<&Path>,
    exec: Execution,
) -> Result<Value> {
    let report = validate(spec)?;
    if !report.passed() {
        return Err(Error::ValidationFailed(report.messages.join("; ")));
    }
    let mut out = serde_json::Map::new();
    let mut p_vi = None;
    if method != Method::Lp {
        let opts = ViOptions {
            h,
            trace: trace.is_some(),
            ..ViOptions::default()
        };
        let vi = value_iteration(spec, &opts)?;
        if let Some(path) = trace {
            vi.write_trace_csv(create(path)?)?;
        }
        let candidates: Vec<Value> = if vi.converged() {
            extract_lp_controller(spec, &vi.p, None, exec)?
                .iter()
                .map(|c| candidate_json(spec, c, &vi.p))
                .collect()
        } else {
            Vec::new()
        };
        out.insert(
            "vi".into(),
            json!({
                "status": vi.status,
                "p": vi.p,
                "value": vi.value(spec.x0().as_slice()),
                "residual": vi.residual,
                "iterations": vi.iterations,
                "h": vi.h,
                "candidates": candidates,
            }),
        );
        p_vi = vi.converged().then_some(vi.p);
    }
    if method != Method::Vi {
        let lr = solve_lr(spec, exec)?;
        let candidates: Vec<Value> = lr.candidates.iter().map(|c| candidate_json(spec, c, &lr.primal.p)).collect();
        out.insert(
            "lp".into(),
            json!({
                "primal": lr.primal,
                "dual": lr.dual,
                "bellman_residual": lr.bellman_residual,
                "candidates": candidates,
            }),
        );
        if let Some(p) = &p_vi {
            if lr.primal.status == minimax_lr::lp::LpStatus::Optimal {
                let sum_vi: f64 = p.iter().sum();
                out.insert(
                    "agreement".into(),
                    json!({
                        "sum_gap": (sum_vi - lr.primal.objective).abs(),
                        "max_gap": inf_dist(p, &lr.primal.p),
                    }),
                );
            }
        }
    }
    Ok(Value::Object(out))
}

pub fn analyze(spec: &ProblemSpec, k: &DMatrix<f64>) -> Result<Value> {
    let report = validate(spec)?;
    if !report.passed() {
        return Err(Error::ValidationFailed(report.messages.join("; ")));
    }
    let cert = closed_loop_certificate(spec, k)?;
    let gain = min_l1_gain(spec)?;
    Ok(json!({ "certificate": cert, "gain": gain }))
}

fn simulate_to<W: Write>(spec: &ProblemSpec, k: Option<&DMatrix<f64>>, args: &SimulateArgs, w: W) -> Result<Value> {
    let report = validate(spec)?;
    if !report.passed() {
        return Err(Error::ValidationFailed(report.messages.join("; ")));
    }
    let worst = args.disturbance == Disturbance::Worst;
    let traj = match spec.horizon() {
        Horizon::Finite(t) if k.is_none() => {
            let steps = args.steps.max(default_steps(t));
            let vt = solve_hjb_ode(spec, steps)?;
            let sched = extract_gain_schedule(spec, &vt);
            let signs = if worst { worst_case_schedule(spec, &vt)? } else { Vec::new() };
            let v = if worst { VPolicy::Scheduled(&signs) } else { VPolicy::None };
            simulate(spec, Feedback::Scheduled(&sched), v, t, steps)?
        }
        _ => {
            let needs_p = k.is_none() || worst;
            let p = if needs_p {
                let vi = value_iteration(spec, &ViOptions::default())?;
                if !vi.converged() {
                    return Err(Error::SolveFailed(format!("value iteration ended {:?}", vi.status)));
                }
                Some(vi.p)
            } else {
                None
            };
            let gain = match k {
                Some(k) => {
                    spec.check_gain_bounds(k)?;
                    k.clone()
                }
                None => extract_static_gain(spec, p.as_deref().expect("value computed")).k,
            };
            let signs = match (&p, worst) {
                (Some(p), true) => worst_case_policies(spec, p)?.sigma_v,
                _ => Vec::new(),
            };
            let v = if worst { VPolicy::Fixed(&signs) } else { VPolicy::None };
            simulate(spec, Feedback::Static(&gain), v, args.t, args.steps)?
        }
    };
    traj.write_csv(w, args.every)?;
    Ok(json!({
        "csv": args.out,
        "final_time": traj.t.last(),
        "cost": traj.final_cost(),
        "final_state": traj.x.last(),
    }))
}

/// Shape checks for figure data.
pub mod shape {
    /// `y` never drops by more than `tol`.
    pub fn nondecreasing(y: &[f64], tol: f64) -> bool {
        y.windows(2).all(|w| w[1] >= w[0] - tol)
    }

    /// Chord slopes of `(x, y)` never increase by more than `tol`.
    pub fn concave(x: &[f64], y: &[f64], tol: f64) -> bool {
        let slopes: Vec<f64> = x.windows(2).zip(y.windows(2)).map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0])).collect();
        slopes.windows(2).all(|s| s[1] <= s[0] + tol)
    }
}

pub const FIG3_HORIZON: f64 = 10.0;
pub const FIG4_SPAN: f64 = 200.0;
pub const FIG4_SAMPLES: usize = 400;

pub fn fig5_sizes() -> Vec<usize> {
    std::iter::once(2).chain((10..=200).step_by(10)).collect()
}

/// `p(t)'x0` against time-to-go for the default network at `T = 10`.
pub fn repro_fig3(out_dir: &Path) -> Result<Value> {
    let params = WaterParams {
        horizon: Horizon::Finite(FIG3_HORIZON),
        ..WaterParams::default()
    };
    let spec = build_water_spec(&params)?;
    let traj = solve_hjb_ode(&spec, default_steps(FIG3_HORIZON))?;
    let mut curve: Vec<(f64, f64)> = traj
        .cost_curve(spec.x0().as_slice())
        .into_iter()
        .map(|(t, c)| (FIG3_HORIZON - t, c))
        .collect();
    curve.reverse();
    let path = out_dir.join("fig3.csv");
    let header = ["time_to_go", "cost"].map(String::from);
    save_table(&path, &header, curve.iter().map(|&(tau, c)| vec![tau, c]))?;
    let costs: Vec<f64> = curve.iter().map(|c| c.1).collect();
    Ok(json!({
        "csv": path,
        "n": params.n,
        "horizon": FIG3_HORIZON,
        "final_cost": costs.last(),
        "monotone": shape::nondecreasing(&costs, 1e-12),
    }))
}

fn write_states(path: &Path, dt: f64, states: &[DVector<f64>]) -> Result<()> {
    let header = [vec!["t".to_string()], numbered("x", states[0].len())].concat();
    let rows = states.iter().enumerate().map(|(k, x)| {
        let mut row = vec![k as f64 * dt];
        row.extend(x.iter().copied());
        row
    });
    save_table(path, &header, rows)
}

fn propagate(m: &DMatrix<f64>, x0: &DVector<f64>, dt: f64, samples: usize) -> Vec<DVector<f64>> {
    let step = (m * dt).exp();
    let mut out = Vec::with_capacity(samples + 1);
    out.push(x0.clone());
    for _ in 0..samples {
        let next = &step * out.last().expect("nonempty");
        out.push(next);
    }
    out
}

/// `x(t) = e^{Ãt} x0` for the open loop, the disturbed open loop
/// `A + |H|G` and the disturbed closed loop `A + |H|G - BK`.
pub fn repro_fig4(out_dir: &Path) -> Result<Value> {
    let spec = build_water_spec(&WaterParams::default())?;
    let vi = value_iteration(&spec, &ViOptions::default())?;
    if !vi.converged() {
        return Err(Error::SolveFailed(format!("value iteration ended {:?}", vi.status)));
    }
    let k = extract_static_gain(&spec, &vi.p).k;
    let hg = spec.h().map(f64::abs) * spec.g();
    let cases = [
        ("open_loop", spec.a().clone()),
        ("disturbed", spec.a() + &hg),
        ("closed_loop", spec.a() + &hg - spec.b() * &k),
    ];
    let dt = FIG4_SPAN / FIG4_SAMPLES as f64;
    let mut files = serde_json::Map::new();
    for (name, m) in cases {
        let states = propagate(&m, spec.x0(), dt, FIG4_SAMPLES);
        let path = out_dir.join(format!("fig4_{name}.csv"));
        write_states(&path, dt, &states)?;
        files.insert(
            name.into(),
            json!({
                "csv": path,
                "abscissa": spectral_abscissa(&m)?,
                "final_max": states.last().expect("nonempty").max(),
            }),
        );
    }
    Ok(Value::Object(files))
}

/// Infinite-horizon cost against network size, `n = 2, 10, 20, …, 200`.
pub fn repro_fig5(out_dir: &Path, exec: Execution) -> Result<Value> {
    let started = Instant::now();
    let ns = fig5_sizes();
    let rows = sweep_cost_vs_n(&WaterParams::default(), &ns, exec);
    let path = out_dir.join("fig5.csv");
    write_sweep_csv(create(&path)?, &rows)?;
    let failed: Vec<usize> = rows.iter().filter(|r| r.cost.is_none()).map(|r| r.n).collect();
    let xs: Vec<f64> = rows.iter().filter(|r| r.cost.is_some()).map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().filter_map(|r| r.cost).collect();
    Ok(json!({
        "csv": path,
        "sizes": ns,
        "costs": ys,
        "failed": failed,
        "monotone": shape::nondecreasing(&ys, 1e-9),
        "concave": shape::concave(&xs, &ys, 1e-9),
        "seconds": started.elapsed().as_secs_f64(),
    }))
}

/// Three-state tie example: value trajectory, error against the closed
/// form and both bang-bang controllers.
pub fn repro_example1(out_dir: &Path, exec: Execution) -> Result<Value> {
    let t = 10.0;
    let spec = tie_example(Horizon::Finite(t));
    let traj = solve_hjb_ode(&spec, 10_000)?;
    let max_error = traj
        .grid
        .iter()
        .zip(&traj.p)
        .flat_map(|(&tk, p)| p.iter().map(move |&x| (x - (1.0 - (-(t - tk)).exp())).abs()))
        .fold(0.0, f64::max);
    let path = out_dir.join("example1_trajectory.csv");
    traj.write_csv(create(&path)?)?;
    let sched = extract_gain_schedule(&spec, &traj);
    let path_gain = out_dir.join("example1_gain_schedule.csv");
    sched.write_csv(create(&path_gain)?)?;
    let inf = spec.with_horizon(Horizon::Infinite);
    let lr = solve_lr(&inf, exec)?;
    let controllers: Vec<Value> = lr
        .candidates
        .iter()
        .map(|c| {
            let closed = inf.a() - inf.b() * &c.k;
            Ok(json!({
                "sigma": c.sigma,
                "K": rows(&c.k),
                "closed_loop": rows(&closed),
                "hurwitz": is_hurwitz(&closed)?.hurwitz,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(json!({
        "p0": traj.p0(),
        "value": value_at(&traj, &[1.0, 1.0, 1.0])?,
        "max_error": max_error,
        "trajectory_csv": path,
        "gain_csv": path_gain,
        "lp_p": lr.primal.p,
        "controllers": controllers,
    }))
}

/// Three-state example with an unstable, unobserved state.
pub fn repro_example2(exec: Execution) -> Result<Value> {
    let spec = undetectable_example();
    let vi = value_iteration(&spec, &ViOptions::default())?;
    let lr = solve_lr(&spec, exec)?;
    let det = detectability_check(spec.s().as_slice(), spec.a())?;
    let lemma = lemma1_equivalence_check(&spec, exec)?;
    let gain = extract_static_gain(&spec, &vi.p);
    Ok(json!({
        "p": vi.p,
        "vi_status": vi.status,
        "residual": vi.residual,
        "primal_status": lr.primal.status,
        "unbounded_entries": lr.primal.unbounded_entries,
        "dual_status": lr.dual.status,
        "detectable": det.detectable,
        "witnesses": det.witnesses,
        "static_gain": { "sigma": gain.sigma, "ties": gain.ties, "K": rows(&gain.k) },
        "lemma1": lemma,
    }))
}
