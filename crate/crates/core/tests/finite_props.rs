use minimax_lr::finite::{
    check_gamma_finite, default_steps, extract_gain_schedule, solve_hjb_ode, value_at, ValueTrajectory,
};
use minimax_lr::problem::examples::{scalar_example, tie_example};
use minimax_lr::suite::{random_instance, Shape};
use minimax_lr::{DMatrix, DVector, Horizon, ProblemSpec};
use proptest::prelude::*;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `s + A'p - E'|r + B'p| + G'|H'p - δ|`, written out independently.
fn hjb_rhs(spec: &ProblemSpec, p: &[f64]) -> Vec<f64> {
    let p = DVector::from_column_slice(p);
    let arg_u = spec.r() + spec.b().transpose() * &p;
    let arg_v = spec.h().transpose() * &p - spec.delta();
    let out = spec.s() + spec.a().transpose() * &p - spec.e().transpose() * arg_u.abs()
        + spec.g().transpose() * arg_v.abs();
    out.iter().copied().collect()
}

fn lipschitz(spec: &ProblemSpec) -> f64 {
    let norm = |m: &DMatrix<f64>| {
        (0..m.nrows()).map(|i| m.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    };
    norm(spec.a()) + norm(spec.b()) * norm(spec.e()) + norm(spec.h()) * norm(spec.g())
}

/// Centered-difference residual at grid points away from sign switches,
/// scaled by `(1 + ‖p‖∞)`.
fn centered_residual(spec: &ProblemSpec, traj: &ValueTrajectory) -> f64 {
    let sched = extract_gain_schedule(spec, traj);
    let near_switch = |k: usize| sched.switches().iter().any(|&s| s + 2 >= k && k + 2 >= s);
    let mut worst: f64 = 0.0;
    for k in 1..traj.p.len() - 1 {
        if near_switch(k) {
            continue;
        }
        let f = hjb_rhs(spec, &traj.p[k]);
        let res: Vec<f64> = (0..spec.n())
            .map(|i| (traj.p[k + 1][i] - traj.p[k - 1][i]) / (2.0 * traj.step) + f[i])
            .collect();
        worst = worst.max(inf_norm(&res) / (1.0 + inf_norm(&traj.p[k])));
    }
    worst
}

#[test]
fn tie_example_matches_closed_form() {
    let spec = tie_example(Horizon::Finite(10.0));
    let traj = solve_hjb_ode(&spec, 10_000).unwrap();
    let err = traj
        .grid
        .iter()
        .zip(&traj.p)
        .flat_map(|(&t, p)| p.iter().map(move |&x| (x - (1.0 - (-(10.0 - t)).exp())).abs()))
        .fold(0.0, f64::max);
    assert!(err <= 1e-6, "max error {err}");
    let value = value_at(&traj, &[1.0, 1.0, 1.0]).unwrap();
    assert!((value - 3.0 * (1.0 - (-10.0f64).exp())).abs() <= 1e-6);
}

#[test]
fn tie_example_schedule() {
    let spec = tie_example(Horizon::Finite(10.0));
    let traj = solve_hjb_ode(&spec, 10_000).unwrap();
    let sched = extract_gain_schedule(&spec, &traj);
    let last = traj.grid.len() - 1;
    for k in 0..last {
        assert_eq!(sched.sigma[k], vec![1, 1]);
        assert!(sched.ties[k][0]);
        assert!(!sched.ties[k][1]);
    }
    assert!(sched.switches().is_empty());
}

#[test]
fn scalar_closed_form_and_gamma_margin() {
    let t = 5.0;
    let base = scalar_example(Horizon::Finite(t));
    let spec = ProblemSpec::builder(
        base.a().clone(),
        base.b().clone(),
        base.e().clone(),
        base.s().clone(),
        base.r().clone(),
    )
    .unconstrained_disturbance(DMatrix::from_element(1, 1, 1.0), DVector::from_element(1, 2.0))
    .horizon(Horizon::Finite(t))
    .build()
    .unwrap();
    let traj = solve_hjb_ode(&spec, default_steps(t)).unwrap();
    for (&tk, p) in traj.grid.iter().zip(&traj.p) {
        assert!((p[0] - (1.0 - (-2.0 * (t - tk)).exp())).abs() <= 1e-9);
    }
    let check = check_gamma_finite(&spec, &traj).unwrap();
    assert!(check.admissible);
    assert!((check.margin[0] - (2.0 - (1.0 - (-2.0 * t).exp()))).abs() <= 1e-9);
}

#[test]
fn step_halving_is_fourth_order() {
    let spec = scalar_example(Horizon::Finite(5.0));
    let p0 = |n| solve_hjb_ode(&spec, n).unwrap().p0()[0];
    let (a, b, c) = (p0(20), p0(40), p0(80));
    let ratio = (a - b).abs() / (b - c).abs();
    assert!((12.0..=20.0).contains(&ratio), "ratio {ratio}");
    let tie = tie_example(Horizon::Finite(10.0));
    let q0 = |n| solve_hjb_ode(&tie, n).unwrap().p0()[0];
    let step: f64 = 10.0 / 200.0;
    let diff = (q0(200) - q0(400)).abs();
    // C = max |p^(5)| / 120 over the run, 1/120 for e^{-τ}.
    assert!(diff <= step.powi(4) / 120.0 * 16.0 / 15.0 * 10.0, "diff {diff}");
}

#[test]
fn centered_difference_on_examples() {
    for spec in [tie_example(Horizon::Finite(10.0)), scalar_example(Horizon::Finite(5.0))] {
        let traj = solve_hjb_ode(&spec, 10_000).unwrap();
        let res = centered_residual(&spec, &traj);
        assert!(res <= 10.0 * traj.step * traj.step, "residual {res}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn random_instances_satisfy_the_ode(seed in any::<u64>(), c in 0usize..=2) {
        let shape = Shape { max_n: 5, max_m: 2, max_c: c };
        let spec = random_instance(seed, shape, false).with_horizon(Horizon::Finite(1.0));
        let traj = solve_hjb_ode(&spec, 4_000).unwrap();
        let l = lipschitz(&spec).max(1.0);
        let res = centered_residual(&spec, &traj);
        prop_assert!(res <= 10.0 * traj.step * traj.step * l.powi(3), "residual {} bound {}", res, 10.0 * traj.step * traj.step * l.powi(3));
        for p in &traj.p {
            prop_assert!(p.iter().all(|&x| x >= -1e-12));
        }
    }

    #[test]
    fn value_grows_with_time_to_go(seed in any::<u64>(), c in 0usize..=2) {
        let shape = Shape { max_n: 5, max_m: 2, max_c: c };
        let base = random_instance(seed, shape, seed % 3 == 0);
        let short = solve_hjb_ode(&base.with_horizon(Horizon::Finite(1.0)), 2_000).unwrap();
        let long = solve_hjb_ode(&base.with_horizon(Horizon::Finite(2.0)), 4_000).unwrap();
        // Same time-to-go τ sits at t = T - τ on each grid.
        for (k, ps) in short.p.iter().enumerate() {
            let pl = &long.p[k + 2_000];
            for (a, b) in pl.iter().zip(ps) {
                prop_assert!((a - b).abs() <= 1e-9 * (1.0 + b.abs()));
            }
        }
        for (a, b) in long.p0().iter().zip(short.p0()) {
            prop_assert!(*a >= b - 1e-9);
        }
    }

    #[test]
    fn zero_cost_gives_zero_value(seed in any::<u64>()) {
        let spec = random_instance(seed, Shape::default(), false);
        let zero = ProblemSpec::builder(
            spec.a().clone(),
            spec.b().clone(),
            spec.e().clone(),
            DVector::zeros(spec.n()),
            DVector::zeros(spec.m()),
        )
        .horizon(Horizon::Finite(2.0))
        .build()
        .unwrap();
        let traj = solve_hjb_ode(&zero, 200).unwrap();
        prop_assert!(traj.p.iter().all(|p| p.iter().all(|&x| x == 0.0)));
    }
}
