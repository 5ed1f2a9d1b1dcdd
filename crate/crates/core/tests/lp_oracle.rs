use minimax_lr::lp::{solve_lp, LpModel, LpStatus, Objective, RowSense};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

const UPPER: f64 = 6.0;

#[derive(Debug, Clone)]
struct Instance {
    objective: Objective,
    cost: Vec<f64>,
    rows: Vec<Vec<f64>>,
    senses: Vec<RowSense>,
    rhs: Vec<f64>,
}

fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(n, m)| {
        (
            any::<bool>(),
            prop::collection::vec(-5i32..=5, n),
            prop::collection::vec(prop::collection::vec(-5i32..=5, n), m),
            prop::collection::vec(0u8..3, m),
            prop::collection::vec(0i32..=3, n),
            prop::collection::vec(0i32..=4, m),
        )
            .prop_map(|(max, cost, rows, senses, feas, slack)| {
                let senses: Vec<RowSense> = senses
                    .into_iter()
                    .map(|s| match s {
                        0 => RowSense::Le,
                        1 => RowSense::Ge,
                        _ => RowSense::Eq,
                    })
                    .collect();
                let rows: Vec<Vec<f64>> = rows.into_iter().map(|r| r.into_iter().map(f64::from).collect()).collect();
                let rhs = rows
                    .iter()
                    .zip(&senses)
                    .zip(&slack)
                    .map(|((row, sense), &k)| {
                        let ax: f64 = row.iter().zip(&feas).map(|(a, &x)| a * x as f64).sum();
                        match sense {
                            RowSense::Le => ax + k as f64,
                            RowSense::Ge => ax - k as f64,
                            RowSense::Eq => ax,
                        }
                    })
                    .collect();
                Instance {
                    objective: if max { Objective::Maximize } else { Objective::Minimize },
                    cost: cost.into_iter().map(f64::from).collect(),
                    rows,
                    senses,
                    rhs,
                }
            })
    })
}

fn model(inst: &Instance) -> LpModel {
    let mut lp = LpModel::new(inst.objective, inst.cost.clone());
    for j in 0..inst.cost.len() {
        lp.set_bounds(j, 0.0, UPPER);
    }
    for ((row, sense), &b) in inst.rows.iter().zip(&inst.senses).zip(&inst.rhs) {
        lp.add_row(row.clone(), *sense, b);
    }
    lp
}

/// Best objective over all basic feasible points of the box-bounded LP.
fn vertex_oracle(inst: &Instance) -> f64 {
    let n = inst.cost.len();
    // Candidate active constraints: (coefficients, rhs).
    let mut cons: Vec<(Vec<f64>, f64)> = Vec::new();
    for (row, &b) in inst.rows.iter().zip(&inst.rhs) {
        cons.push((row.clone(), b));
    }
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cons.push((e.clone(), 0.0));
        cons.push((e, UPPER));
    }
    let feasible = |x: &[f64]| {
        let rows_ok = inst.rows.iter().zip(&inst.senses).zip(&inst.rhs).all(|((row, sense), &b)| {
            let ax: f64 = row.iter().zip(x).map(|(a, x)| a * x).sum();
            match sense {
                RowSense::Le => ax <= b + 1e-9,
                RowSense::Ge => ax >= b - 1e-9,
                RowSense::Eq => (ax - b).abs() <= 1e-9,
            }
        });
        rows_ok && x.iter().all(|&v| (-1e-9..=UPPER + 1e-9).contains(&v))
    };
    let sign = if inst.objective == Objective::Maximize { 1.0 } else { -1.0 };
    let mut best = f64::NEG_INFINITY;
    let total = cons.len();
    let mut pick = Vec::with_capacity(n);
    fn rec(
        start: usize,
        total: usize,
        n: usize,
        pick: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if pick.len() == n {
            visit(pick);
            return;
        }
        for k in start..total {
            pick.push(k);
            rec(k + 1, total, n, pick, visit);
            pick.pop();
        }
    }
    let mut visit = |idx: &[usize]| {
        let a = DMatrix::from_fn(n, n, |i, j| cons[idx[i]].0[j]);
        let b = DVector::from_fn(n, |i, _| cons[idx[i]].1);
        let lu = a.lu();
        if lu.determinant().abs() < 1e-9 {
            return;
        }
        let Some(x) = lu.solve(&b) else { return };
        if feasible(x.as_slice()) {
            let obj: f64 = inst.cost.iter().zip(x.iter()).map(|(c, x)| c * x).sum();
            best = best.max(sign * obj);
        }
    };
    rec(0, total, n, &mut pick, &mut visit);
    sign * best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn simplex_matches_vertex_enumeration(inst in instance()) {
        let lp = model(&inst);
        let sol = solve_lp(&lp).unwrap();
        prop_assert_eq!(sol.status, LpStatus::Optimal);
        let oracle = vertex_oracle(&inst);
        prop_assert!((sol.objective - oracle).abs() <= 1e-8, "simplex {} oracle {}", sol.objective, oracle);
        prop_assert!(sol.primal_residual(&lp) <= 1e-9);
        prop_assert!((sol.objective - sol.dual_objective).abs() <= 1e-9 * (1.0 + sol.objective.abs()));
    }

    #[test]
    fn row_prices_have_the_right_sign(inst in instance()) {
        let sol = solve_lp(&model(&inst)).unwrap();
        // ∂obj/∂b: loosening a <= row never hurts the objective.
        let toward = if inst.objective == Objective::Maximize { 1.0 } else { -1.0 };
        for (y, sense) in sol.duals.iter().zip(&inst.senses) {
            match sense {
                RowSense::Le => prop_assert!(toward * y >= -1e-9),
                RowSense::Ge => prop_assert!(toward * y <= 1e-9),
                RowSense::Eq => {}
            }
        }
    }
}

#[test]
fn infeasible_certificate_separates() {
    // x1 + x2 <= 1 and x1 + x2 >= 3 over x >= 0.
    let mut lp = LpModel::new(Objective::Minimize, vec![0.0, 0.0]);
    lp.add_row(vec![1.0, 1.0], RowSense::Le, 1.0);
    lp.add_row(vec![1.0, 1.0], RowSense::Ge, 3.0);
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Infeasible);
    let y = sol.farkas.unwrap();
    assert_eq!(y.len(), 2);
    assert!(y.iter().any(|v| v.abs() > 1e-12));
}

#[test]
fn unbounded_ray_is_improving() {
    // max x1 + x2 with x1 - x2 <= 1.
    let mut lp = LpModel::new(Objective::Maximize, vec![1.0, 1.0]);
    lp.add_row(vec![1.0, -1.0], RowSense::Le, 1.0);
    let sol = solve_lp(&lp).unwrap();
    assert_eq!(sol.status, LpStatus::Unbounded);
    let d = sol.ray.unwrap();
    assert!(d[0] + d[1] > 0.0);
    assert!(d[0] - d[1] <= 1e-12);
    assert!(d.iter().all(|&v| v >= -1e-12));
}
