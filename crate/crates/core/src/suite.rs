//! Seeded random instances on an integer grid, used to cross-check the
//! solution methods against each other.
//!
//! Every generated instance passes validation with a strictly positive cost
//! margin `s - E'|r| + G'|δ| >= 1`, so every admissible closed loop is
//! detectable.

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::exec::{self, Execution};
use crate::lr_lp::hurwitz_on_grid;
use crate::problem::ProblemSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub max_n: usize,
    pub max_m: usize,
    /// Bounded-disturbance channels; 0 gives a pure regulator.
    pub max_c: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Self {
            max_n: 8,
            max_m: 3,
            max_c: 0,
        }
    }
}

fn int(rng: &mut StdRng, lo: i32, hi: i32) -> f64 {
    rng.random_range(lo..=hi) as f64
}

/// One random instance. With `unstable_state = true` a state with a
/// nonnegative diagonal entry is cut off from every input, so no controller
/// can stabilize it.
pub fn random_instance(seed: u64, shape: Shape, unstable_state: bool) -> ProblemSpec {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(2..=shape.max_n.max(2));
    let m = rng.random_range(1..=shape.max_m.max(1));
    let c = if shape.max_c == 0 { 0 } else { rng.random_range(1..=shape.max_c) };

    let mut e = DMatrix::from_fn(m, n, |_, _| int(&mut rng, 0, 2));
    for i in 0..m {
        if e.row(i).iter().all(|&x| x == 0.0) {
            let j = rng.random_range(0..n);
            e[(i, j)] = int(&mut rng, 1, 2);
        }
    }
    let mut b = DMatrix::from_fn(n, m, |_, _| int(&mut rng, -2, 2));
    let cut = unstable_state.then(|| rng.random_range(0..n));
    if let Some(k) = cut {
        b.row_mut(k).fill(0.0);
    }
    let h = DMatrix::from_fn(n, c, |_, _| int(&mut rng, -1, 1));
    let g = DMatrix::from_fn(c, n, |_, _| int(&mut rng, 0, 1) * 0.5);

    let coupling = b.map(f64::abs) * &e + h.map(f64::abs) * &g;
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = if i == j {
                int(&mut rng, -8, 1)
            } else {
                coupling[(i, j)] + int(&mut rng, 0, 2)
            };
        }
    }
    if let Some(k) = cut {
        a[(k, k)] = int(&mut rng, 0, 2);
    }
    let r = DVector::from_fn(m, |_, _| int(&mut rng, -2, 2));
    let delta = DVector::from_fn(c, |_, _| int(&mut rng, 0, 2));
    let base = e.transpose() * r.map(f64::abs);
    let s = DVector::from_fn(n, |i, _| base[i] + int(&mut rng, 1, 3));
    let mut builder = ProblemSpec::builder(a, b, e, s, r);
    if c > 0 {
        builder = builder.bounded_disturbance(h, g, delta);
    }
    builder.build().expect("generated shapes are consistent")
}

/// The first `count` seeds from `seed` onward whose instance admits a
/// Hurwitz `A - BDE` on the sign grid.
pub fn stabilizable_suite(count: usize, seed: u64, shape: Shape, exec: Execution) -> Vec<(u64, ProblemSpec)> {
    let mut out = Vec::with_capacity(count);
    let mut next = seed;
    while out.len() < count {
        let seeds: Vec<u64> = (next..next + 4 * count as u64).collect();
        next += 4 * count as u64;
        let found = exec::map(exec, &seeds, |&sd| {
            let spec = random_instance(sd, shape, false);
            matches!(hurwitz_on_grid(&spec, Execution::Sequential), Ok(Some(_))).then_some((sd, spec))
        });
        out.extend(found.into_iter().flatten().take(count - out.len()));
    }
    out
}

/// Instances with an uncontrollable state that is not asymptotically stable.
pub fn unstabilizable_suite(count: usize, seed: u64, shape: Shape) -> Vec<(u64, ProblemSpec)> {
    (seed..seed + count as u64)
        .map(|sd| (sd, random_instance(sd, shape, true)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::validate;

    #[test]
    fn instances_validate_and_repeat() {
        for sd in 0..40 {
            let spec = random_instance(sd, Shape::default(), sd % 2 == 0);
            assert!(validate(&spec).unwrap().passed(), "seed {sd}");
            assert!(spec.cost_margin().iter().all(|&x| x >= 1.0));
            let again = random_instance(sd, Shape::default(), sd % 2 == 0);
            assert_eq!(spec.a(), again.a());
        }
        let spec = random_instance(3, Shape { max_c: 2, ..Shape::default() }, false);
        assert!(spec.c() >= 1);
        assert!(validate(&spec).unwrap().passed());
    }

    #[test]
    fn suites_have_requested_size() {
        let s = stabilizable_suite(5, 0, Shape::default(), Execution::Sequential);
        assert_eq!(s.len(), 5);
        let p = stabilizable_suite(5, 0, Shape::default(), Execution::Parallel);
        let seeds: Vec<u64> = s.iter().map(|x| x.0).collect();
        assert_eq!(seeds, p.iter().map(|x| x.0).collect::<Vec<_>>());
        assert_eq!(unstabilizable_suite(3, 7, Shape::default()).len(), 3);
    }
}
