use nalgebra::linalg::Schur;
use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use super::{clean_metzler, perron_pair, require_metzler, scale_of, EigenPair};
use crate::error::{Error, Result};
use crate::tol;

const INVERSE_STEPS: usize = 8;
/// Real eigenvalues closer than this (relative) are treated as repeated.
const CLUSTER: f64 = 1e-6;

/// All eigenpairs `(λ, v)` with `λ >= floor - tol_eig` and `v >= 0`.
///
/// Eigenvalues come from a real Schur decomposition; each real candidate
/// gets an eigenvector by inverse iteration and a sign-uniformity test.
/// Repeated or defective candidates switch to [`structural_eigenpairs`],
/// which enumerates the extreme nonnegative eigenvectors exactly.
pub fn nonneg_eigenpairs(m: &DMatrix<f64>, floor: f64) -> Result<Vec<EigenPair>> {
    match spectral_route(m, floor) {
        Err(Error::DefectiveEigenvalue { .. }) => structural_eigenpairs(m, floor),
        other => other,
    }
}

fn spectral_route(m: &DMatrix<f64>, floor: f64) -> Result<Vec<EigenPair>> {
    require_metzler(m)?;
    let n = m.nrows();
    let m = clean_metzler(m);
    let scale = scale_of(&m);
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 30 * n.max(1)).ok_or(Error::NoConvergence {
        iterations: 30 * n,
        estimate: f64::NAN,
        gap: f64::NAN,
    })?;
    let eigs = schur.complex_eigenvalues();
    let cut = floor - tol::EIG;
    let mut real: Vec<f64> = eigs
        .iter()
        .filter(|z| z.im.abs() <= CLUSTER * scale)
        .map(|z| z.re)
        .filter(|&re| re >= cut - CLUSTER * scale)
        .collect();
    real.sort_by(|a, b| b.total_cmp(a));
    for w in real.windows(2) {
        if w[0] - w[1] <= CLUSTER * scale {
            return Err(Error::DefectiveEigenvalue { lambda: w[0] });
        }
    }
    let mut out = Vec::new();
    for lambda in real {
        let (lambda, v) = inverse_iteration(&m, lambda, scale)?;
        if lambda < cut {
            continue;
        }
        if let Some(v) = sign_uniform(v) {
            out.push(EigenPair::new(&m, lambda, v));
        }
    }
    Ok(out)
}

fn inverse_iteration(m: &DMatrix<f64>, lambda: f64, scale: f64) -> Result<(f64, Vec<f64>)> {
    let n = m.nrows();
    let mu = lambda + 1e-10 * scale;
    let lu = (m - DMatrix::identity(n, n) * mu).lu();
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.1 * ((i * 7919) % 13) as f64 / 13.0);
    for _ in 0..INVERSE_STEPS {
        let Some(y) = lu.solve(&v) else {
            return Err(Error::DefectiveEigenvalue { lambda });
        };
        let s = y.amax();
        if !s.is_finite() || s == 0.0 {
            return Err(Error::DefectiveEigenvalue { lambda });
        }
        v = y / s;
    }
    let mv = m * &v;
    let lam = v.dot(&mv) / v.dot(&v);
    let res = (&mv - &v * lam).amax();
    if res > tol::EIG * scale {
        return Err(Error::DefectiveEigenvalue { lambda });
    }
    Ok((lam, v.iter().copied().collect()))
}

/// Max-norm normalization with a global sign flip; `None` unless every
/// entry is `>= -tol_eig` afterwards. Small negatives are clamped to 0.
fn sign_uniform(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let peak = v.iter().fold(0.0_f64, |acc, &x| if x.abs() > acc.abs() { x } else { acc });
    if peak == 0.0 {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= peak);
    if v.iter().any(|&x| x < -tol::EIG) {
        return None;
    }
    v.iter_mut().for_each(|x| *x = x.max(0.0));
    Some(v)
}

/// Nonnegative eigenvectors from the Frobenius normal form.
///
/// Classes are the strongly connected components of the graph with an edge
/// `i -> j` whenever `M_ij > 0`. A class `C` carries a nonnegative
/// eigenvector with eigenvalue `ρ_C` (the Perron root of `M_CC`) exactly
/// when `ρ_C > ρ_D` for every other class `D` with a path into `C`; its
/// support is `C` plus those classes.
pub fn structural_eigenpairs(m: &DMatrix<f64>, floor: f64) -> Result<Vec<EigenPair>> {
    require_metzler(m)?;
    let n = m.nrows();
    let m = clean_metzler(m);
    let scale = scale_of(&m);
    let sep = tol::EIG * scale;

    let classes = classes(&m);
    let k = classes.len();
    let mut class_of = vec![0; n];
    for (c, members) in classes.iter().enumerate() {
        for &i in members {
            class_of[i] = c;
        }
    }
    let mut rho = Vec::with_capacity(k);
    let mut perron = Vec::with_capacity(k);
    for members in &classes {
        let sub = submatrix(&m, members, members);
        let pair = perron_pair(&sub)?;
        rho.push(pair.lambda);
        perron.push(pair.v);
    }
    // upstream[c][d]: class d has a path into class c.
    let mut upstream = vec![vec![false; k]; k];
    for c in 0..k {
        let mut stack = vec![c];
        while let Some(t) = stack.pop() {
            for d in 0..k {
                if d != c && !upstream[c][d] && edge_between(&m, &classes[d], &classes[t]) {
                    upstream[c][d] = true;
                    stack.push(d);
                }
            }
        }
    }

    let mut out = Vec::new();
    for c in 0..k {
        let lambda = rho[c];
        if lambda < floor - tol::EIG {
            continue;
        }
        if (0..k).any(|d| upstream[c][d] && rho[d] >= lambda - sep) {
            continue;
        }
        let mut v = vec![0.0; n];
        for (pos, &i) in classes[c].iter().enumerate() {
            v[i] = perron[c][pos];
        }
        // Upstream classes come after `c` in the Tarjan order, downstream
        // neighbours before them, so a forward sweep sees solved inputs.
        for d in 0..k {
            if !upstream[c][d] {
                continue;
            }
            let members = &classes[d];
            let rhs = DVector::from_fn(members.len(), |row, _| {
                let i = members[row];
                (0..n)
                    .filter(|&j| class_of[j] != d)
                    .map(|j| m[(i, j)] * v[j])
                    .sum::<f64>()
            });
            let mdd = submatrix(&m, members, members);
            let shifted = DMatrix::identity(members.len(), members.len()) * lambda - mdd;
            let sol = shifted
                .lu()
                .solve(&rhs)
                .ok_or(Error::DefectiveEigenvalue { lambda })?;
            for (row, &i) in members.iter().enumerate() {
                v[i] = sol[row].max(0.0);
            }
        }
        out.push(EigenPair::new(&m, lambda, v));
    }
    out.sort_by(|a, b| b.lambda.total_cmp(&a.lambda));
    Ok(out)
}

/// Strongly connected classes of the off-diagonal pattern, in reverse
/// topological order: a class appears before every class with an edge
/// into it.
pub(crate) fn classes(m: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = m.nrows();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, 0);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if i != j && m[(i, j)] > 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    tarjan_scc(&graph)
        .into_iter()
        .map(|c| {
            let mut c: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
            c.sort_unstable();
            c
        })
        .collect()
}

pub(crate) fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

fn edge_between(m: &DMatrix<f64>, from: &[usize], to: &[usize]) -> bool {
    from.iter().any(|&i| to.iter().any(|&j| i != j && m[(i, j)] > 0.0))
}
