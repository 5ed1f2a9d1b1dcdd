use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::eigen::{classes, submatrix};
use super::{clean_metzler, require_metzler, scale_of, EigenPair};
use crate::error::{Error, Result};
use crate::lp::{solve_lp, LpModel, LpStatus, Objective, RowSense};
use crate::tol;

const POLISH_EVERY: usize = 20;
const POLISH_STEPS: usize = 6;

/// Perron root of a Metzler matrix and a nonnegative eigenvector for it.
///
/// Power iteration runs on `P = M + σI`, `σ = max|M_ii| + 1`, from the
/// all-ones vector, so iterates stay strictly positive. Periodically the
/// estimate is polished by inverse iteration at a shift just above the
/// Collatz-Wielandt upper bound `max_i (Px)_i / x_i`, where
/// `(μI - P)^{-1}` is entrywise nonnegative.
pub fn perron_pair(m: &DMatrix<f64>) -> Result<EigenPair> {
    require_metzler(m)?;
    let n = m.nrows();
    let m = clean_metzler(m);
    let sigma = (0..n).fold(0.0_f64, |a, i| a.max(m[(i, i)].abs())) + 1.0;
    let p = &m + DMatrix::identity(n, n) * sigma;
    let scale = scale_of(&p);
    let loose = tol::EIG * scale;
    let tight = 1e-3 * tol::EIG * scale;

    let mut x = DVector::from_element(n, 1.0);
    let mut lam = 0.0;
    let mut res = f64::INFINITY;
    for k in 0..tol::POWER_ITER_CAP {
        let y = &p * &x;
        let upper = (0..n)
            .filter(|&i| x[i] > 0.0)
            .map(|i| y[i] / x[i])
            .fold(f64::NEG_INFINITY, f64::max);
        lam = y.amax();
        if lam == 0.0 {
            return Ok(EigenPair::new(&m, -sigma, x.iter().copied().collect()));
        }
        res = (&y - &x * lam).amax();
        if res <= tight {
            break;
        }
        if (k + 1) % POLISH_EVERY == 0 || res <= loose {
            if let Some((mu, v, r)) = polish(&p, &x, upper) {
                if r <= tight || (res <= loose && r <= res) {
                    return Ok(EigenPair::new(&m, mu - sigma, v));
                }
            }
            if res <= loose {
                break;
            }
        }
        x = y / lam;
    }
    if res > loose {
        return Err(Error::NoConvergence {
            iterations: tol::POWER_ITER_CAP,
            estimate: lam - sigma,
            gap: res,
        });
    }
    let v: Vec<f64> = x.iter().map(|v| v / x.amax()).collect();
    Ok(EigenPair::new(&m, lam - sigma, v))
}

/// Inverse iteration at a shift above `upper >= ρ(P)`; returns
/// `(λ, v, ‖Pv - λv‖∞)` when the result is a nonnegative vector.
fn polish(p: &DMatrix<f64>, x: &DVector<f64>, upper: f64) -> Option<(f64, Vec<f64>, f64)> {
    let n = p.nrows();
    let mu = upper + 1e-9 * upper.abs().max(1.0);
    let lu = (DMatrix::identity(n, n) * mu - p).lu();
    let mut v = x.clone();
    for _ in 0..POLISH_STEPS {
        let y = lu.solve(&v)?;
        let s = y.amax();
        if !s.is_finite() || s == 0.0 {
            return None;
        }
        v = y / s;
    }
    if v.iter().any(|&e| e < -tol::EIG) {
        return None;
    }
    v.iter_mut().for_each(|e| *e = e.max(0.0));
    let pv = p * &v;
    let imax = v.imax();
    let lam = pv[imax] / v[imax];
    let r = (&pv - &v * lam).amax();
    Some((lam, v.iter().copied().collect(), r))
}

/// Largest real part of the spectrum of a Metzler matrix, taken class by
/// class; single-state classes contribute their diagonal entry exactly.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> Result<f64> {
    require_metzler(m)?;
    let m = clean_metzler(m);
    let mut best = f64::NEG_INFINITY;
    for class in classes(&m) {
        let lambda = if let [i] = class[..] {
            m[(i, i)]
        } else {
            perron_pair(&submatrix(&m, &class, &class))?.lambda
        };
        best = best.max(lambda);
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HurwitzVerdict {
    pub hurwitz: bool,
    pub abscissa: f64,
    /// `v >= 1` with `Mv <= -1`, when found.
    pub certificate: Option<Vec<f64>>,
    /// Perron pair with `λ >= -tol_eig` when not Hurwitz.
    pub offending: Option<EigenPair>,
}

/// Hurwitz test by spectral abscissa, with an LP certificate when stable.
pub fn is_hurwitz(m: &DMatrix<f64>) -> Result<HurwitzVerdict> {
    let abscissa = spectral_abscissa(m)?;
    let hurwitz = abscissa < -tol::EIG;
    if hurwitz {
        Ok(HurwitzVerdict {
            hurwitz,
            abscissa,
            certificate: linear_certificate(m)?,
            offending: None,
        })
    } else {
        Ok(HurwitzVerdict {
            hurwitz,
            abscissa,
            certificate: None,
            offending: Some(perron_pair(m)?),
        })
    }
}

/// Solves `min 𝟙'v` over `v >= 1`, `Mv <= -1`; feasible iff `M` is Hurwitz.
pub fn linear_certificate(m: &DMatrix<f64>) -> Result<Option<Vec<f64>>> {
    require_metzler(m)?;
    let n = m.nrows();
    let mut lp = LpModel::new(Objective::Minimize, vec![1.0; n]);
    for j in 0..n {
        lp.set_bounds(j, 1.0, f64::INFINITY);
    }
    for i in 0..n {
        lp.add_row(m.row(i).iter().copied().collect(), RowSense::Le, -1.0);
    }
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => Some(sol.x),
        _ => None,
    })
}
