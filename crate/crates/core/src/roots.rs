//! Small numeric solvers: bracketed bisection for monotone maps and a damped
//! Newton iteration for two-dimensional stationarity systems.

use crate::error::{OttoError, Result};

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
///
/// Stops when `|f(mid)| <= f_tol` or the bracket collapses to adjacent floats.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, f_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return Err(OttoError::Bracket("endpoints do not straddle a root"));
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid.abs() <= f_tol {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Outcome of [`newton_2d`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSolution {
    pub point: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
}

fn norm(r: [f64; 2]) -> f64 {
    r[0].hypot(r[1])
}

/// Damped Newton iteration for `F(z) = 0`, `z ∈ R²`, using a central
/// finite-difference Jacobian with relative step `1e-6`.
///
/// Each step is halved until the residual norm decreases (at most 40 halvings).
/// `admissible` rejects trial points outside the domain of `F`.
pub fn newton_2d<F, A>(
    mut system: F,
    admissible: A,
    seed: [f64; 2],
    tol: f64,
    max_iter: usize,
) -> Result<NewtonSolution>
where
    F: FnMut([f64; 2]) -> [f64; 2],
    A: Fn([f64; 2]) -> bool,
{
    let mut z = seed;
    let mut r = system(z);
    let mut res = norm(r);
    for it in 0..max_iter {
        if res <= tol {
            return Ok(NewtonSolution {
                point: z,
                residual: res,
                iterations: it,
            });
        }
        let mut jac = [[0.0; 2]; 2];
        for k in 0..2 {
            let h = 1e-6 * z[k].abs().max(1e-8);
            let mut zp = z;
            let mut zm = z;
            zp[k] += h;
            zm[k] -= h;
            let rp = system(zp);
            let rm = system(zm);
            jac[0][k] = (rp[0] - rm[0]) / (2.0 * h);
            jac[1][k] = (rp[1] - rm[1]) / (2.0 * h);
        }
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let dz = [
            (jac[1][1] * r[0] - jac[0][1] * r[1]) / det,
            (-jac[1][0] * r[0] + jac[0][0] * r[1]) / det,
        ];
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial = [z[0] - step * dz[0], z[1] - step * dz[1]];
            if admissible(trial) {
                let rt = system(trial);
                let nt = norm(rt);
                if nt.is_finite() && nt < res {
                    z = trial;
                    r = rt;
                    res = nt;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res <= tol {
        Ok(NewtonSolution {
            point: z,
            residual: res,
            iterations: max_iter,
        })
    } else {
        Err(OttoError::NoConvergence {
            solver: "damped Newton",
            residual: res,
        })
    }
}
