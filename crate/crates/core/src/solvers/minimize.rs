use std::time::Instant;

use super::{max_abs, SolveReport, SolverError};
use crate::rng::Lcg;

/// Smooth convex functional on `R^n`. `gradient` is the Riesz
/// representative with respect to `dot`, so `F(x + s) ≈ F(x) + dot(∇F, s)`.
pub trait ConvexObjective {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], g: &mut [f64]);
    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        super::dot(a, b)
    }
}

const ARMIJO: f64 = 1e-4;
/// Relative allowance for rounding in functional values.
const VALUE_SLACK: f64 = 1e-13;
const POWER_STEPS: usize = 12;

/// Largest curvature along gradient differences at `x`, by power iteration.
fn lipschitz_estimate(obj: &dyn ConvexObjective, x: &[f64], g: &[f64]) -> f64 {
    let n = obj.dim();
    let mut rng = Lcg::new(0x1ee7);
    let mut v = rng.fill(n, -1.0, 1.0);
    let mut xs = vec![0.0; n];
    let mut gs = vec![0.0; n];
    let mut l = 0.0;
    for _ in 0..POWER_STEPS {
        let vn = obj.dot(&v, &v).sqrt();
        if vn == 0.0 || !vn.is_finite() {
            break;
        }
        let h = 1e-4 * (1.0 + obj.dot(x, x).sqrt()) / vn;
        for ((xi, x0), vi) in xs.iter_mut().zip(x).zip(&v) {
            *xi = x0 + h * vi;
        }
        obj.gradient(&xs, &mut gs);
        for ((vi, gi), g0) in v.iter_mut().zip(&gs).zip(g) {
            *vi = (gi - g0) / h;
        }
        l = obj.dot(&v, &v).sqrt() / vn;
    }
    if l.is_finite() && l > 0.0 {
        l
    } else {
        1.0
    }
}

/// Gradient descent with Barzilai-Borwein steps and monotone Armijo
/// backtracking. Converged when `max|∇F| ≤ tol`.
///
/// When the BB quotient is undefined (non-positive curvature along the last
/// step) the step falls back to `1/L`, with `L` from a power iteration on
/// gradient differences.
pub fn minimize_convex(
    obj: &dyn ConvexObjective,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    let start = Instant::now();
    let n = obj.dim();
    let mut x = x0.to_vec();
    let mut g = vec![0.0; n];
    obj.gradient(&x, &mut g);
    let mut f = obj.value(&x);
    let mut res = max_abs(&g);
    if res <= tol {
        return Ok((
            x,
            SolveReport {
                residual: res,
                converged: true,
                wall_time: start.elapsed(),
                ..Default::default()
            },
        ));
    }
    let mut step = 1.0 / lipschitz_estimate(obj, &x, &g);
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut it = 0;

    while res > tol {
        if it == max_iter || !res.is_finite() {
            return Err(SolverError::NonConvergence {
                iterations: it,
                residual: res,
            });
        }
        let gg = obj.dot(&g, &g);
        let mut f_trial;
        loop {
            for ((ti, xi), gi) in trial.iter_mut().zip(&x).zip(&g) {
                *ti = xi - step * gi;
            }
            f_trial = obj.value(&trial);
            let slack = VALUE_SLACK * (1.0 + f.abs());
            if f_trial.is_finite() && f_trial <= f - ARMIJO * step * gg + slack {
                break;
            }
            step *= 0.5;
            if step * gg.sqrt() <= f64::EPSILON * (1.0 + obj.dot(&x, &x).sqrt()) {
                return Err(SolverError::NonConvergence {
                    iterations: it,
                    residual: res,
                });
            }
        }
        obj.gradient(&trial, &mut g_trial);

        let s: Vec<f64> = trial.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_trial.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = obj.dot(&s, &y);
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut g, &mut g_trial);
        f = f_trial;
        res = max_abs(&g);
        it += 1;
        step = if sy > 0.0 {
            obj.dot(&s, &s) / sy
        } else {
            1.0 / lipschitz_estimate(obj, &x, &g)
        };
    }

    Ok((
        x,
        SolveReport {
            iterations: it,
            inner_iterations: 0,
            residual: res,
            converged: true,
            wall_time: start.elapsed(),
        },
    ))
}
