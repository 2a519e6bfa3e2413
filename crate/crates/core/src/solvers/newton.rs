use std::time::Instant;

use super::{axpy, dot, max_abs, SolveReport, SolverError};

/// Square nonlinear system `F(x) = 0` with a Jacobian solver.
pub trait NonlinearSystem {
    fn dim(&self) -> usize;
    fn residual(&self, x: &[f64], r: &mut [f64]);
    /// Directional derivative `J(x)·dx`.
    fn jacobian_apply(&self, x: &[f64], dx: &[f64], out: &mut [f64]);
    /// Solves `J(x)·δ = rhs`; returns `δ` and the inner iteration count.
    fn solve_jacobian(&self, x: &[f64], rhs: &[f64]) -> Result<(Vec<f64>, usize), SolverError>;
}

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1.0 / 1024.0 / 1024.0 / 1024.0;

/// Damped Newton with Armijo backtracking on `½‖F‖²`.
///
/// Converged when `max|F(x)| ≤ tol`.
pub fn newton_solve(
    sys: &dyn NonlinearSystem,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    newton_solve_with(sys, x0, tol, max_iter, None)
}

/// As [`newton_solve`], reporting `(iteration, ‖F‖₂)` after every accepted step.
pub fn newton_solve_with(
    sys: &dyn NonlinearSystem,
    x0: &[f64],
    tol: f64,
    max_iter: usize,
    mut monitor: Option<&mut dyn FnMut(usize, f64)>,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    let start = Instant::now();
    let n = sys.dim();
    let mut x = x0.to_vec();
    let mut r = vec![0.0; n];
    sys.residual(&x, &mut r);
    let mut merit = 0.5 * dot(&r, &r);
    let mut res = max_abs(&r);
    let mut inner = 0;
    let mut it = 0;
    let mut trial = vec![0.0; n];
    let mut r_trial = vec![0.0; n];

    while res > tol {
        if it == max_iter || !res.is_finite() {
            return Err(SolverError::NonConvergence {
                iterations: it,
                residual: res,
            });
        }
        let rhs: Vec<f64> = r.iter().map(|v| -v).collect();
        let (delta, k) = sys.solve_jacobian(&x, &rhs)?;
        inner += k;

        // For an exact Newton direction the merit slope is −2·merit.
        let mut step = 1.0;
        loop {
            trial.copy_from_slice(&x);
            axpy(step, &delta, &mut trial);
            sys.residual(&trial, &mut r_trial);
            let m = 0.5 * dot(&r_trial, &r_trial);
            if m.is_finite() && m <= (1.0 - 2.0 * ARMIJO * step) * merit {
                break;
            }
            step *= 0.5;
            if step < MIN_STEP {
                return Err(SolverError::LineSearchStall {
                    iteration: it,
                    residual: res,
                });
            }
        }
        std::mem::swap(&mut x, &mut trial);
        std::mem::swap(&mut r, &mut r_trial);
        merit = 0.5 * dot(&r, &r);
        res = max_abs(&r);
        it += 1;
        if let Some(m) = monitor.as_mut() {
            m(it, (2.0 * merit).sqrt());
        }
    }

    Ok((
        x,
        SolveReport {
            iterations: it,
            inner_iterations: inner,
            residual: res,
            converged: true,
            wall_time: start.elapsed(),
        },
    ))
}
