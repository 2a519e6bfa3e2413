//! Matrix-free iterative kernels: conjugate gradients, damped Newton and a
//! Barzilai-Borwein descent for smooth convex functionals.

mod cg;
mod minimize;
mod newton;

pub use cg::{cg_solve, cg_solve_with, CgMonitor, LinearOperator};
pub use minimize::{minimize_convex, ConvexObjective};
pub use newton::{newton_solve, newton_solve_with, NonlinearSystem};

use std::time::Duration;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveReport {
    pub iterations: usize,
    /// Linear iterations summed over all outer iterations (Newton only).
    pub inner_iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub wall_time: Duration,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("line search stalled at iteration {iteration} (residual {residual:e})")]
    LineSearchStall { iteration: usize, residual: f64 },
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// `y += a·x`.
pub(crate) fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}
