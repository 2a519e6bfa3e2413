use std::time::Instant;

use super::{axpy, dot, norm, SolveReport, SolverError};
use crate::rng::Lcg;

/// Matrix-free linear map on `R^n`.
pub trait LinearOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
    fn is_symmetric(&self) -> bool {
        true
    }
    fn is_positive(&self) -> bool {
        true
    }
}

/// Receives `(iteration, ‖r‖/‖b‖)` after every CG iteration.
pub type CgMonitor<'a> = &'a mut dyn FnMut(usize, f64);

/// Conjugate gradients from a zero start.
pub fn cg_solve(
    op: &dyn LinearOperator,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    cg_solve_with(op, b, None, tol, max_iter, None)
}

fn probe_symmetry(op: &dyn LinearOperator) {
    let n = op.dim();
    let mut rng = Lcg::new(0x5eed);
    let x = rng.fill(n, -1.0, 1.0);
    let y = rng.fill(n, -1.0, 1.0);
    let mut ax = vec![0.0; n];
    let mut ay = vec![0.0; n];
    op.apply(&x, &mut ax);
    op.apply(&y, &mut ay);
    let (l, r) = (dot(&ax, &y), dot(&x, &ay));
    let scale = norm(&ax) * norm(&y) + norm(&x) * norm(&ay);
    assert!(
        (l - r).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE),
        "operator flagged symmetric fails probe: {l} vs {r}"
    );
}

/// Conjugate gradients with an optional initial guess and residual monitor.
///
/// Stops when the true relative residual `‖b − Ax‖/‖b‖` is at most `tol`.
/// The recursively updated residual is checked against the true one at
/// convergence and the iteration restarts if they disagree.
pub fn cg_solve_with(
    op: &dyn LinearOperator,
    b: &[f64],
    x0: Option<&[f64]>,
    tol: f64,
    max_iter: usize,
    mut monitor: Option<CgMonitor<'_>>,
) -> Result<(Vec<f64>, SolveReport), SolverError> {
    let start = Instant::now();
    let n = op.dim();
    assert_eq!(b.len(), n, "right-hand side has wrong length");
    if cfg!(debug_assertions) && op.is_symmetric() {
        probe_symmetry(op);
    }

    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((
            vec![0.0; n],
            SolveReport {
                converged: true,
                wall_time: start.elapsed(),
                ..Default::default()
            },
        ));
    }

    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    let mut r = vec![0.0; n];
    let mut ap = vec![0.0; n];
    let true_residual = |x: &[f64], r: &mut [f64], scratch: &mut [f64]| {
        op.apply(x, scratch);
        for ((ri, bi), ai) in r.iter_mut().zip(b).zip(scratch.iter()) {
            *ri = bi - ai;
        }
        norm(r) / b_norm
    };

    let mut rel = true_residual(&x, &mut r, &mut ap);
    let mut it = 0;
    while rel > tol && it < max_iter {
        let before = rel;
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        while it < max_iter {
            op.apply(&p, &mut ap);
            let pap = dot(&p, &ap);
            if pap <= 0.0 || !pap.is_finite() {
                break;
            }
            let alpha = rr / pap;
            axpy(alpha, &p, &mut x);
            axpy(-alpha, &ap, &mut r);
            it += 1;
            let rr_new = dot(&r, &r);
            rel = rr_new.sqrt() / b_norm;
            if let Some(m) = monitor.as_mut() {
                m(it, rel);
            }
            if rel <= tol {
                break;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for (pi, ri) in p.iter_mut().zip(&r) {
                *pi = ri + beta * *pi;
            }
        }
        rel = true_residual(&x, &mut r, &mut ap);
        if rel > tol && rel >= 0.9 * before {
            // A whole cycle without progress; further restarts will not help.
            break;
        }
    }

    let report = SolveReport {
        iterations: it,
        inner_iterations: 0,
        residual: rel,
        converged: rel <= tol,
        wall_time: start.elapsed(),
    };
    if report.converged {
        Ok((x, report))
    } else {
        Err(SolverError::NonConvergence {
            iterations: it,
            residual: rel,
        })
    }
}
