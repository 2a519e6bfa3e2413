use super::{Stage, StepError, StepState};
use crate::constitutive::{psi, ModelParams};
use crate::grid::{laplacian, sym_grad, Closure, Grid, ScalarField};
use crate::solvers::{
    cg_solve, newton_solve, LinearOperator, NonlinearSystem, SolveReport, SolverError,
};

fn lap(grid: Grid, x: &[f64]) -> Vec<f64> {
    laplacian(&ScalarField::wrap(grid, x.to_vec()), Closure::NeumannZero).into_values()
}

/// Coupled phase / potential residual for one step, unknowns `[φ; μ]`:
///
/// `R1 = (φ − φ^{k−1})/τ − Δμ − U + (μ − μ^{k−1})`
/// `R2 = μ + Δφ − φ³ + φ^{k−1} − W_φ(φ) − (φ − φ^{k−1})`
///
/// `W_φ(φ) = w0 + κ·φ` is affine in `φ` with the strain and damage lagged.
pub struct CahnHilliardSystem {
    grid: Grid,
    tau: f64,
    mu_weight: f64,
    phi_prev: Vec<f64>,
    mu_prev: Vec<f64>,
    source: Vec<f64>,
    w0: Vec<f64>,
    kappa: Vec<f64>,
    linear_tol: f64,
    max_linear_iter: usize,
}

impl CahnHilliardSystem {
    /// Assembles the step from the state at `k − 1` and the new nutrient.
    pub fn new(state: &StepState, sigma_new: &ScalarField, params: &ModelParams) -> Self {
        let grid = *state.grid();
        let n = grid.n_cells();
        let strain = sym_grad(&state.u);
        let f = params.treatment.mean(state.t, state.t + params.tau);
        let r_stiff = params.eigenstrain_stiffness();
        let stress_r = params.stiffness(params.eigenstrain());
        let mut source = Vec::with_capacity(n);
        let mut w0 = Vec::with_capacity(n);
        let mut kappa = Vec::with_capacity(n);
        for c in 0..n {
            let phi_p = state.phi.values()[c];
            let z_p = state.z.values()[c];
            let e = strain.get(c);
            let lagged = params.elastic(phi_p, e, z_p);
            source.push(params.source_u(sigma_new.values()[c], lagged.w_e, phi_p, z_p, f));
            let h = params.h_split(z_p).value;
            // W_φ(φ) = −h𝒞(e − ℛφ):ℛ = −h·𝒞ℛ:e + h·𝒞ℛ:ℛ·φ.
            w0.push(-h * stress_r.ddot(&e));
            kappa.push(h * r_stiff);
        }
        CahnHilliardSystem {
            grid,
            tau: params.tau,
            mu_weight: if params.numerics.mu_regularisation {
                1.0
            } else {
                0.0
            },
            phi_prev: state.phi.values().to_vec(),
            mu_prev: state.mu.values().to_vec(),
            source,
            w0,
            kappa,
            linear_tol: params.numerics.linear_tol,
            max_linear_iter: params.numerics.max_linear_iter,
        }
    }

    /// The mass source `U` per cell.
    pub fn source(&self) -> &[f64] {
        &self.source
    }

    fn n(&self) -> usize {
        self.grid.n_cells()
    }

    /// `B = −Δ + 3φ² + κ + 1`, the linearised chemical-potential operator.
    fn b_apply(&self, phi: &[f64], x: &[f64]) -> Vec<f64> {
        let l = lap(self.grid, x);
        (0..self.n())
            .map(|c| -l[c] + (3.0 * phi[c] * phi[c] + self.kappa[c] + 1.0) * x[c])
            .collect()
    }

    /// `A = m·I − Δ`, the potential operator of the mass balance.
    fn a_apply(&self, x: &[f64]) -> Vec<f64> {
        let l = lap(self.grid, x);
        x.iter()
            .zip(&l)
            .map(|(xi, li)| self.mu_weight * xi - li)
            .collect()
    }
}

/// `B + τ·B·A·B`, symmetric positive definite for `B` SPD and `A` SPSD.
struct SchurOperator<'a> {
    sys: &'a CahnHilliardSystem,
    phi: &'a [f64],
}

impl LinearOperator for SchurOperator<'_> {
    fn dim(&self) -> usize {
        self.sys.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let bx = self.sys.b_apply(self.phi, x);
        let abx = self.sys.a_apply(&bx);
        let babx = self.sys.b_apply(self.phi, &abx);
        for ((yi, b), bab) in y.iter_mut().zip(&bx).zip(&babx) {
            *yi = b + self.sys.tau * bab;
        }
    }
}

impl NonlinearSystem for CahnHilliardSystem {
    fn dim(&self) -> usize {
        2 * self.n()
    }

    fn residual(&self, x: &[f64], r: &mut [f64]) {
        let n = self.n();
        let (phi, mu) = x.split_at(n);
        let lap_mu = lap(self.grid, mu);
        let lap_phi = lap(self.grid, phi);
        let tau = self.tau;
        for c in 0..n {
            let dphi = phi[c] - self.phi_prev[c];
            r[c] = dphi / tau - lap_mu[c] - self.source[c]
                + self.mu_weight * (mu[c] - self.mu_prev[c]);
            let split = psi(phi[c]);
            let w_phi = self.w0[c] + self.kappa[c] * phi[c];
            r[n + c] = mu[c] + lap_phi[c]
                - split.convex_deriv
                - psi(self.phi_prev[c]).concave_deriv
                - w_phi
                - dphi;
        }
    }

    fn jacobian_apply(&self, x: &[f64], dx: &[f64], out: &mut [f64]) {
        let n = self.n();
        let phi = &x[..n];
        let (dphi, dmu) = dx.split_at(n);
        let a_dmu = self.a_apply(dmu);
        let b_dphi = self.b_apply(phi, dphi);
        for c in 0..n {
            out[c] = dphi[c] / self.tau + a_dmu[c];
            out[n + c] = dmu[c] - b_dphi[c];
        }
    }

    /// Eliminates `δμ = r2 + B·δφ` and solves
    /// `(B + τBAB)·δφ = τ·B·(r1 − A·r2)` by conjugate gradients, to a
    /// relative accuracy that tightens with the Newton residual.
    fn solve_jacobian(&self, x: &[f64], rhs: &[f64]) -> Result<(Vec<f64>, usize), SolverError> {
        let n = self.n();
        let phi = &x[..n];
        let (r1, r2) = rhs.split_at(n);
        let a_r2 = self.a_apply(r2);
        let inner: Vec<f64> = r1
            .iter()
            .zip(&a_r2)
            .map(|(a, b)| self.tau * (a - b))
            .collect();
        let b = self.b_apply(phi, &inner);
        let op = SchurOperator { sys: self, phi };
        let forcing = crate::solvers::max_abs(rhs).min(1e-2).max(self.linear_tol);
        let (dphi, rep) = cg_solve(&op, &b, forcing, self.max_linear_iter)?;
        let b_dphi = self.b_apply(phi, &dphi);
        let mut delta = dphi;
        delta.extend(r2.iter().zip(&b_dphi).map(|(a, b)| a + b));
        Ok((delta, rep.iterations))
    }
}

/// Solves the coupled phase / potential equations of one step by damped
/// Newton, starting from `(φ^{k−1}, μ^{k−1})`.
pub fn step_cahn_hilliard(
    state: &StepState,
    sigma_new: &ScalarField,
    params: &ModelParams,
) -> Result<(ScalarField, ScalarField, SolveReport), StepError> {
    let grid = *state.grid();
    let sys = CahnHilliardSystem::new(state, sigma_new, params);
    let mut x0 = state.phi.values().to_vec();
    x0.extend_from_slice(state.mu.values());
    let (x, report) = newton_solve(
        &sys,
        &x0,
        params.numerics.newton_tol,
        params.numerics.max_newton_iter,
    )
    .map_err(|source| StepError::Solver {
        stage: Stage::CahnHilliard,
        source,
    })?;
    let n = grid.n_cells();
    let nonfinite = |_| StepError::NonFinite(Stage::CahnHilliard);
    let phi = ScalarField::from_values(grid, x[..n].to_vec()).map_err(nonfinite)?;
    let mu = ScalarField::from_values(grid, x[n..].to_vec()).map_err(nonfinite)?;
    Ok((phi, mu, report))
}
