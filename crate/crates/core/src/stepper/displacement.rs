use super::{Stage, StepError, StepState};
use crate::constitutive::ModelParams;
use crate::grid::{div_tensor, sym_grad, Grid, ScalarField, SymTensorField, VectorField};
use crate::solvers::{cg_solve_with, LinearOperator, SolveReport};

/// `u ↦ u − div(θ·𝒞ε(u))` on vertex displacements; boundary vertices map
/// identically.
pub struct DisplacementOperator {
    grid: Grid,
    theta: Vec<f64>,
    lame_lambda: f64,
    lame_mu: f64,
}

impl DisplacementOperator {
    pub fn new(grid: Grid, theta: Vec<f64>, params: &ModelParams) -> Self {
        assert_eq!(theta.len(), grid.n_cells());
        DisplacementOperator {
            grid,
            theta,
            lame_lambda: params.lame_lambda,
            lame_mu: params.lame_mu,
        }
    }
}

impl LinearOperator for DisplacementOperator {
    fn dim(&self) -> usize {
        2 * self.grid.n_nodes()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut u = VectorField::from_flat(self.grid, x);
        u.apply_dirichlet();
        let mut stress = sym_grad(&u);
        for c in 0..self.grid.n_cells() {
            let s = crate::constitutive::elastic_apply(stress.get(c), self.lame_lambda, self.lame_mu);
            stress.set(c, self.theta[c] * s);
        }
        let d = div_tensor(&stress);
        let n = self.grid.n_nodes();
        for i in 0..n {
            y[i] = x[i] - d.u1[i];
            y[n + i] = x[n + i] - d.u2[i];
        }
    }
}

/// Momentum balance of one step,
/// `(I − div[θ𝒞ε(·)])u = 2u^{k−1} − u^{k−2} − div[τ²hφ𝒞ℛ + τaω𝒞ε(u^{k−1})]`
/// with `θ = τωa(z^k) + τ²h(z^k)`. Returns `(u^k, v^k)`.
pub fn step_displacement(
    state: &StepState,
    phi_new: &ScalarField,
    z_new: &ScalarField,
    params: &ModelParams,
) -> Result<(VectorField, VectorField, SolveReport), StepError> {
    let grid = *state.grid();
    let tau = params.tau;
    let strain_prev = sym_grad(&state.u);
    let stress_r = params.stiffness(params.eigenstrain());
    let mut theta = Vec::with_capacity(grid.n_cells());
    let mut known = SymTensorField::zeros(grid);
    for c in 0..grid.n_cells() {
        let z = z_new.values()[c];
        let h = params.h_split(z).value;
        let a = params.a(z);
        theta.push(tau * params.omega * a + tau * tau * h);
        let t = tau * tau * h * phi_new.values()[c] * stress_r
            + tau * a * params.omega * params.stiffness(strain_prev.get(c));
        known.set(c, t);
    }
    let div_known = div_tensor(&known);
    let mut rhs = state
        .u
        .combine(2.0, &state.u_prev, -1.0)
        .combine(1.0, &div_known, -1.0);
    rhs.apply_dirichlet();

    let guess = state.u.combine(2.0, &state.u_prev, -1.0);
    let op = DisplacementOperator::new(grid, theta, params);
    let (flat, report) = cg_solve_with(
        &op,
        &rhs.to_flat(),
        Some(&guess.to_flat()),
        params.numerics.displacement_tol,
        params.numerics.max_linear_iter,
        None,
    )
    .map_err(|source| StepError::Solver {
        stage: Stage::Displacement,
        source,
    })?;
    let mut u = VectorField::from_flat(grid, &flat);
    u.apply_dirichlet();
    if !u.is_finite() {
        return Err(StepError::NonFinite(Stage::Displacement));
    }
    let v = u.combine(1.0 / tau, &state.u, -1.0 / tau);
    Ok((u, v, report))
}
