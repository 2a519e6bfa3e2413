use super::{Stage, StepError, StepState};
use crate::constitutive::ModelParams;
use crate::grid::{laplacian, Closure, Grid, ScalarField};
use crate::solvers::{cg_solve_with, LinearOperator, SolveReport};

/// `σ ↦ −Δσ + c·σ` with the homogeneous Robin closure.
pub struct NutrientOperator {
    grid: Grid,
    alpha: f64,
    reaction: Vec<f64>,
}

impl NutrientOperator {
    pub fn new(grid: Grid, alpha: f64, reaction: Vec<f64>) -> Self {
        assert_eq!(reaction.len(), grid.n_cells());
        NutrientOperator {
            grid,
            alpha,
            reaction,
        }
    }
}

impl LinearOperator for NutrientOperator {
    fn dim(&self) -> usize {
        self.grid.n_cells()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let f = ScalarField::wrap(self.grid, x.to_vec());
        let closure = Closure::Robin {
            alpha: self.alpha,
            boundary_value: 0.0,
        };
        let lap = laplacian(&f, closure);
        for (((yi, li), xi), ci) in y.iter_mut().zip(lap.values()).zip(x).zip(&self.reaction) {
            *yi = ci * xi - li;
        }
    }
}

/// Backward-Euler nutrient update
/// `(−Δ + c)σ = σ^{k−1}/τ + Λ_s(z^{k−1})σ_s` with
/// `c = 1/τ + λ_c g(φ^{k−1}) + Λ_s(z^{k−1})` and the Robin closure towards
/// `σ_Γ`.
pub fn step_nutrient(
    state: &StepState,
    params: &ModelParams,
) -> Result<(ScalarField, SolveReport), StepError> {
    let grid = *state.grid();
    let tau = params.tau;
    let n = grid.n_cells();
    let mut reaction = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for c in 0..n {
        let phi_p = state.phi.values()[c];
        let z_p = state.z.values()[c];
        let supply = params.supply_rate(z_p);
        reaction.push(1.0 / tau + params.lambda_c * params.indicator(phi_p, z_p) + supply);
        rhs.push(state.sigma.values()[c] / tau + supply * params.sigma_s);
    }
    // Boundary inflow: the affine part of the Robin Laplacian.
    let inflow = laplacian(
        &ScalarField::zeros(grid),
        Closure::Robin {
            alpha: params.alpha,
            boundary_value: params.sigma_gamma,
        },
    );
    for (r, b) in rhs.iter_mut().zip(inflow.values()) {
        *r += b;
    }

    let op = NutrientOperator::new(grid, params.alpha, reaction);
    let (sigma, report) = cg_solve_with(
        &op,
        &rhs,
        Some(state.sigma.values()),
        params.numerics.nutrient_tol,
        params.numerics.max_linear_iter,
        None,
    )
    .map_err(|source| StepError::Solver {
        stage: Stage::Nutrient,
        source,
    })?;
    let sigma =
        ScalarField::from_values(grid, sigma).map_err(|_| StepError::NonFinite(Stage::Nutrient))?;
    Ok((sigma, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::Indicator;
    use crate::grid::VectorField;

    fn state(grid: Grid, sigma: ScalarField) -> StepState {
        StepState {
            phi: ScalarField::constant(grid, 0.3),
            mu: ScalarField::zeros(grid),
            sigma,
            z: ScalarField::constant(grid, 0.7),
            u: VectorField::zeros(grid),
            v: VectorField::zeros(grid),
            u_prev: VectorField::zeros(grid),
            k: 0,
            t: 0.0,
        }
    }

    #[test]
    fn steady_supply_is_preserved() {
        let grid = Grid::new(8, 8, 4.0, 4.0).unwrap();
        let p = ModelParams {
            indicator: Indicator::Off,
            alpha: 0.0,
            sigma_s: 0.6,
            ..Default::default()
        };
        let s = state(grid, ScalarField::constant(grid, 0.6));
        let (sigma, _) = step_nutrient(&s, &p).unwrap();
        assert!(sigma.values().iter().all(|v| (v - 0.6).abs() < 1e-14));
    }

    #[test]
    fn decoupled_case_is_a_heat_step() {
        let grid = Grid::new(8, 8, 2.0, 2.0).unwrap();
        let p = ModelParams {
            indicator: Indicator::Off,
            alpha: 0.0,
            lambda_s0: 0.0,
            tau: 0.05,
            ..Default::default()
        };
        let s0 = ScalarField::from_fn(grid, |x, y| 0.5 + 0.2 * (x * y).sin());
        let (sigma, _) = step_nutrient(&state(grid, s0.clone()), &p).unwrap();
        let lap = laplacian(&sigma, Closure::NeumannZero);
        for c in 0..grid.n_cells() {
            let r = (sigma.values()[c] - s0.values()[c]) / p.tau - lap.values()[c];
            assert!(r.abs() < 1e-10);
        }
    }
}
