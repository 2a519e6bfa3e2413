use super::{Stage, StepError, StepState};
use crate::constitutive::{beta_tau, ModelParams};
use crate::grid::{p_energy, p_laplacian, sym_grad, Grid, ScalarField};
use crate::solvers::{minimize_convex, ConvexObjective, SolveReport};

/// Convex damage functional of one step,
///
/// `F(z) = Σ_cells [z²/(2τ) − z^{k−1}z/τ + β̂_τ(z) + π(z^{k−1})z
///          + ½ȟ(z)Q + ½ĥ'(z^{k−1})Qz]·hx·hy + P_p(z)`
///
/// with `Q = 𝒞η:η`, `η = ε(u^{k−1}) − ℛφ^k` and `P_p` the discrete
/// p-Dirichlet energy. The gradient is taken in the cell-weighted metric.
pub struct DamageFunctional {
    grid: Grid,
    tau: f64,
    p: f64,
    h_star: f64,
    curvature: f64,
    z_prev: Vec<f64>,
    pi_prev: Vec<f64>,
    q: Vec<f64>,
}

impl DamageFunctional {
    pub fn new(state: &StepState, phi_new: &ScalarField, params: &ModelParams) -> Self {
        let grid = *state.grid();
        let strain = sym_grad(&state.u);
        let q = (0..grid.n_cells())
            .map(|c| params.strain_energy_density(phi_new.values()[c], strain.get(c)))
            .collect();
        Self::from_parts(grid, state.z.values().to_vec(), q, params)
    }

    /// Builds the functional from an explicit strain-energy field `Q ≥ 0`.
    pub fn from_parts(grid: Grid, z_prev: Vec<f64>, q: Vec<f64>, params: &ModelParams) -> Self {
        assert_eq!(z_prev.len(), grid.n_cells());
        assert_eq!(q.len(), grid.n_cells());
        let pi_prev = z_prev.iter().map(|&z| params.pi(z)).collect();
        DamageFunctional {
            grid,
            tau: params.tau,
            p: params.p,
            h_star: params.h_star,
            curvature: params.h_curvature(),
            z_prev,
            pi_prev,
            q,
        }
    }

    pub fn strain_energy(&self) -> &[f64] {
        &self.q
    }
}

impl ConvexObjective for DamageFunctional {
    fn dim(&self) -> usize {
        self.grid.n_cells()
    }

    fn value(&self, z: &[f64]) -> f64 {
        let tau = self.tau;
        let k = self.curvature;
        let mut acc = 0.0;
        for (c, &zc) in z.iter().enumerate() {
            let zp = self.z_prev[c];
            let q = self.q[c];
            let split = crate::constitutive::h_split(zc, self.h_star);
            acc += 0.5 * zc * zc / tau - zp * zc / tau
                + beta_tau(zc, tau).0
                + self.pi_prev[c] * zc
                + 0.5 * split.convex_value * q
                - 0.5 * k * zp * q * zc;
        }
        acc * self.grid.cell_measure() + p_energy(&ScalarField::wrap(self.grid, z.to_vec()), self.p)
    }

    fn gradient(&self, z: &[f64], g: &mut [f64]) {
        let tau = self.tau;
        let k = self.curvature;
        let lap_p = p_laplacian(&ScalarField::wrap(self.grid, z.to_vec()), self.p);
        for (c, gc) in g.iter_mut().enumerate() {
            let zc = z[c];
            let zp = self.z_prev[c];
            let q = self.q[c];
            let split = crate::constitutive::h_split(zc, self.h_star);
            *gc = (zc - zp) / tau - lap_p.values()[c]
                + beta_tau(zc, tau).1
                + self.pi_prev[c]
                + 0.5 * split.convex_deriv * q
                - 0.5 * k * zp * q;
        }
    }

    fn dot(&self, a: &[f64], b: &[f64]) -> f64 {
        crate::solvers::dot(a, b) * self.grid.cell_measure()
    }
}

/// Minimises the damage functional starting from `z^{k−1}`.
pub fn step_damage(
    state: &StepState,
    phi_new: &ScalarField,
    params: &ModelParams,
) -> Result<(ScalarField, SolveReport), StepError> {
    step_damage_from(state, phi_new, params, state.z.values())
}

/// As [`step_damage`] with an explicit starting guess.
pub fn step_damage_from(
    state: &StepState,
    phi_new: &ScalarField,
    params: &ModelParams,
    start: &[f64],
) -> Result<(ScalarField, SolveReport), StepError> {
    let grid = *state.grid();
    let functional = DamageFunctional::new(state, phi_new, params);
    let (z, report) = minimize_convex(
        &functional,
        start,
        params.numerics.damage_tol,
        params.numerics.max_damage_iter,
    )
    .map_err(|source| StepError::Solver {
        stage: Stage::Damage,
        source,
    })?;
    let z = ScalarField::from_values(grid, z).map_err(|_| StepError::NonFinite(Stage::Damage))?;
    Ok((z, report))
}
