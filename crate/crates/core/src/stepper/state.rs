use super::StepError;
use crate::constitutive::ModelParams;
use crate::grid::{Grid, ScalarField, VectorField};

/// Initial phase, nutrient, damage, displacement and velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialData {
    pub phi: ScalarField,
    pub sigma: ScalarField,
    pub z: ScalarField,
    pub u: VectorField,
    pub v: VectorField,
}

impl InitialData {
    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }

    pub fn validate(&self, params: &ModelParams) -> Result<(), StepError> {
        let bad = |msg: String| Err(StepError::InvalidInitialData(msg));
        let grid = self.grid();
        if self.sigma.grid() != grid
            || self.z.grid() != grid
            || self.u.grid() != grid
            || self.v.grid() != grid
        {
            return bad("fields live on different grids".into());
        }
        for (name, ok) in [
            ("phi", self.phi.is_finite()),
            ("sigma", self.sigma.is_finite()),
            ("z", self.z.is_finite()),
            ("u", self.u.is_finite()),
            ("v", self.v.is_finite()),
        ] {
            if !ok {
                return bad(format!("{name} has non-finite values"));
            }
        }
        let m = params.supply_bound();
        if self.sigma.min() < 0.0 || self.sigma.max() > m {
            return bad(format!(
                "sigma0 must lie in [0, {m}], found [{}, {}]",
                self.sigma.min(),
                self.sigma.max()
            ));
        }
        if self.z.min() < 0.0 || self.z.max() > 1.0 {
            return bad(format!(
                "z0 must lie in [0, 1], found [{}, {}]",
                self.z.min(),
                self.z.max()
            ));
        }
        if !self.u.satisfies_dirichlet() || !self.v.satisfies_dirichlet() {
            return bad("u0 and v0 must vanish on the boundary".into());
        }
        Ok(())
    }
}

/// Discrete unknowns at step `k`. `u_prev` is `u^{k−1}`, needed by the
/// second difference in the momentum balance.
#[derive(Debug, Clone, PartialEq)]
pub struct StepState {
    pub phi: ScalarField,
    pub mu: ScalarField,
    pub sigma: ScalarField,
    pub z: ScalarField,
    pub u: VectorField,
    pub v: VectorField,
    pub u_prev: VectorField,
    pub k: usize,
    pub t: f64,
}

impl StepState {
    pub fn grid(&self) -> &Grid {
        self.phi.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite()
            && self.mu.is_finite()
            && self.sigma.is_finite()
            && self.z.is_finite()
            && self.u.is_finite()
            && self.v.is_finite()
            && self.u_prev.is_finite()
    }

    /// Sets `u_prev = u − τ·v`, so that `v` is the difference quotient for a
    /// step of length `tau`.
    pub fn rebase_velocity(&mut self, tau: f64) {
        self.u_prev = self.u.combine(1.0, &self.v, -tau);
    }
}

/// Builds the state at `k = 0`: `μ⁰ = 0` and `u⁻¹ = u0 − τ·v0`.
pub fn initialize(data: &InitialData, params: &ModelParams) -> Result<StepState, StepError> {
    params.validate()?;
    data.validate(params)?;
    let grid = *data.grid();
    let mut state = StepState {
        phi: data.phi.clone(),
        mu: ScalarField::zeros(grid),
        sigma: data.sigma.clone(),
        z: data.z.clone(),
        u: data.u.clone(),
        v: data.v.clone(),
        u_prev: data.u.clone(),
        k: 0,
        t: 0.0,
    };
    state.rebase_velocity(params.tau);
    Ok(state)
}
