use super::{
    step_cahn_hilliard, step_damage, step_displacement, step_nutrient, StepError, StepState,
    NUTRIENT_SLACK,
};
use crate::constitutive::ModelParams;
use crate::solvers::SolveReport;

/// Solver reports of one accepted step. With retries, the reports are those
/// of the last sub-step and `substeps` records how many were taken.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StepReport {
    pub nutrient: SolveReport,
    pub cahn_hilliard: SolveReport,
    pub damage: SolveReport,
    pub displacement: SolveReport,
    pub substeps: usize,
    pub retries: usize,
}

fn single_step(state: &StepState, params: &ModelParams) -> Result<(StepState, StepReport), StepError> {
    let (sigma, nutrient) = step_nutrient(state, params)?;
    let bound = params.supply_bound();
    let (min, max) = (sigma.min(), sigma.max());
    if min < -NUTRIENT_SLACK || max > bound + NUTRIENT_SLACK {
        return Err(StepError::NutrientBounds { min, max, bound });
    }
    let (phi, mu, cahn_hilliard) = step_cahn_hilliard(state, &sigma, params)?;
    let (z, damage) = step_damage(state, &phi, params)?;
    let (u, v, displacement) = step_displacement(state, &phi, &z, params)?;
    let next = StepState {
        phi,
        mu,
        sigma,
        z,
        u_prev: state.u.clone(),
        u,
        v,
        k: state.k + 1,
        t: state.t + params.tau,
    };
    Ok((
        next,
        StepReport {
            nutrient,
            cahn_hilliard,
            damage,
            displacement,
            substeps: 1,
            retries: 0,
        },
    ))
}

/// Advances one step of length `params.tau`.
///
/// If a sub-solver fails, the step is retried as `2^r` sub-steps of length
/// `τ/2^r` for `r = 1..=max_retries`. The input state is never modified.
pub fn advance(state: &StepState, params: &ModelParams) -> Result<(StepState, StepReport), StepError> {
    params.validate()?;
    let mut err = match single_step(state, params) {
        Ok(done) => return Ok(done),
        Err(e) => e,
    };
    for r in 1..=params.numerics.max_retries {
        let n = 1usize << r;
        let sub = ModelParams {
            tau: params.tau / n as f64,
            ..params.clone()
        };
        let mut current = state.clone();
        current.rebase_velocity(sub.tau);
        let mut last = None;
        let mut failed = None;
        for _ in 0..n {
            match single_step(&current, &sub) {
                Ok((next, rep)) => {
                    current = next;
                    last = Some(rep);
                }
                Err(e) => {
                    failed = Some(e);
                    break;
                }
            }
        }
        match (failed, last) {
            (None, Some(mut rep)) => {
                current.rebase_velocity(params.tau);
                current.k = state.k + 1;
                current.t = state.t + params.tau;
                rep.substeps = n;
                rep.retries = r;
                return Ok((current, rep));
            }
            (Some(e), _) => err = e,
            (None, None) => unreachable!("at least one sub-step runs"),
        }
    }
    Err(err)
}
