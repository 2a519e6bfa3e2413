//! One time step of the semi-implicit scheme, in the order
//! nutrient → Cahn-Hilliard → damage → displacement, plus initial data and
//! time interpolants.

mod advance;
mod cahn_hilliard;
mod damage;
mod displacement;
mod interpolants;
mod nutrient;
mod state;

pub use advance::{advance, StepReport};
pub use cahn_hilliard::{step_cahn_hilliard, CahnHilliardSystem};
pub use damage::{step_damage, step_damage_from, DamageFunctional};
pub use displacement::{step_displacement, DisplacementOperator};
pub use interpolants::{interpolants, Field, Interpolants};
pub use nutrient::{step_nutrient, NutrientOperator};
pub use state::{initialize, InitialData, StepState};

use crate::constitutive::ParamError;
use crate::solvers::SolverError;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Nutrient,
    CahnHilliard,
    Damage,
    Displacement,
}

impl std::fmt::Display for Stage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Stage::Nutrient => "nutrient",
            Stage::CahnHilliard => "cahn-hilliard",
            Stage::Damage => "damage",
            Stage::Displacement => "displacement",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StepError {
    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),
    #[error(transparent)]
    InvalidParams(#[from] ParamError),
    #[error("{stage} solve failed: {source}")]
    Solver { stage: Stage, source: SolverError },
    #[error("nutrient left [0, {bound}]: min {min:e}, max {max:e}")]
    NutrientBounds { min: f64, max: f64, bound: f64 },
    #[error("{0} produced non-finite values")]
    NonFinite(Stage),
    #[error("time {t} outside [0, {t_max}]")]
    OutOfRange { t: f64, t_max: f64 },
}

/// Slack on the nutrient bounds `0 ≤ σ ≤ M`.
pub const NUTRIENT_SLACK: f64 = 1e-12;
