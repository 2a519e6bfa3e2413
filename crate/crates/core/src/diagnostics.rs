//! Discrete energy and dissipation budget, bound checks and time-step
//! refinement studies.

use thiserror::Error;

use crate::constitutive::{beta_tau, pi_hat, psi, ModelParams};
use crate::grid::{grad_faces, inner, p_energy, robin_coefficient, sym_grad, Closure, ScalarField};
use crate::stepper::{advance, initialize, Field, InitialData, StepError, StepState, NUTRIENT_SLACK};

/// Every addend of the discrete energy, plus the dissipation of the step
/// that produced the state (zero for an initial state).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EnergyBreakdown {
    pub grad_phi: f64,
    pub well: f64,
    pub nutrient: f64,
    pub kinetic: f64,
    pub damage_grad: f64,
    pub constraint: f64,
    pub perturb: f64,
    pub elastic: f64,
    pub mu_reg: f64,
    pub total: f64,
    pub dissipation: f64,
}

impl EnergyBreakdown {
    pub const ADDEND_NAMES: [&'static str; 9] = [
        "grad_phi",
        "well",
        "nutrient",
        "kinetic",
        "damage_grad",
        "constraint",
        "perturb",
        "elastic",
        "mu_reg",
    ];

    pub fn addends(&self) -> [f64; 9] {
        [
            self.grad_phi,
            self.well,
            self.nutrient,
            self.kinetic,
            self.damage_grad,
            self.constraint,
            self.perturb,
            self.elastic,
            self.mu_reg,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.addends().iter().all(|v| v.is_finite())
            && self.total.is_finite()
            && self.dissipation.is_finite()
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticError {
    #[error("energy inequality violated at step {step}: slack {slack:e}")]
    Violation { step: usize, slack: f64 },
    #[error("energy check needs g = 0, supply = 0, alpha = 0, c_pi = 0 and f = 0")]
    SourcesOn,
    #[error("{field} out of bounds: {extremum:e} at cell ({i}, {j})")]
    Bounds {
        field: &'static str,
        extremum: f64,
        i: usize,
        j: usize,
    },
    #[error("refinement study needs a halving ladder with a common final time: {0}")]
    BadLadder(String),
    #[error(transparent)]
    Step(#[from] StepError),
}

fn cell_sum(f: impl Fn(usize) -> f64, n: usize) -> f64 {
    (0..n).map(f).sum()
}

/// Discrete energy of a state; `dissipation` is left at zero.
pub fn energy(state: &StepState, params: &ModelParams) -> EnergyBreakdown {
    let grid = *state.grid();
    let n = grid.n_cells();
    let dx = grid.cell_measure();
    let phi = state.phi.values();
    let z = state.z.values();
    let g_phi = grad_faces(&state.phi, Closure::NeumannZero);
    let strain = sym_grad(&state.u);

    let grad_phi = 0.5 * g_phi.interior_inner(&g_phi);
    let well = cell_sum(|c| psi(phi[c]).value, n) * dx;
    let nutrient = 0.5 * inner(&state.sigma, &state.sigma);
    let kinetic = 0.5 * state.v.inner(&state.v);
    let damage_grad = p_energy(&state.z, params.p);
    let constraint = cell_sum(|c| beta_tau(z[c], params.tau).0, n) * dx;
    let perturb = cell_sum(|c| pi_hat(z[c], params.c_pi), n) * dx;
    let elastic = cell_sum(|c| params.elastic(phi[c], strain.get(c), z[c]).w, n) * dx;
    let mu_reg = 0.5 * params.tau * inner(&state.mu, &state.mu);

    let mut e = EnergyBreakdown {
        grad_phi,
        well,
        nutrient,
        kinetic,
        damage_grad,
        constraint,
        perturb,
        elastic,
        mu_reg,
        total: 0.0,
        dissipation: 0.0,
    };
    e.total = e.addends().iter().sum();
    e
}

/// Dissipation of the step `prev → next`:
/// `τ∫|∇μ|² + ∫|Δφ|² + τ∫|∇σ|² + τα∫_Γσ² + τ∫a(z)ω𝒞ε(v):ε(v) + ∫|Δz|²/τ`,
/// with `Δ` the step increment.
pub fn dissipation(prev: &StepState, next: &StepState, params: &ModelParams) -> f64 {
    let grid = *next.grid();
    let n = grid.n_cells();
    let dx = grid.cell_measure();
    let tau = params.tau;

    let g_mu = grad_faces(&next.mu, Closure::NeumannZero);
    let d_phi = next.phi.zip_map(&prev.phi, |a, b| a - b);
    let g_sigma = grad_faces(&next.sigma, Closure::NeumannZero);

    let (nx, ny) = (grid.nx(), grid.ny());
    let ax = robin_coefficient(params.alpha, grid.hx());
    let ay = robin_coefficient(params.alpha, grid.hy());
    let s = &next.sigma;
    let mut boundary = 0.0;
    for j in 0..ny {
        boundary += ax * (s.at(0, j).powi(2) + s.at(nx - 1, j).powi(2)) * grid.hy();
    }
    for i in 0..nx {
        boundary += ay * (s.at(i, 0).powi(2) + s.at(i, ny - 1).powi(2)) * grid.hx();
    }

    let strain_rate = sym_grad(&next.v);
    let z = next.z.values();
    let viscous = cell_sum(
        |c| {
            let e = strain_rate.get(c);
            params.a(z[c]) * params.omega * params.stiffness(e).ddot(&e)
        },
        n,
    ) * dx;
    let d_z = cell_sum(|c| (z[c] - prev.z.values()[c]).powi(2), n) * dx / tau;

    tau * g_mu.interior_inner(&g_mu)
        + inner(&d_phi, &d_phi)
        + tau * g_sigma.interior_inner(&g_sigma)
        + tau * boundary
        + tau * viscous
        + d_z
}

/// Energy of `next` with the dissipation of the step from `prev`.
pub fn energy_step(prev: &StepState, next: &StepState, params: &ModelParams) -> EnergyBreakdown {
    EnergyBreakdown {
        dissipation: dissipation(prev, next, params),
        ..energy(next, params)
    }
}

/// Outcome of one energy-inequality check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyCheck {
    pub step: usize,
    pub total_prev: f64,
    pub total_next: f64,
    pub dissipation: f64,
    pub tolerance: f64,
    /// `total_prev + tolerance − total_next − dissipation`; non-negative on pass.
    pub slack: f64,
}

/// Tolerance of the per-step energy inequality.
pub fn energy_tolerance(total_prev: f64) -> f64 {
    1e-8 * (1.0 + total_prev.abs())
}

/// Asserts `E(next) + D(prev → next) ≤ E(prev) + 1e−8·(1 + |E(prev)|)`.
/// Only meaningful with every source switched off.
pub fn check_energy_step(
    prev: &StepState,
    next: &StepState,
    params: &ModelParams,
) -> Result<EnergyCheck, DiagnosticError> {
    if !params.sources_are_off() {
        return Err(DiagnosticError::SourcesOn);
    }
    let e_prev = energy(prev, params);
    let e_next = energy_step(prev, next, params);
    let tolerance = energy_tolerance(e_prev.total);
    let slack = e_prev.total + tolerance - e_next.total - e_next.dissipation;
    if !(slack >= 0.0) {
        return Err(DiagnosticError::Violation {
            step: next.k,
            slack,
        });
    }
    Ok(EnergyCheck {
        step: next.k,
        total_prev: e_prev.total,
        total_next: e_next.total,
        dissipation: e_next.dissipation,
        tolerance,
        slack,
    })
}

/// `⟨φ⟩ + τ⟨μ⟩`, conserved when the proliferation indicator is off.
pub fn modified_mass(state: &StepState, tau: f64) -> f64 {
    state.phi.mean() + tau * state.mu.mean()
}

/// Extremes of the nutrient and damage fields. `z_excursion` is
/// `max(−min z, max z − 1, 0)/τ`, the observed constant `C_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundsReport {
    pub sigma_min: f64,
    pub sigma_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub z_excursion: f64,
}

/// Asserts `−1e−12 ≤ σ ≤ M + 1e−12`; damage excursions are reported only.
pub fn check_bounds(state: &StepState, params: &ModelParams) -> Result<BoundsReport, DiagnosticError> {
    let grid = *state.grid();
    let (kmin, sigma_min) = state.sigma.argmin();
    let (kmax, sigma_max) = state.sigma.argmax();
    let locate = |k: usize| (k % grid.nx(), k / grid.nx());
    if !(sigma_min >= -NUTRIENT_SLACK) {
        let (i, j) = locate(kmin);
        return Err(DiagnosticError::Bounds {
            field: "sigma",
            extremum: sigma_min,
            i,
            j,
        });
    }
    if !(sigma_max <= params.supply_bound() + NUTRIENT_SLACK) {
        let (i, j) = locate(kmax);
        return Err(DiagnosticError::Bounds {
            field: "sigma",
            extremum: sigma_max,
            i,
            j,
        });
    }
    let (z_min, z_max) = (state.z.min(), state.z.max());
    Ok(BoundsReport {
        sigma_min,
        sigma_max,
        z_min,
        z_max,
        z_excursion: (-z_min).max(z_max - 1.0).max(0.0) / params.tau,
    })
}

/// Result of a time-step refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyTable {
    pub taus: Vec<f64>,
    /// `‖w_τ − w_{τ/2}‖` in discrete `L²(0,T;L²)` for each adjacent pair.
    pub distances: Vec<f64>,
    /// `distances[i] / distances[i+1]`.
    pub ratios: Vec<f64>,
}

/// Exact `L²(0,T;L²)` distance between the piecewise-linear interpolants of
/// a coarse history (step `2τ`) and a fine history (step `τ`).
pub fn interpolant_distance(coarse: &[ScalarField], fine: &[ScalarField], tau_fine: f64) -> f64 {
    assert_eq!(fine.len(), 2 * (coarse.len() - 1) + 1, "histories do not pair up");
    let coarse_at = |j: usize| -> ScalarField {
        if j.is_multiple_of(2) {
            coarse[j / 2].clone()
        } else {
            coarse[j / 2].zip_map(&coarse[j / 2 + 1], |a, b| 0.5 * (a + b))
        }
    };
    let diff = |j: usize| fine[j].zip_map(&coarse_at(j), |a, b| a - b);
    let mut acc = 0.0;
    let mut a = diff(0);
    for j in 1..fine.len() {
        let b = diff(j);
        // ∫ over one interval of the squared linear blend.
        let s = cell_sum(
            |c| {
                let (x, y) = (a.values()[c], b.values()[c]);
                x * x + x * y + y * y
            },
            a.grid().n_cells(),
        );
        acc += tau_fine / 3.0 * s * a.grid().cell_measure();
        a = b;
    }
    acc.sqrt()
}

/// Runs `data` to `t_final` with each step in `taus` and returns the field
/// history `w^0, …, w^K`.
pub fn field_history(
    data: &InitialData,
    params: &ModelParams,
    t_final: f64,
    field: Field,
) -> Result<Vec<ScalarField>, StepError> {
    let steps = (t_final / params.tau).round() as usize;
    let mut state = initialize(data, params)?;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(field.of(&state).clone());
    for _ in 0..steps {
        state = advance(&state, params)?.0;
        out.push(field.of(&state).clone());
    }
    Ok(out)
}

fn check_ladder(taus: &[f64], t_final: f64) -> Result<(), DiagnosticError> {
    if taus.is_empty() {
        return Err(DiagnosticError::BadLadder("no time steps".into()));
    }
    for w in taus.windows(2) {
        if ((w[0] / w[1]) - 2.0).abs() > 1e-9 {
            return Err(DiagnosticError::BadLadder(format!(
                "{} is not half of {}",
                w[1], w[0]
            )));
        }
    }
    for &tau in taus {
        let k = t_final / tau;
        if !(tau > 0.0) || (k - k.round()).abs() > 1e-9 * k.max(1.0) || k.round() < 1.0 {
            return Err(DiagnosticError::BadLadder(format!(
                "T = {t_final} is not a multiple of tau = {tau}"
            )));
        }
    }
    Ok(())
}

/// Runs one simulation per `τ` (in parallel) and compares adjacent levels.
pub fn tau_refinement_study(
    data: &InitialData,
    params: &ModelParams,
    taus: &[f64],
    t_final: f64,
    field: Field,
) -> Result<CauchyTable, DiagnosticError> {
    check_ladder(taus, t_final)?;
    let histories: Vec<Result<Vec<ScalarField>, StepError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = taus
            .iter()
            .map(|&tau| {
                let p = ModelParams {
                    tau,
                    ..params.clone()
                };
                scope.spawn(move || field_history(data, &p, t_final, field))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("study worker panicked"))
            .collect()
    });
    let histories = histories.into_iter().collect::<Result<Vec<_>, _>>()?;
    let distances: Vec<f64> = histories
        .windows(2)
        .zip(&taus[1..])
        .map(|(pair, &tau_fine)| interpolant_distance(&pair[0], &pair[1], tau_fine))
        .collect();
    let ratios = distances.windows(2).map(|d| d[0] / d[1]).collect();
    Ok(CauchyTable {
        taus: taus.to_vec(),
        distances,
        ratios,
    })
}
