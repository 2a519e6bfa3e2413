use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid parameter `{field}`: {constraint}")]
pub struct ParamError {
    pub field: &'static str,
    pub constraint: &'static str,
}

/// Proliferation indicator `g(φ, z)` multiplying the mass source and the
/// nutrient consumption.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Indicator {
    /// `clamp((1 + φ)/2, 0, 1)`.
    Tumour,
    /// `g ≡ 0`.
    Off,
}

/// Treatment term `f(t)`, constant in space.
#[derive(Debug, Clone, PartialEq)]
pub enum Treatment {
    Constant(f64),
    /// `values[n]` on `[n·interval, (n+1)·interval)`; the last value holds
    /// for all later times.
    Steps { interval: f64, values: Vec<f64> },
}

impl Treatment {
    pub fn at(&self, t: f64) -> f64 {
        match self {
            Treatment::Constant(f) => *f,
            Treatment::Steps { interval, values } => {
                let n = (t / interval).floor().max(0.0) as usize;
                values[n.min(values.len() - 1)]
            }
        }
    }

    /// Exact mean of `f` over `[t0, t1]`.
    pub fn mean(&self, t0: f64, t1: f64) -> f64 {
        match self {
            Treatment::Constant(f) => *f,
            Treatment::Steps { interval, values } => {
                if t1 <= t0 {
                    return self.at(t0);
                }
                let last = values.len() - 1;
                let mut acc = 0.0;
                let mut a = t0;
                while a < t1 {
                    let n = ((a / interval).floor().max(0.0) as usize).min(last);
                    let b = if n == last {
                        t1
                    } else {
                        ((n + 1) as f64 * interval).min(t1)
                    };
                    // Guard against a stall when `a` sits on a breakpoint up to rounding.
                    let b = if b <= a { t1.min(a + interval) } else { b };
                    acc += values[n] * (b - a);
                    a = b;
                }
                acc / (t1 - t0)
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Treatment::Constant(f) => *f == 0.0,
            Treatment::Steps { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }
}

/// Solver tolerances and iteration limits.
#[derive(Debug, Clone, PartialEq)]
pub struct Numerics {
    /// Floor of the relative residual for the Newton inner linear solves.
    pub linear_tol: f64,
    /// Relative residual for the nutrient solve.
    pub nutrient_tol: f64,
    /// Relative residual for the displacement solve.
    pub displacement_tol: f64,
    /// Absolute max-norm of the Cahn-Hilliard residual.
    pub newton_tol: f64,
    /// Max-norm of the damage Euler-Lagrange residual.
    pub damage_tol: f64,
    pub max_linear_iter: usize,
    pub max_newton_iter: usize,
    pub max_damage_iter: usize,
    /// Number of times a failed step is retried with halved sub-steps.
    pub max_retries: usize,
    /// Keep the `τ·D_τ μ` term in the mass balance. Only switched off for
    /// negative-control runs.
    pub mu_regularisation: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            linear_tol: 1e-10,
            nutrient_tol: 1e-13,
            displacement_tol: 1e-12,
            newton_tol: 1e-9,
            damage_tol: 1e-9,
            max_linear_iter: 5000,
            max_newton_iter: 50,
            max_damage_iter: 5000,
            max_retries: 3,
            mu_regularisation: true,
        }
    }
}

/// Constitutive constants, function selectors and the time step.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub tau: f64,
    pub lambda_p: f64,
    pub lambda_a: f64,
    pub lambda_c: f64,
    pub sigma_s: f64,
    pub sigma_gamma: f64,
    pub alpha: f64,
    /// Vascular supply rate: `Λ_s(z) = lambda_s0·clamp(z, 0, 1)`.
    pub lambda_s0: f64,
    pub treatment: Treatment,
    pub indicator: Indicator,
    pub lame_lambda: f64,
    pub lame_mu: f64,
    pub omega: f64,
    pub a_lo: f64,
    pub a_hi: f64,
    pub h_star: f64,
    /// Eigenstrain scale, `ℛ = r0·I`.
    pub r0: f64,
    pub p: f64,
    pub c_pi: f64,
    pub numerics: Numerics,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            tau: 1e-3,
            lambda_p: 1.0,
            lambda_a: 0.1,
            lambda_c: 1.0,
            sigma_s: 1.0,
            sigma_gamma: 1.0,
            alpha: 1.0,
            lambda_s0: 1.0,
            treatment: Treatment::Constant(0.0),
            indicator: Indicator::Tumour,
            lame_lambda: 1.0,
            lame_mu: 1.0,
            omega: 1.0,
            a_lo: 1.0,
            a_hi: 2.0,
            h_star: 1.0,
            r0: 0.05,
            p: 4.0,
            c_pi: 0.1,
            numerics: Numerics::default(),
        }
    }
}

fn check(ok: bool, field: &'static str, constraint: &'static str) -> Result<(), ParamError> {
    if ok {
        Ok(())
    } else {
        Err(ParamError { field, constraint })
    }
}

impl ModelParams {
    /// Supply bound `M = max(σ_s, σ_Γ)`.
    pub fn supply_bound(&self) -> f64 {
        self.sigma_s.max(self.sigma_gamma)
    }

    /// Checks every sign and range constraint. Non-finite values fail the
    /// comparison they appear in.
    pub fn validate(&self) -> Result<(), ParamError> {
        let nonneg = |v: f64| v.is_finite() && v >= 0.0;
        let pos = |v: f64| v.is_finite() && v > 0.0;
        check(pos(self.tau), "tau", "tau > 0")?;
        check(nonneg(self.lambda_p), "lambda_p", "lambda_p >= 0")?;
        check(nonneg(self.lambda_a), "lambda_a", "lambda_a >= 0")?;
        check(nonneg(self.lambda_c), "lambda_c", "lambda_c >= 0")?;
        check(nonneg(self.sigma_s), "sigma_s", "sigma_s >= 0")?;
        check(nonneg(self.sigma_gamma), "sigma_gamma", "sigma_gamma >= 0")?;
        check(nonneg(self.alpha), "alpha", "alpha >= 0")?;
        check(nonneg(self.lambda_s0), "lambda_s0", "lambda_s0 >= 0")?;
        match &self.treatment {
            Treatment::Constant(f) => check(f.is_finite(), "f", "f finite")?,
            Treatment::Steps { interval, values } => {
                check(pos(*interval), "f_interval", "f_interval > 0")?;
                check(!values.is_empty(), "f_series", "at least one value")?;
                check(values.iter().all(|v| v.is_finite()), "f_series", "values finite")?;
            }
        }
        check(nonneg(self.lame_lambda), "lame_lambda", "lame_lambda >= 0")?;
        check(pos(self.lame_mu), "lame_mu", "lame_mu > 0")?;
        check(pos(self.omega), "omega", "omega > 0")?;
        check(pos(self.a_lo), "a_lo", "a_lo > 0")?;
        check(
            self.a_hi.is_finite() && self.a_hi >= self.a_lo,
            "a_hi",
            "a_hi >= a_lo",
        )?;
        check(nonneg(self.h_star), "h_star", "h_star >= 0")?;
        check(self.r0.is_finite(), "r0", "r0 finite")?;
        check(self.p.is_finite() && self.p > 2.0, "p", "p > 2")?;
        check(nonneg(self.c_pi), "c_pi", "c_pi >= 0")?;
        let n = &self.numerics;
        for (v, name) in [
            (n.linear_tol, "linear_tol"),
            (n.nutrient_tol, "nutrient_tol"),
            (n.displacement_tol, "displacement_tol"),
            (n.newton_tol, "newton_tol"),
            (n.damage_tol, "damage_tol"),
        ] {
            check(pos(v), name, "tolerance > 0")?;
        }
        check(n.max_linear_iter > 0, "max_linear_iter", "> 0")?;
        check(n.max_newton_iter > 0, "max_newton_iter", "> 0")?;
        check(n.max_damage_iter > 0, "max_damage_iter", "> 0")?;
        Ok(())
    }

    /// Parameters with every source and exchange term switched off:
    /// `g ≡ 0`, `Λ_s ≡ 0`, `α = 0`, `c_π = 0`, `f = 0`.
    pub fn sources_off(&self) -> ModelParams {
        ModelParams {
            indicator: Indicator::Off,
            lambda_s0: 0.0,
            alpha: 0.0,
            c_pi: 0.0,
            treatment: Treatment::Constant(0.0),
            ..self.clone()
        }
    }

    pub fn sources_are_off(&self) -> bool {
        self.indicator == Indicator::Off
            && self.lambda_s0 == 0.0
            && self.alpha == 0.0
            && self.c_pi == 0.0
            && self.treatment.is_zero()
    }
}
