//! Model functions: double-well potential, damage-dependent stiffness and
//! viscosity, sources, elastic energy and the regularised damage constraint.

mod params;

pub use params::{Indicator, ModelParams, Numerics, ParamError, Treatment};

use crate::tensor::Sym2;

/// A scalar function together with a convex/concave decomposition
/// `s = š + ŝ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub value: f64,
    pub convex_value: f64,
    pub concave_value: f64,
    pub convex_deriv: f64,
    pub concave_deriv: f64,
}

impl Split {
    pub fn deriv(&self) -> f64 {
        self.convex_deriv + self.concave_deriv
    }
}

/// Double well `Ψ(r) = ¼(1 − r²)²` split as `¼r⁴ + (¼ − ½r²)`.
pub fn psi(r: f64) -> Split {
    let r2 = r * r;
    Split {
        value: 0.25 * (1.0 - r2) * (1.0 - r2),
        convex_value: 0.25 * r2 * r2,
        concave_value: 0.25 - 0.5 * r2,
        convex_deriv: r2 * r,
        concave_deriv: -r,
    }
}

/// `sup |q''|` of the quintic ramp, attained at `t = ½ ± √3/6`.
pub const RAMP_CURVATURE: f64 = 5.773_502_691_896_258;

/// Quintic C² ramp `q(t) = 6t⁵ − 15t⁴ + 10t³` on `[0, 1]`, extended by
/// constants. Returns `(q, q', q'')`.
pub fn ramp(t: f64) -> (f64, f64, f64) {
    if t <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if t >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let t2 = t * t;
        let q = t2 * t * (10.0 + t * (-15.0 + 6.0 * t));
        let dq = 30.0 * t2 * (1.0 - t) * (1.0 - t);
        let ddq = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
        (q, dq, ddq)
    }
}

/// Stiffness degradation `h(z) = h*·q(z)` with the split
/// `ȟ = h + ½Kz²`, `ĥ = −½Kz²`, `K = h*·sup|q''|`.
pub fn h_split(z: f64, h_star: f64) -> Split {
    let (q, dq, _) = ramp(z);
    let k = h_star * RAMP_CURVATURE;
    let h = h_star * q;
    Split {
        value: h,
        convex_value: h + 0.5 * k * z * z,
        concave_value: -0.5 * k * z * z,
        convex_deriv: h_star * dq + k * z,
        concave_deriv: -k * z,
    }
}

/// `(h(z), h'(z))` without the split.
pub fn h_of_z(z: f64, h_star: f64) -> (f64, f64) {
    let (q, dq, _) = ramp(z);
    (h_star * q, h_star * dq)
}

/// Viscosity coefficient `a(z) = a_lo + (a_hi − a_lo)·q(z)`.
pub fn a_of_z(z: f64, a_lo: f64, a_hi: f64) -> f64 {
    a_lo + (a_hi - a_lo) * ramp(z).0
}

/// Moreau-Yosida regularisation of the indicator of `[0, 1]`:
/// `(dist(z, [0,1])²/(2τ), (z − proj(z))/τ)`.
pub fn beta_tau(z: f64, tau: f64) -> (f64, f64) {
    let gap = z - z.clamp(0.0, 1.0);
    (0.5 * gap * gap / tau, gap / tau)
}

/// Indicator of `[0, 1]`: `0` inside, `+∞` outside.
pub fn beta_hat(z: f64) -> f64 {
    if (0.0..=1.0).contains(&z) {
        0.0
    } else {
        f64::INFINITY
    }
}

/// `π(z) = −c_π·z`.
pub fn pi_of_z(z: f64, c_pi: f64) -> f64 {
    -c_pi * z
}

/// Concave primitive `π̂(z) = −½c_π·z²`.
pub fn pi_hat(z: f64, c_pi: f64) -> f64 {
    -0.5 * c_pi * z * z
}

/// Isotropic stiffness `𝒞e = 2μ_L e + λ_L tr(e) I`.
pub fn elastic_apply(e: Sym2, lame_lambda: f64, lame_mu: f64) -> Sym2 {
    2.0 * lame_mu * e + lame_lambda * e.trace() * Sym2::IDENTITY
}

/// Elastic energy density and its partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticParts {
    pub w: f64,
    pub w_phi: f64,
    pub w_e: Sym2,
    pub w_z: f64,
}

impl ModelParams {
    pub fn stiffness(&self, e: Sym2) -> Sym2 {
        elastic_apply(e, self.lame_lambda, self.lame_mu)
    }

    pub fn eigenstrain(&self) -> Sym2 {
        self.r0 * Sym2::IDENTITY
    }

    /// Elastic strain `η = e − ℛφ`.
    pub fn elastic_strain(&self, phi: f64, e: Sym2) -> Sym2 {
        e - phi * self.eigenstrain()
    }

    /// `𝒞η:η`.
    pub fn strain_energy_density(&self, phi: f64, e: Sym2) -> f64 {
        let eta = self.elastic_strain(phi, e);
        self.stiffness(eta).ddot(&eta)
    }

    /// `𝒞ℛ:ℛ`, the curvature of `W` in `φ` per unit `h`.
    pub fn eigenstrain_stiffness(&self) -> f64 {
        let r = self.eigenstrain();
        self.stiffness(r).ddot(&r)
    }

    /// `W = ½h(z)𝒞η:η`, `W_φ = −h(z)𝒞η:ℛ`, `W_e = h(z)𝒞η`,
    /// `W_z = ½h'(z)𝒞η:η`.
    pub fn elastic(&self, phi: f64, e: Sym2, z: f64) -> ElasticParts {
        let (h, dh) = h_of_z(z, self.h_star);
        let eta = self.elastic_strain(phi, e);
        let stress = self.stiffness(eta);
        let q = stress.ddot(&eta);
        ElasticParts {
            w: 0.5 * h * q,
            w_phi: -h * stress.ddot(&self.eigenstrain()),
            w_e: h * stress,
            w_z: 0.5 * dh * q,
        }
    }

    pub fn h_split(&self, z: f64) -> Split {
        h_split(z, self.h_star)
    }

    /// `K = h*·sup|q''|`, the concave-split constant of `h`.
    pub fn h_curvature(&self) -> f64 {
        self.h_star * RAMP_CURVATURE
    }

    pub fn a(&self, z: f64) -> f64 {
        a_of_z(z, self.a_lo, self.a_hi)
    }

    pub fn indicator(&self, phi: f64, _z: f64) -> f64 {
        match self.indicator {
            Indicator::Tumour => (0.5 * (1.0 + phi)).clamp(0.0, 1.0),
            Indicator::Off => 0.0,
        }
    }

    /// Vascular supply `Λ_s(z) = λ_s0·clamp(z, 0, 1)`.
    pub fn supply_rate(&self, z: f64) -> f64 {
        self.lambda_s0 * z.clamp(0.0, 1.0)
    }

    pub fn pi(&self, z: f64) -> f64 {
        pi_of_z(z, self.c_pi)
    }

    /// Mass source `U = (λ_p σ/(1 + |W_e|) − λ_a + f)·g(φ_prev, z_prev)`
    /// with the Frobenius norm of the lagged elastic stress.
    pub fn source_u(&self, sigma: f64, w_e_prev: Sym2, phi_prev: f64, z_prev: f64, f: f64) -> f64 {
        let g = self.indicator(phi_prev, z_prev);
        (self.lambda_p * sigma / (1.0 + w_e_prev.norm()) - self.lambda_a + f) * g
    }

    /// Nutrient source `S = −λ_c σ g + Λ_s(z_prev)(σ_s − σ)`.
    pub fn source_s(&self, sigma: f64, phi_prev: f64, z_prev: f64) -> f64 {
        -self.lambda_c * sigma * self.indicator(phi_prev, z_prev)
            + self.supply_rate(z_prev) * (self.sigma_s - sigma)
    }
}
