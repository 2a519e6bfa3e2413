use super::{StepError, StepState};
use crate::grid::ScalarField;

/// Cell field selector for interpolation and refinement studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Phi,
    Mu,
    Sigma,
    Z,
}

impl Field {
    pub fn of<'a>(&self, s: &'a StepState) -> &'a ScalarField {
        match self {
            Field::Phi => &s.phi,
            Field::Mu => &s.mu,
            Field::Sigma => &s.sigma,
            Field::Z => &s.z,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Field::Phi => "phi",
            Field::Mu => "mu",
            Field::Sigma => "sigma",
            Field::Z => "z",
        }
    }
}

impl std::str::FromStr for Field {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "phi" => Ok(Field::Phi),
            "mu" => Ok(Field::Mu),
            "sigma" => Ok(Field::Sigma),
            "z" => Ok(Field::Z),
            other => Err(format!("unknown field `{other}`")),
        }
    }
}

/// Samples of the three time interpolants at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolants {
    /// Piecewise constant, `w̄(t) = w^k` on `((k−1)τ, kτ]`.
    pub upper: ScalarField,
    /// Retarded piecewise constant, `w̲(t) = w^{k−1}` on `((k−1)τ, kτ]`.
    pub lower: ScalarField,
    /// Piecewise linear through the nodal values.
    pub linear: ScalarField,
}

/// Evaluates the interpolants of `field` over a uniform history
/// `history[k]` at `t_k = k·τ`. At `t = 0` all three equal `w^0`.
pub fn interpolants(
    history: &[StepState],
    t: f64,
    field: Field,
) -> Result<Interpolants, StepError> {
    let first = history.first().ok_or(StepError::OutOfRange { t, t_max: 0.0 })?;
    let last = history.last().expect("non-empty");
    let t_max = last.t;
    let slack = 1e-12 * t_max.abs().max(1.0);
    if !(t >= first.t - slack && t <= t_max + slack) {
        return Err(StepError::OutOfRange { t, t_max });
    }
    if history.len() == 1 || t <= first.t + slack {
        let w = field.of(first).clone();
        return Ok(Interpolants {
            upper: w.clone(),
            lower: w.clone(),
            linear: w,
        });
    }
    // First k with t ≤ t_k.
    let k = history
        .iter()
        .position(|s| t <= s.t + slack)
        .unwrap_or(history.len() - 1)
        .max(1);
    let (a, b) = (&history[k - 1], &history[k]);
    let theta = ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0);
    let (wa, wb) = (field.of(a), field.of(b));
    Ok(Interpolants {
        upper: wb.clone(),
        lower: wa.clone(),
        linear: wa.zip_map(wb, |x, y| (1.0 - theta) * x + theta * y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{inner, Grid, VectorField};

    fn history(grid: Grid, tau: f64, n: usize) -> Vec<StepState> {
        (0..=n)
            .map(|k| {
                let s = (k as f64 * 0.7).sin();
                StepState {
                    phi: ScalarField::from_fn(grid, |x, y| s * x - y * k as f64),
                    mu: ScalarField::zeros(grid),
                    sigma: ScalarField::zeros(grid),
                    z: ScalarField::zeros(grid),
                    u: VectorField::zeros(grid),
                    v: VectorField::zeros(grid),
                    u_prev: VectorField::zeros(grid),
                    k,
                    t: k as f64 * tau,
                }
            })
            .collect()
    }

    #[test]
    fn node_and_midpoint_values() {
        let grid = Grid::unit_square(4).unwrap();
        let h = history(grid, 0.1, 5);
        let at = interpolants(&h, h[3].t, Field::Phi).unwrap();
        assert_eq!(at.upper, h[3].phi);
        assert_eq!(at.linear, h[3].phi);
        assert_eq!(at.lower, h[2].phi);
        let mid = interpolants(&h, 0.25, Field::Phi).unwrap();
        let avg = h[2].phi.zip_map(&h[3].phi, |a, b| 0.5 * (a + b));
        assert!(mid.linear.max_abs_diff(&avg) < 1e-14);
        assert!(matches!(
            interpolants(&h, 0.7, Field::Phi),
            Err(StepError::OutOfRange { .. })
        ));
    }

    #[test]
    fn linear_is_closer_to_lower_than_upper_in_l2() {
        let grid = Grid::unit_square(4).unwrap();
        let h = history(grid, 0.1, 6);
        // Midpoint quadrature on a fine time grid.
        let m = 600;
        let dt = 0.6 / m as f64;
        let (mut lin, mut pc) = (0.0, 0.0);
        for i in 0..m {
            let t = (i as f64 + 0.5) * dt;
            let s = interpolants(&h, t, Field::Phi).unwrap();
            let d1 = s.linear.zip_map(&s.lower, |a, b| a - b);
            let d2 = s.upper.zip_map(&s.lower, |a, b| a - b);
            lin += inner(&d1, &d1) * dt;
            pc += inner(&d2, &d2) * dt;
        }
        assert!(lin <= pc);
    }
}
