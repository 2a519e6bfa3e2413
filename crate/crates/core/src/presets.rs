//! Named initial-data presets.

use std::fmt;
use std::str::FromStr;

use crate::constitutive::ModelParams;
use crate::grid::{Grid, ScalarField, VectorField};
use crate::rng::Lcg;
use crate::stepper::InitialData;

/// Interface width of the lesion-disc damage crater.
pub const LESION_WIDTH: f64 = 0.5;

/// Passes of the smoothing stencil applied to random data.
pub const SMOOTHING_PASSES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// `φ ≡ 1`, `σ ≡ σ_s`, `z ≡ 0.5`, `u = v = 0`.
    WellBottom,
    /// Seeded uniform noise, smoothed: `φ ∈ [−1, 1]`, `σ ∈ [0, M]`, `z ∈ [0, 1]`.
    RandomSmooth { seed: u64 },
    /// A damage crater of radius `r` centred at `(cx, cy)` with a tumour
    /// ring on its rim.
    LesionDisc { cx: f64, cy: f64, r: f64 },
}

impl Default for Preset {
    fn default() -> Self {
        Preset::RandomSmooth { seed: 1 }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Preset::WellBottom => f.write_str("well-bottom"),
            Preset::RandomSmooth { seed } => write!(f, "random-smooth({seed})"),
            Preset::LesionDisc { cx, cy, r } => write!(f, "lesion-disc({cx:?},{cy:?},{r:?})"),
        }
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "well-bottom" {
            return Ok(Preset::WellBottom);
        }
        let (name, args) = s
            .strip_suffix(')')
            .and_then(|body| body.split_once('('))
            .ok_or_else(|| format!("unknown preset `{s}`"))?;
        let args: Vec<&str> = args.split(',').map(str::trim).collect();
        match (name.trim(), args.as_slice()) {
            ("random-smooth", [seed]) => seed
                .parse()
                .map(|seed| Preset::RandomSmooth { seed })
                .map_err(|_| format!("bad seed `{seed}`")),
            ("lesion-disc", [cx, cy, r]) => {
                let num = |v: &str| v.parse::<f64>().map_err(|_| format!("bad number `{v}`"));
                Ok(Preset::LesionDisc {
                    cx: num(cx)?,
                    cy: num(cy)?,
                    r: num(r)?,
                })
            }
            _ => Err(format!("unknown preset `{s}`")),
        }
    }
}

/// One pass of `f ← f + (1/8)(Σ neighbours − 4f)` with mirrored neighbours
/// at the boundary. Preserves the range of `f`.
pub fn smooth(f: &ScalarField) -> ScalarField {
    let grid = *f.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = f.clone();
    for j in 0..ny {
        for i in 0..nx {
            let c = f.at(i, j);
            let w = if i > 0 { f.at(i - 1, j) } else { c };
            let e = if i + 1 < nx { f.at(i + 1, j) } else { c };
            let s = if j > 0 { f.at(i, j - 1) } else { c };
            let n = if j + 1 < ny { f.at(i, j + 1) } else { c };
            out.values_mut()[grid.cell(i, j)] = c + 0.125 * (w + e + s + n - 4.0 * c);
        }
    }
    out
}

impl Preset {
    pub fn check(&self, grid: &Grid) -> Result<(), String> {
        if let Preset::LesionDisc { cx, cy, r } = *self {
            if !(r > 0.0 && r.is_finite()) {
                return Err("lesion radius must be positive".into());
            }
            if !(cx >= 0.0 && cx <= grid.lx() && cy >= 0.0 && cy <= grid.ly()) {
                return Err("lesion centre must lie in the domain".into());
            }
        }
        Ok(())
    }

    pub fn build(&self, grid: Grid, params: &ModelParams) -> InitialData {
        let m = params.supply_bound();
        let zero = VectorField::zeros(grid);
        match *self {
            Preset::WellBottom => InitialData {
                phi: ScalarField::constant(grid, 1.0),
                sigma: ScalarField::constant(grid, params.sigma_s),
                z: ScalarField::constant(grid, 0.5),
                u: zero.clone(),
                v: zero,
            },
            Preset::RandomSmooth { seed } => {
                let mut rng = Lcg::new(seed);
                let n = grid.n_cells();
                let mut noise = |lo: f64, hi: f64| {
                    let mut f = ScalarField::from_values(grid, rng.fill(n, lo, hi))
                        .expect("finite samples");
                    for _ in 0..SMOOTHING_PASSES {
                        f = smooth(&f);
                    }
                    // Rounding in the stencil may leave the range by an ulp.
                    f.map(|v| v.clamp(lo, hi))
                };
                let phi = noise(-1.0, 1.0);
                let sigma = noise(0.0, m);
                let z = noise(0.0, 1.0);
                InitialData {
                    phi,
                    sigma,
                    z,
                    u: zero.clone(),
                    v: zero,
                }
            }
            Preset::LesionDisc { cx, cy, r } => {
                let dist = |x: f64, y: f64| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
                let z = ScalarField::from_fn(grid, |x, y| {
                    0.5 * (1.0 + ((dist(x, y) - r) / LESION_WIDTH).tanh())
                });
                let phi = ScalarField::from_fn(grid, |x, y| {
                    2.0 * (-((dist(x, y) - 1.2 * r) / (0.4 * r)).powi(2)).exp() - 1.0
                });
                let sigma = z.map(|zc| (m * (0.5 + 0.5 * zc)).min(m));
                InitialData {
                    phi,
                    sigma,
                    z,
                    u: zero.clone(),
                    v: zero,
                }
            }
        }
    }
}
