//! With spatially uniform data the damage minimiser is uniform, so the step
//! reduces to a scalar problem that a dense search can solve independently.

mod common;

use tumour_damage::constitutive::ModelParams;
use tumour_damage::grid::Grid;
use tumour_damage::rng::Lcg;
use tumour_damage::solvers::minimize_convex;
use tumour_damage::stepper::DamageFunctional;

/// Per-cell objective written from the split: convex part of `h` is
/// `h + ½Kz²`, with `K` the largest curvature of the quintic ramp.
fn scalar_objective(z: f64, zp: f64, q: f64, p: &ModelParams) -> f64 {
    let k = p.h_star * 10.0 / 3f64.sqrt();
    let gap = z - z.clamp(0.0, 1.0);
    0.5 * z * z / p.tau - zp * z / p.tau + gap * gap / (2.0 * p.tau) - p.c_pi * zp * z
        + 0.5 * (common::h_ref(z, p) + 0.5 * k * z * z) * q
        - 0.5 * k * zp * q * z
}

fn search(f: impl Fn(f64) -> f64) -> f64 {
    let (mut lo, mut hi) = (-3.0, 4.0);
    for _ in 0..6 {
        let n = 2000;
        let h = (hi - lo) / n as f64;
        let best = (0..=n)
            .map(|i| lo + i as f64 * h)
            .min_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        lo = best - 2.0 * h;
        hi = best + 2.0 * h;
    }
    0.5 * (lo + hi)
}

#[test]
fn uniform_minimiser_matches_a_dense_search() {
    let grid = Grid::new(4, 4, 2.0, 2.0).unwrap();
    let mut rng = Lcg::new(21);
    for _ in 0..25 {
        let p = ModelParams {
            tau: 10f64.powf(rng.uniform(-3.0, -1.0)),
            h_star: rng.uniform(0.0, 4.0),
            c_pi: rng.uniform(0.0, 2.0),
            ..Default::default()
        };
        let zp = rng.uniform(0.0, 1.0);
        let q = rng.uniform(0.0, 20.0);
        let n = grid.n_cells();
        let f = DamageFunctional::from_parts(grid, vec![zp; n], vec![q; n], &p);
        let start: Vec<f64> = rng.fill(n, 0.0, 1.0);
        let (z, _) = minimize_convex(&f, &start, 1e-12, 500).unwrap();
        let want = search(|z| scalar_objective(z, zp, q, &p));
        for zc in z {
            assert!((zc - want).abs() < 1e-7, "{zc} vs {want}");
        }
    }
}
