//! Discrete calculus on the staggered layout.
//!
//! `grad_faces`/`div_faces` and `sym_grad`/`div_tensor` are negative adjoints
//! of each other under the cell, face and vertex quadratures, so every
//! integration by parts used in the energy estimate has an exact discrete
//! counterpart.

use super::{FaceField, ScalarField, SymTensorField, VectorField};
use crate::tensor::Sym2;

/// Boundary closure for a cell-centred scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Closure {
    /// `∇f·ν = 0`.
    NeumannZero,
    /// `∇f·ν + α (f − f_Γ) = 0`, closed with a ghost value and a two-point
    /// face average.
    Robin { alpha: f64, boundary_value: f64 },
}

/// Effective boundary transfer coefficient of the Robin ghost closure:
/// eliminating the ghost value from `(g − s)/h + α((g + s)/2 − f_Γ) = 0`
/// gives the outward flux `−α/(1 + αh/2)·(s − f_Γ)`.
pub fn robin_coefficient(alpha: f64, h: f64) -> f64 {
    alpha / (1.0 + 0.5 * alpha * h)
}

/// Midpoint quadrature `∫_Ω f`.
pub fn integrate(f: &ScalarField) -> f64 {
    f.values().iter().sum::<f64>() * f.grid().cell_measure()
}

/// Cell quadrature `∫_Ω f g`.
pub fn inner(f: &ScalarField, g: &ScalarField) -> f64 {
    assert_eq!(f.grid(), g.grid(), "fields live on different grids");
    f.values()
        .iter()
        .zip(g.values())
        .map(|(a, b)| a * b)
        .sum::<f64>()
        * f.grid().cell_measure()
}

/// Two-point normal differences on every face; boundary faces take the
/// value dictated by `closure`.
pub fn grad_faces(f: &ScalarField, closure: Closure) -> FaceField {
    let grid = *f.grid();
    let (nx, ny, hx, hy) = (grid.nx(), grid.ny(), grid.hx(), grid.hy());
    let mut g = FaceField::zeros(grid);
    let v = f.values();

    for j in 0..ny {
        let row = j * nx;
        let base = j * (nx + 1);
        for i in 1..nx {
            g.x[base + i] = (v[row + i] - v[row + i - 1]) / hx;
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            g.y[j * nx + i] = (v[j * nx + i] - v[(j - 1) * nx + i]) / hy;
        }
    }

    if let Closure::Robin {
        alpha,
        boundary_value,
    } = closure
    {
        let ax = robin_coefficient(alpha, hx);
        let ay = robin_coefficient(alpha, hy);
        for j in 0..ny {
            let base = j * (nx + 1);
            g.x[base] = ax * (v[j * nx] - boundary_value);
            g.x[base + nx] = -ax * (v[j * nx + nx - 1] - boundary_value);
        }
        for i in 0..nx {
            g.y[i] = ay * (v[i] - boundary_value);
            g.y[ny * nx + i] = -ay * (v[(ny - 1) * nx + i] - boundary_value);
        }
    }
    g
}

/// Cell-wise flux divergence. For face data `g` vanishing on boundary faces,
/// `∫ div_faces(g)·f = −Σ_faces g·grad_faces(f)·hx·hy`.
pub fn div_faces(g: &FaceField) -> ScalarField {
    let grid = *g.grid();
    let (nx, ny, hx, hy) = (grid.nx(), grid.ny(), grid.hx(), grid.hy());
    let mut out = vec![0.0; grid.n_cells()];
    for j in 0..ny {
        let base = j * (nx + 1);
        for i in 0..nx {
            let dx = (g.x[base + i + 1] - g.x[base + i]) / hx;
            let dy = (g.y[(j + 1) * nx + i] - g.y[j * nx + i]) / hy;
            out[j * nx + i] = dx + dy;
        }
    }
    ScalarField::wrap(grid, out)
}

/// Five-point Laplacian with the given closure. Affine in `f` for a Robin
/// closure with non-zero boundary value.
pub fn laplacian(f: &ScalarField, closure: Closure) -> ScalarField {
    div_faces(&grad_faces(f, closure))
}

/// Per-cell quadrant gradients: each cell is split into four quadrants, and
/// quadrant `(east|west, north|south)` pairs the corresponding x-face and
/// y-face differences into a full 2D gradient.
fn quadrant_weights(
    z: &ScalarField,
    p: f64,
    mut visit: impl FnMut(usize, usize, [(f64, f64); 4]),
) -> FaceField {
    let grid = *z.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let g = grad_faces(z, Closure::NeumannZero);
    let mut kappa = FaceField::zeros(grid);
    let expo = 0.5 * (p - 2.0);
    for j in 0..ny {
        for i in 0..nx {
            let west = g.x_index(i, j);
            let east = g.x_index(i + 1, j);
            let south = g.y_index(i, j);
            let north = g.y_index(i, j + 1);
            let quads = [
                (g.x[east], g.y[north]),
                (g.x[east], g.y[south]),
                (g.x[west], g.y[north]),
                (g.x[west], g.y[south]),
            ];
            let w: [f64; 4] = quads.map(|(a, b)| (a * a + b * b).powf(expo));
            kappa.x[east] += 0.25 * (w[0] + w[1]);
            kappa.x[west] += 0.25 * (w[2] + w[3]);
            kappa.y[north] += 0.25 * (w[0] + w[2]);
            kappa.y[south] += 0.25 * (w[1] + w[3]);
            visit(i, j, quads);
        }
    }
    // Face coefficients multiply the face gradient; carry it along.
    for (k, gx) in kappa.x.iter_mut().zip(&g.x) {
        *k *= gx;
    }
    for (k, gy) in kappa.y.iter_mut().zip(&g.y) {
        *k *= gy;
    }
    kappa
}

/// Discrete p-Dirichlet energy `(1/p) ∫ |∇z|^p`, summed over cell quadrants
/// with weight `hx·hy/4` each. For `p = 2` it equals `½ Σ_faces |∇z|²·hx·hy`.
pub fn p_energy(z: &ScalarField, p: f64) -> f64 {
    let mut acc = 0.0;
    let half_p = 0.5 * p;
    quadrant_weights(z, p, |_, _, quads| {
        for (a, b) in quads {
            acc += (a * a + b * b).powf(half_p);
        }
    });
    acc * 0.25 * z.grid().cell_measure() / p
}

/// Discrete `Δ_p z = div(|∇z|^{p−2}∇z)` with zero-flux closure.
///
/// The face flux is the face gradient times the average of `|g_q|^{p−2}` over
/// the four quadrant gradients touching that face, which makes
/// `−p_laplacian(z)·hx·hy` the exact gradient of [`p_energy`].
pub fn p_laplacian(z: &ScalarField, p: f64) -> ScalarField {
    let flux = quadrant_weights(z, p, |_, _, _| {});
    div_faces(&flux)
}

#[inline]
fn cell_gradients(u: &VectorField, i: usize, j: usize) -> [[f64; 2]; 2] {
    let grid = u.grid();
    let (hx, hy) = (grid.hx(), grid.hy());
    let n00 = grid.node(i, j);
    let n10 = grid.node(i + 1, j);
    let n01 = grid.node(i, j + 1);
    let n11 = grid.node(i + 1, j + 1);
    let dx = |c: &[f64]| ((c[n10] - c[n00]) + (c[n11] - c[n01])) / (2.0 * hx);
    let dy = |c: &[f64]| ((c[n01] - c[n00]) + (c[n11] - c[n10])) / (2.0 * hy);
    [[dx(&u.u1), dy(&u.u1)], [dx(&u.u2), dy(&u.u2)]]
}

/// Cell-centred symmetric gradient `ε(u) = ½(∇u + ∇uᵗ)` from the four
/// corner vertices (bilinear differencing).
pub fn sym_grad(u: &VectorField) -> SymTensorField {
    let grid = *u.grid();
    let mut e = SymTensorField::zeros(grid);
    for (i, j) in grid.cells() {
        let d = cell_gradients(u, i, j);
        e.set(
            grid.cell(i, j),
            Sym2::new(d[0][0], d[1][1], 0.5 * (d[0][1] + d[1][0])),
        );
    }
    e
}

/// Vertex-valued divergence, the negative adjoint of [`sym_grad`]:
/// `Σ_nodes div_tensor(T)·w·hx·hy = −Σ_cells T:ε(w)·hx·hy` for every `w`
/// vanishing on the boundary. Boundary vertices are returned as zero.
pub fn div_tensor(t: &SymTensorField) -> VectorField {
    let grid = *t.grid();
    let (hx, hy) = (grid.hx(), grid.hy());
    let mut out = VectorField::zeros(grid);
    let cx = 0.5 / hx;
    let cy = 0.5 / hy;
    for (i, j) in grid.cells() {
        let s = t.get(grid.cell(i, j));
        // (node, ∂x weight, ∂y weight) for the four corners.
        let corners = [
            (grid.node(i, j), -cx, -cy),
            (grid.node(i + 1, j), cx, -cy),
            (grid.node(i, j + 1), -cx, cy),
            (grid.node(i + 1, j + 1), cx, cy),
        ];
        for (n, wx, wy) in corners {
            out.u1[n] -= s.xx * wx + s.xy * wy;
            out.u2[n] -= s.yy * wy + s.xy * wx;
        }
    }
    out.apply_dirichlet();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::rng::Lcg;
    use std::f64::consts::PI;

    fn random_field(grid: Grid, rng: &mut Lcg) -> ScalarField {
        ScalarField::from_values(grid, rng.fill(grid.n_cells(), -1.0, 1.0)).unwrap()
    }

    fn random_dirichlet(grid: Grid, rng: &mut Lcg) -> VectorField {
        let mut u = VectorField::zeros(grid);
        u.u1 = rng.fill(grid.n_nodes(), -1.0, 1.0);
        u.u2 = rng.fill(grid.n_nodes(), -1.0, 1.0);
        u.apply_dirichlet();
        u
    }

    #[test]
    fn integrate_examples() {
        let g = Grid::unit_square(16).unwrap();
        assert_eq!(integrate(&ScalarField::constant(g, 1.0)), 1.0);
        assert_eq!(integrate(&ScalarField::zeros(g)), 0.0);
        let g64 = Grid::unit_square(64).unwrap();
        let x = ScalarField::from_fn(g64, |x, _| x);
        assert!((integrate(&x) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn grad_of_constant_vanishes() {
        let g = Grid::new(6, 5, 2.0, 1.0).unwrap();
        let f = ScalarField::constant(g, 3.5);
        let d = grad_faces(&f, Closure::NeumannZero);
        assert!(d.x.iter().chain(&d.y).all(|&v| v == 0.0));
    }

    #[test]
    fn grad_of_linear_with_neumann_closure() {
        let g = Grid::unit_square(8).unwrap();
        let f = ScalarField::from_fn(g, |x, _| x);
        let d = grad_faces(&f, Closure::NeumannZero);
        for j in 0..8 {
            for i in 0..=8 {
                let v = d.x[d.x_index(i, j)];
                if i == 0 || i == 8 {
                    assert_eq!(v, 0.0);
                } else {
                    assert!((v - 1.0).abs() < 1e-12);
                }
            }
        }
        assert!(d.y.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn grad_of_quadratic_matches_derivative() {
        for n in [8, 16, 32] {
            let g = Grid::unit_square(n).unwrap();
            let f = ScalarField::from_fn(g, |x, _| x * x);
            let d = grad_faces(&f, Closure::NeumannZero);
            for i in 1..n {
                let xf = i as f64 * g.hx();
                let err = (d.x[d.x_index(i, 3)] - 2.0 * xf).abs();
                assert!(err < 1e-12, "n={n} i={i} err={err}");
            }
        }
    }

    #[test]
    fn robin_ghost_closure_balances_flux() {
        let g = Grid::new(4, 4, 1.0, 1.0).unwrap();
        let (alpha, sg) = (3.0, 0.7);
        let f = ScalarField::constant(g, 0.2);
        let d = grad_faces(
            &f,
            Closure::Robin {
                alpha,
                boundary_value: sg,
            },
        );
        // Rebuild the ghost value on the east face and check the balance.
        let h = g.hx();
        let s = 0.2;
        let flux_out = d.x[d.x_index(4, 1)];
        let ghost = s + flux_out * h;
        let residual = (ghost - s) / h + alpha * (0.5 * (ghost + s) - sg);
        assert!(residual.abs() < 1e-13);
        // West face: the stored value is ∂/∂x, so the outward derivative is its negative.
        let ghost_w = s - d.x[d.x_index(0, 2)] * h;
        let residual_w = (ghost_w - s) / h + alpha * (0.5 * (ghost_w + s) - sg);
        assert!(residual_w.abs() < 1e-13);
    }

    #[test]
    fn div_of_zero_and_of_constant_gradient() {
        let g = Grid::new(5, 7, 1.0, 2.0).unwrap();
        assert!(div_faces(&FaceField::zeros(g))
            .values()
            .iter()
            .all(|&v| v == 0.0));
        let c = grad_faces(&ScalarField::constant(g, -2.0), Closure::NeumannZero);
        assert!(div_faces(&c).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn div_is_negative_adjoint_of_grad() {
        let mut rng = Lcg::new(11);
        let g = Grid::new(9, 6, 1.3, 0.7).unwrap();
        for _ in 0..10 {
            let f = random_field(g, &mut rng);
            let mut q = FaceField::zeros(g);
            q.x = rng.fill(q.x.len(), -1.0, 1.0);
            q.y = rng.fill(q.y.len(), -1.0, 1.0);
            q.clear_boundary();
            let lhs = inner(&div_faces(&q), &f);
            let rhs = -q.interior_inner(&grad_faces(&f, Closure::NeumannZero));
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(rhs.abs()));
        }
    }

    #[test]
    fn laplacian_kernel_symmetry_and_sign() {
        let mut rng = Lcg::new(3);
        let g = Grid::new(12, 10, 2.0, 1.0).unwrap();
        let c = laplacian(&ScalarField::constant(g, 4.2), Closure::NeumannZero);
        assert!(c.values().iter().all(|&v| v == 0.0));
        for _ in 0..10 {
            let f = random_field(g, &mut rng);
            let h = random_field(g, &mut rng);
            let a = inner(&laplacian(&f, Closure::NeumannZero), &h);
            let b = inner(&f, &laplacian(&h, Closure::NeumannZero));
            assert!((a - b).abs() <= 1e-13 * a.abs().max(b.abs()));
            assert!(inner(&laplacian(&f, Closure::NeumannZero), &f) <= 0.0);
        }
    }

    #[test]
    fn laplacian_of_neumann_eigenfunction() {
        let g = Grid::new(64, 4, 1.0, 1.0).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (PI * x).cos());
        let lap = laplacian(&f, Closure::NeumannZero);
        let exact = f.map(|v| -PI * PI * v);
        assert!(lap.max_abs_diff(&exact) < 5e-3);
    }

    #[test]
    fn robin_laplacian_is_symmetric_with_zero_datum() {
        let mut rng = Lcg::new(5);
        let g = Grid::new(7, 9, 1.0, 1.5).unwrap();
        let closure = Closure::Robin {
            alpha: 2.5,
            boundary_value: 0.0,
        };
        let f = random_field(g, &mut rng);
        let h = random_field(g, &mut rng);
        let a = inner(&laplacian(&f, closure), &h);
        let b = inner(&f, &laplacian(&h, closure));
        assert!((a - b).abs() <= 1e-13 * a.abs().max(b.abs()));
        assert!(inner(&laplacian(&f, closure), &f) < 0.0);
    }

    #[test]
    fn p_laplacian_annihilates_constants() {
        let g = Grid::new(8, 8, 1.0, 1.0).unwrap();
        let z = ScalarField::constant(g, 0.3);
        assert!(p_laplacian(&z, 4.0).values().iter().all(|&v| v == 0.0));
        assert_eq!(p_energy(&z, 4.0), 0.0);
    }

    #[test]
    fn p_laplacian_reduces_to_laplacian_for_p_two() {
        let mut rng = Lcg::new(17);
        let g = Grid::new(10, 8, 1.0, 0.8).unwrap();
        let z = random_field(g, &mut rng);
        let a = p_laplacian(&z, 2.0);
        let b = laplacian(&z, Closure::NeumannZero);
        let scale = b.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(a.max_abs_diff(&b) <= 1e-14 * scale);
        let e2 = 0.5 * grad_faces(&z, Closure::NeumannZero)
            .interior_inner(&grad_faces(&z, Closure::NeumannZero));
        assert!((p_energy(&z, 2.0) - e2).abs() <= 1e-14 * e2);
    }

    #[test]
    fn p_laplacian_is_gradient_of_p_energy() {
        let mut rng = Lcg::new(23);
        let g = Grid::new(6, 5, 1.0, 1.0).unwrap();
        for p in [2.5, 3.0, 4.0] {
            let z = random_field(g, &mut rng);
            let lap = p_laplacian(&z, p);
            let eps = 1e-4;
            let shifted = |c: usize, d: f64| {
                let mut zs = z.clone();
                zs.values_mut()[c] += d;
                p_energy(&zs, p)
            };
            for c in 0..g.n_cells() {
                let fd = (8.0 * (shifted(c, eps) - shifted(c, -eps))
                    - (shifted(c, 2.0 * eps) - shifted(c, -2.0 * eps)))
                    / (12.0 * eps)
                    / g.cell_measure();
                let an = -lap.values()[c];
                assert!(
                    (fd - an).abs() <= 1e-8 * an.abs().max(1.0),
                    "p={p} c={c} fd={fd} an={an}"
                );
            }
        }
    }

    #[test]
    fn sym_grad_examples() {
        let g = Grid::unit_square(8).unwrap();
        let zero = sym_grad(&VectorField::zeros(g));
        assert!(zero.xx.iter().chain(&zero.yy).chain(&zero.xy).all(|&v| v == 0.0));

        let stretch = VectorField::from_fn_unmasked(g, |x, _| (x, 0.0));
        let e = sym_grad(&stretch);
        let shear = sym_grad(&VectorField::from_fn_unmasked(g, |x, y| (y, x)));
        for c in 0..g.n_cells() {
            assert!((e.get(c).xx - 1.0).abs() < 1e-12);
            assert!(e.get(c).yy.abs() < 1e-12 && e.get(c).xy.abs() < 1e-12);
            assert!((shear.get(c).xy - 1.0).abs() < 1e-12);
            assert!(shear.get(c).xx.abs() < 1e-12 && shear.get(c).yy.abs() < 1e-12);
        }
        // With the Dirichlet mask only interior cells see the linear field.
        let masked = sym_grad(&VectorField::from_fn(g, |x, _| (x, 0.0)));
        for j in 1..7 {
            for i in 1..7 {
                assert!((masked.get(g.cell(i, j)).xx - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn div_tensor_examples_and_adjointness() {
        let g = Grid::new(7, 6, 1.4, 1.0).unwrap();
        let zero = div_tensor(&SymTensorField::zeros(g));
        assert!(zero.u1.iter().chain(&zero.u2).all(|&v| v == 0.0));

        let constant = div_tensor(&SymTensorField::from_fn(g, |_| Sym2::new(1.3, -0.4, 0.8)));
        assert!(constant.u1.iter().chain(&constant.u2).all(|v| v.abs() < 1e-12));

        let mut rng = Lcg::new(29);
        for _ in 0..10 {
            let t = SymTensorField::from_fn(g, |_| {
                Sym2::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
            });
            let u = random_dirichlet(g, &mut rng);
            let lhs = div_tensor(&t).inner(&u);
            let rhs = -t.inner(&sym_grad(&u));
            assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(rhs.abs()));
        }
    }
}
