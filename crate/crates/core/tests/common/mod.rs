//! Independent reference implementations used as test oracles. Everything
//! here is written out from the formulas with plain loops and deliberately
//! avoids the library's grid operators.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use tumour_damage::constitutive::{Indicator, ModelParams};
use tumour_damage::grid::{Grid, ScalarField, VectorField};
use tumour_damage::stepper::StepState;

pub fn quintic(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * t * (10.0 - 15.0 * t + 6.0 * t * t)
}

pub fn h_ref(z: f64, p: &ModelParams) -> f64 {
    p.h_star * quintic(z)
}

pub fn a_ref(z: f64, p: &ModelParams) -> f64 {
    p.a_lo + (p.a_hi - p.a_lo) * quintic(z)
}

fn at(f: &ScalarField, i: usize, j: usize) -> f64 {
    f.values()[j * f.grid().nx() + i]
}

/// Squared interior face differences, each weighted by `hx·hy`.
pub fn dirichlet_sum(f: &ScalarField) -> f64 {
    let g = *f.grid();
    let (nx, ny, hx, hy) = (g.nx(), g.ny(), g.hx(), g.hy());
    let mut acc = 0.0;
    for j in 0..ny {
        for i in 1..nx {
            acc += ((at(f, i, j) - at(f, i - 1, j)) / hx).powi(2);
        }
    }
    for j in 1..ny {
        for i in 0..nx {
            acc += ((at(f, i, j) - at(f, i, j - 1)) / hy).powi(2);
        }
    }
    acc * hx * hy
}

/// Cell strain `[exx, eyy, exy]` by bilinear differencing.
pub fn strain(u: &VectorField, i: usize, j: usize) -> [f64; 3] {
    let g = u.grid();
    let (hx, hy) = (g.hx(), g.hy());
    let node = |a: usize, b: usize| b * (g.nx() + 1) + a;
    let (n00, n10, n01, n11) = (node(i, j), node(i + 1, j), node(i, j + 1), node(i + 1, j + 1));
    let dx = |c: &[f64]| (c[n10] - c[n00] + c[n11] - c[n01]) / (2.0 * hx);
    let dy = |c: &[f64]| (c[n01] - c[n00] + c[n11] - c[n10]) / (2.0 * hy);
    [dx(&u.u1), dy(&u.u2), 0.5 * (dy(&u.u1) + dx(&u.u2))]
}

/// `𝒞e:e` for the isotropic stiffness.
pub fn stiff_form(e: [f64; 3], p: &ModelParams) -> f64 {
    let tr = e[0] + e[1];
    2.0 * p.lame_mu * (e[0] * e[0] + e[1] * e[1] + 2.0 * e[2] * e[2]) + p.lame_lambda * tr * tr
}

/// Quadrant-based `(1/p)∫|∇z|^p` with zero boundary differences.
pub fn p_dirichlet(z: &ScalarField, p: f64) -> f64 {
    let g = *z.grid();
    let (nx, ny, hx, hy) = (g.nx(), g.ny(), g.hx(), g.hy());
    let dxf = |i: usize, j: usize| {
        if i == 0 || i == nx {
            0.0
        } else {
            (at(z, i, j) - at(z, i - 1, j)) / hx
        }
    };
    let dyf = |i: usize, j: usize| {
        if j == 0 || j == ny {
            0.0
        } else {
            (at(z, i, j) - at(z, i, j - 1)) / hy
        }
    };
    let mut acc = 0.0;
    for j in 0..ny {
        for i in 0..nx {
            for a in [dxf(i, j), dxf(i + 1, j)] {
                for b in [dyf(i, j), dyf(i, j + 1)] {
                    acc += (a * a + b * b).powf(0.5 * p);
                }
            }
        }
    }
    acc * 0.25 * hx * hy / p
}

/// Total discrete energy, addend by addend.
pub fn energy_ref(s: &StepState, p: &ModelParams) -> f64 {
    let g = *s.grid();
    let dx = g.hx() * g.hy();
    let mut e = 0.5 * dirichlet_sum(&s.phi);
    for c in 0..g.n_cells() {
        let phi = s.phi.values()[c];
        let z = s.z.values()[c];
        e += 0.25 * (1.0 - phi * phi).powi(2) * dx;
        e += 0.5 * s.sigma.values()[c].powi(2) * dx;
        let gap = z - z.clamp(0.0, 1.0);
        e += gap * gap / (2.0 * p.tau) * dx;
        e += -0.5 * p.c_pi * z * z * dx;
        e += 0.5 * p.tau * s.mu.values()[c].powi(2) * dx;
        let (i, j) = (c % g.nx(), c / g.nx());
        let mut eta = strain(&s.u, i, j);
        eta[0] -= p.r0 * phi;
        eta[1] -= p.r0 * phi;
        e += 0.5 * h_ref(z, p) * stiff_form(eta, p) * dx;
    }
    let kin: f64 = s.v.u1.iter().chain(&s.v.u2).map(|v| v * v).sum();
    e += 0.5 * kin * dx;
    e + p_dirichlet(&s.z, p.p)
}

/// Dissipation of one step with `α = 0`.
pub fn dissipation_ref(prev: &StepState, next: &StepState, p: &ModelParams) -> f64 {
    assert_eq!(p.alpha, 0.0);
    let g = *next.grid();
    let dx = g.hx() * g.hy();
    let mut d = p.tau * dirichlet_sum(&next.mu) + p.tau * dirichlet_sum(&next.sigma);
    for c in 0..g.n_cells() {
        d += (next.phi.values()[c] - prev.phi.values()[c]).powi(2) * dx;
        d += (next.z.values()[c] - prev.z.values()[c]).powi(2) / p.tau * dx;
        let (i, j) = (c % g.nx(), c / g.nx());
        let ev = strain(&next.v, i, j);
        d += p.tau * a_ref(next.z.values()[c], p) * p.omega * stiff_form(ev, p) * dx;
    }
    d
}

/// Dense `(−Δ_R + c)` with the Robin ghost closure and the matching
/// right-hand side for one nutrient step.
pub fn nutrient_dense(s: &StepState, p: &ModelParams) -> (DMatrix<f64>, DVector<f64>) {
    let g = *s.grid();
    let (nx, ny, hx, hy) = (g.nx(), g.ny(), g.hx(), g.hy());
    let n = nx * ny;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DVector::zeros(n);
    let ax = p.alpha / (1.0 + 0.5 * p.alpha * hx);
    let ay = p.alpha / (1.0 + 0.5 * p.alpha * hy);
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let phi = at(&s.phi, i, j);
            let z = at(&s.z, i, j);
            let gval = match p.indicator {
                Indicator::Tumour => (0.5 * (1.0 + phi)).clamp(0.0, 1.0),
                Indicator::Off => 0.0,
            };
            let supply = p.lambda_s0 * z.clamp(0.0, 1.0);
            a[(k, k)] += 1.0 / p.tau + p.lambda_c * gval + supply;
            b[k] += at(&s.sigma, i, j) / p.tau + supply * p.sigma_s;
            let mut couple = |other: Option<usize>, h: f64, robin: f64| match other {
                Some(o) => {
                    a[(k, k)] += 1.0 / (h * h);
                    a[(k, o)] -= 1.0 / (h * h);
                }
                None => {
                    a[(k, k)] += robin / h;
                    b[k] += robin * p.sigma_gamma / h;
                }
            };
            couple((i > 0).then(|| k - 1), hx, ax);
            couple((i + 1 < nx).then(|| k + 1), hx, ax);
            couple((j > 0).then(|| k - nx), hy, ay);
            couple((j + 1 < ny).then(|| k + nx), hy, ay);
        }
    }
    (a, b)
}

/// Strain-gradient matrix `G`: rows `3·cell + {xx, yy, xy}`, columns
/// `[u1 nodes; u2 nodes]`.
fn strain_matrix(g: &Grid) -> DMatrix<f64> {
    let (nx, ny, hx, hy) = (g.nx(), g.ny(), g.hx(), g.hy());
    let nn = (nx + 1) * (ny + 1);
    let mut m = DMatrix::zeros(3 * nx * ny, 2 * nn);
    for j in 0..ny {
        for i in 0..nx {
            let c = j * nx + i;
            let node = |a: usize, b: usize| b * (nx + 1) + a;
            let corners = [
                (node(i, j), -0.5 / hx, -0.5 / hy),
                (node(i + 1, j), 0.5 / hx, -0.5 / hy),
                (node(i, j + 1), -0.5 / hx, 0.5 / hy),
                (node(i + 1, j + 1), 0.5 / hx, 0.5 / hy),
            ];
            for (n, wx, wy) in corners {
                m[(3 * c, n)] += wx;
                m[(3 * c + 1, nn + n)] += wy;
                m[(3 * c + 2, n)] += 0.5 * wy;
                m[(3 * c + 2, nn + n)] += 0.5 * wx;
            }
        }
    }
    m
}

/// Dense momentum system of one displacement step, restricted to interior
/// vertices. Returns the matrix, right-hand side and the interior indices
/// into the flat `[u1; u2]` layout.
pub fn displacement_dense(
    s: &StepState,
    phi: &ScalarField,
    z: &ScalarField,
    p: &ModelParams,
) -> (DMatrix<f64>, DVector<f64>, Vec<usize>) {
    let g = *s.grid();
    let (nx, ny) = (g.nx(), g.ny());
    let nn = (nx + 1) * (ny + 1);
    let gm = strain_matrix(&g);
    let (lam, mu) = (p.lame_lambda, p.lame_mu);
    let mut m = DMatrix::zeros(3 * nx * ny, 3 * nx * ny);
    let mut known = DVector::zeros(3 * nx * ny);
    let flat = |v: &VectorField| DVector::from_iterator(2 * nn, v.u1.iter().chain(&v.u2).copied());
    let e_prev = &gm * flat(&s.u);
    for c in 0..nx * ny {
        let zc = z.values()[c];
        let (h, a) = (h_ref(zc, p), a_ref(zc, p));
        let theta = p.tau * p.omega * a + p.tau * p.tau * h;
        let blk = [[2.0 * mu + lam, lam, 0.0], [lam, 2.0 * mu + lam, 0.0], [0.0, 0.0, 4.0 * mu]];
        for r in 0..3 {
            for q in 0..3 {
                m[(3 * c + r, 3 * c + q)] = theta * blk[r][q];
            }
        }
        // Known stress τ²hφ𝒞ℛ + τaω𝒞ε(u^{k−1}), paired with the strain rows
        // (the shear row counts twice in the contraction).
        let eig = p.tau * p.tau * h * phi.values()[c] * (2.0 * mu + 2.0 * lam) * p.r0;
        let ep = [e_prev[3 * c], e_prev[3 * c + 1], e_prev[3 * c + 2]];
        let tr = ep[0] + ep[1];
        let visc = p.tau * a * p.omega;
        known[3 * c] = eig + visc * (2.0 * mu * ep[0] + lam * tr);
        known[3 * c + 1] = eig + visc * (2.0 * mu * ep[1] + lam * tr);
        known[3 * c + 2] = 2.0 * visc * 2.0 * mu * ep[2];
    }
    let k_full = gm.transpose() * &m * &gm;
    let rhs_full = flat(&s.u) * 2.0 - flat(&s.u_prev) + gm.transpose() * known;
    let interior: Vec<usize> = (0..2 * nn)
        .filter(|&k| {
            let n = k % nn;
            let (i, j) = (n % (nx + 1), n / (nx + 1));
            i > 0 && i < nx && j > 0 && j < ny
        })
        .collect();
    let mut a = DMatrix::identity(interior.len(), interior.len());
    let mut b = DVector::zeros(interior.len());
    for (r, &kr) in interior.iter().enumerate() {
        b[r] = rhs_full[kr];
        for (q, &kq) in interior.iter().enumerate() {
            a[(r, q)] += k_full[(kr, kq)];
        }
    }
    (a, b, interior)
}
