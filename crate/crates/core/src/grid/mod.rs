//! Uniform 2D Cartesian grid on `Ω = (0, Lx) × (0, Ly)`.
//!
//! Scalars (phase, potential, nutrient, damage) live at cell centres, the
//! displacement and velocity at vertices, and strains at cell centres again.
//! The discrete operators in [`calculus`] come in adjoint pairs so that
//! discrete integration by parts holds to rounding error.

mod calculus;
mod field;

pub use calculus::{
    div_faces, div_tensor, grad_faces, inner, integrate, laplacian, p_energy, p_laplacian,
    robin_coefficient, sym_grad, Closure,
};
pub use field::{FaceField, ScalarField, SymTensorField, VectorField};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("grid needs at least 4 cells per axis, got {nx}x{ny}")]
    TooFewCells { nx: usize, ny: usize },
    #[error("domain lengths must be positive and finite, got {lx} x {ly}")]
    BadExtent { lx: f64, ly: f64 },
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
}

/// Cell-centred uniform grid. Cell `(i, j)` covers
/// `[i·hx, (i+1)·hx] × [j·hy, (j+1)·hy]`; vertex `(i, j)` sits at `(i·hx, j·hy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    hx: f64,
    hy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self, GridError> {
        if nx < 4 || ny < 4 {
            return Err(GridError::TooFewCells { nx, ny });
        }
        if !(lx.is_finite() && ly.is_finite() && lx > 0.0 && ly > 0.0) {
            return Err(GridError::BadExtent { lx, ly });
        }
        Ok(Grid {
            nx,
            ny,
            lx,
            ly,
            hx: lx / nx as f64,
            hy: ly / ny as f64,
        })
    }

    /// Unit square with `n × n` cells.
    pub fn unit_square(n: usize) -> Result<Self, GridError> {
        Grid::new(n, n, 1.0, 1.0)
    }

    pub fn nx(&self) -> usize {
        self.nx
    }
    pub fn ny(&self) -> usize {
        self.ny
    }
    pub fn lx(&self) -> f64 {
        self.lx
    }
    pub fn ly(&self) -> f64 {
        self.ly
    }
    pub fn hx(&self) -> f64 {
        self.hx
    }
    pub fn hy(&self) -> f64 {
        self.hy
    }

    pub fn cell_measure(&self) -> f64 {
        self.hx * self.hy
    }

    pub fn area(&self) -> f64 {
        self.lx * self.ly
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn n_nodes(&self) -> usize {
        (self.nx + 1) * (self.ny + 1)
    }

    #[inline]
    pub fn cell(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.nx && j <= self.ny);
        j * (self.nx + 1) + i
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        ((i as f64 + 0.5) * self.hx, (j as f64 + 0.5) * self.hy)
    }

    pub fn node_position(&self, i: usize, j: usize) -> (f64, f64) {
        (i as f64 * self.hx, j as f64 * self.hy)
    }

    pub fn is_boundary_node(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i == self.nx || j == self.ny
    }

    /// Iterates `(i, j)` over cells in storage order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> {
        let nx = self.nx;
        (0..self.ny).flat_map(move |j| (0..nx).map(move |i| (i, j)))
    }

    /// Iterates `(i, j)` over vertices in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> {
        let nx = self.nx;
        (0..=self.ny).flat_map(move |j| (0..=nx).map(move |i| (i, j)))
    }
}
