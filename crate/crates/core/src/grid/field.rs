use super::{Grid, GridError};
use crate::tensor::Sym2;

/// One value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        ScalarField {
            grid,
            values: vec![value; grid.n_cells()],
        }
    }

    /// Samples `f(x, y)` at cell centres.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = grid
            .cells()
            .map(|(i, j)| {
                let (x, y) = grid.cell_center(i, j);
                f(x, y)
            })
            .collect();
        ScalarField { grid, values }
    }

    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self, GridError> {
        if values.len() != grid.n_cells() {
            return Err(GridError::LengthMismatch {
                expected: grid.n_cells(),
                got: values.len(),
            });
        }
        if let Some(idx) = values.iter().position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(idx));
        }
        Ok(ScalarField { grid, values })
    }

    /// Wraps `values` without the finiteness check; used inside solver
    /// iterations where the caller validates the result.
    pub(crate) fn wrap(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n_cells());
        ScalarField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.cell(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &ScalarField, f: impl Fn(f64, f64) -> f64) -> ScalarField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        ScalarField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Position and value of the smallest entry.
    pub fn argmin(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc })
    }

    /// Position and value of the largest entry.
    pub fn argmax(&self) -> (usize, f64) {
        self.values
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (k, v)| if v > acc.1 { (k, v) } else { acc })
    }

    /// Spatial mean `⟨f⟩ = |Ω|⁻¹ ∫ f`.
    pub fn mean(&self) -> f64 {
        super::integrate(self) / self.grid.area()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &ScalarField) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Face-centred collection of normal derivatives or fluxes.
///
/// `x[j·(nx+1) + i]` lives on the vertical face at `x = i·hx` between cells
/// `(i-1, j)` and `(i, j)`; `y[j·nx + i]` on the horizontal face at
/// `y = j·hy`. Faces with `i = 0, nx` (resp. `j = 0, ny`) are boundary faces.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceField {
    grid: Grid,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl FaceField {
    pub fn zeros(grid: Grid) -> Self {
        FaceField {
            grid,
            x: vec![0.0; (grid.nx() + 1) * grid.ny()],
            y: vec![0.0; grid.nx() * (grid.ny() + 1)],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn x_index(&self, i: usize, j: usize) -> usize {
        j * (self.grid.nx() + 1) + i
    }

    #[inline]
    pub fn y_index(&self, i: usize, j: usize) -> usize {
        j * self.grid.nx() + i
    }

    /// Σ over interior faces of `a·b·hx·hy`, the face pairing dual to
    /// [`super::integrate`].
    pub fn interior_inner(&self, other: &FaceField) -> f64 {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mut acc = 0.0;
        for j in 0..ny {
            for i in 1..nx {
                let k = self.x_index(i, j);
                acc += self.x[k] * other.x[k];
            }
        }
        for j in 1..ny {
            for i in 0..nx {
                let k = self.y_index(i, j);
                acc += self.y[k] * other.y[k];
            }
        }
        acc * self.grid.cell_measure()
    }

    /// Zeroes every boundary face value.
    pub fn clear_boundary(&mut self) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        for j in 0..ny {
            let (w, e) = (self.x_index(0, j), self.x_index(nx, j));
            self.x[w] = 0.0;
            self.x[e] = 0.0;
        }
        for i in 0..nx {
            let (s, n) = (self.y_index(i, 0), self.y_index(i, ny));
            self.y[s] = 0.0;
            self.y[n] = 0.0;
        }
    }
}

/// Two components per vertex. Boundary vertices carry the homogeneous
/// Dirichlet condition and are kept at zero by every operator here.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            grid,
            u1: vec![0.0; grid.n_nodes()],
            u2: vec![0.0; grid.n_nodes()],
        }
    }

    /// Samples `f(x, y)` at interior vertices; boundary vertices are set to zero.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut v = VectorField::zeros(grid);
        for (i, j) in grid.nodes() {
            if grid.is_boundary_node(i, j) {
                continue;
            }
            let (x, y) = grid.node_position(i, j);
            let (a, b) = f(x, y);
            let n = grid.node(i, j);
            v.u1[n] = a;
            v.u2[n] = b;
        }
        v
    }

    /// Samples `f` at every vertex, boundary included.
    pub fn from_fn_unmasked(grid: Grid, f: impl Fn(f64, f64) -> (f64, f64)) -> Self {
        let mut v = VectorField::zeros(grid);
        for (i, j) in grid.nodes() {
            let (x, y) = grid.node_position(i, j);
            let (a, b) = f(x, y);
            let n = grid.node(i, j);
            v.u1[n] = a;
            v.u2[n] = b;
        }
        v
    }

    pub fn from_components(grid: Grid, u1: Vec<f64>, u2: Vec<f64>) -> Result<Self, GridError> {
        for comp in [&u1, &u2] {
            if comp.len() != grid.n_nodes() {
                return Err(GridError::LengthMismatch {
                    expected: grid.n_nodes(),
                    got: comp.len(),
                });
            }
        }
        if let Some(idx) = u1.iter().chain(&u2).position(|v| !v.is_finite()) {
            return Err(GridError::NonFinite(idx));
        }
        Ok(VectorField { grid, u1, u2 })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// True when every boundary vertex is exactly zero.
    pub fn satisfies_dirichlet(&self) -> bool {
        self.grid.nodes().all(|(i, j)| {
            !self.grid.is_boundary_node(i, j) || {
                let n = self.grid.node(i, j);
                self.u1[n] == 0.0 && self.u2[n] == 0.0
            }
        })
    }

    pub fn apply_dirichlet(&mut self) {
        let grid = self.grid;
        for (i, j) in grid.nodes() {
            if grid.is_boundary_node(i, j) {
                let n = grid.node(i, j);
                self.u1[n] = 0.0;
                self.u2[n] = 0.0;
            }
        }
    }

    /// `a·self + b·other`, component-wise.
    pub fn combine(&self, a: f64, other: &VectorField, b: f64) -> VectorField {
        assert_eq!(self.grid, other.grid, "fields live on different grids");
        let mix = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        VectorField {
            grid: self.grid,
            u1: mix(&self.u1, &other.u1),
            u2: mix(&self.u2, &other.u2),
        }
    }

    /// Nodal quadrature `Σ_nodes a·b·hx·hy`.
    pub fn inner(&self, other: &VectorField) -> f64 {
        let s: f64 = self
            .u1
            .iter()
            .zip(&other.u1)
            .chain(self.u2.iter().zip(&other.u2))
            .map(|(a, b)| a * b)
            .sum();
        s * self.grid.cell_measure()
    }

    pub fn is_finite(&self) -> bool {
        self.u1.iter().chain(&self.u2).all(|v| v.is_finite())
    }

    pub fn max_abs_diff(&self, other: &VectorField) -> f64 {
        self.u1
            .iter()
            .zip(&other.u1)
            .chain(self.u2.iter().zip(&other.u2))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Flattened `[u1; u2]` layout used by the Krylov solvers.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = self.u1.clone();
        out.extend_from_slice(&self.u2);
        out
    }

    pub fn from_flat(grid: Grid, flat: &[f64]) -> Self {
        let n = grid.n_nodes();
        assert_eq!(flat.len(), 2 * n);
        VectorField {
            grid,
            u1: flat[..n].to_vec(),
            u2: flat[n..].to_vec(),
        }
    }
}

/// Symmetric tensor per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensorField {
    grid: Grid,
    pub xx: Vec<f64>,
    pub yy: Vec<f64>,
    pub xy: Vec<f64>,
}

impl SymTensorField {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.n_cells();
        SymTensorField {
            grid,
            xx: vec![0.0; n],
            yy: vec![0.0; n],
            xy: vec![0.0; n],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize) -> Sym2) -> Self {
        let mut t = SymTensorField::zeros(grid);
        for c in 0..grid.n_cells() {
            t.set(c, f(c));
        }
        t
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn get(&self, c: usize) -> Sym2 {
        Sym2::new(self.xx[c], self.yy[c], self.xy[c])
    }

    #[inline]
    pub fn set(&mut self, c: usize, e: Sym2) {
        self.xx[c] = e.xx;
        self.yy[c] = e.yy;
        self.xy[c] = e.xy;
    }

    /// Cell quadrature `Σ_cells A:B·hx·hy`.
    pub fn inner(&self, other: &SymTensorField) -> f64 {
        let s: f64 = (0..self.grid.n_cells())
            .map(|c| self.get(c).ddot(&other.get(c)))
            .sum();
        s * self.grid.cell_measure()
    }
}
