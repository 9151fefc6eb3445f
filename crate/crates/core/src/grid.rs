//! Periodic Cartesian grids with ghost framing, cell-averaged fields and
//! face-averaged fields.
//!
//! Storage is row-major over the padded index box `[-g, n+g)^D`, with the
//! x index varying fastest. A face field stores the value of face
//! `i + 1/2 e^d` at the flat index of cell `i`, so the face between two
//! cells has exactly one storage location.

use crate::error::{Error, Result};

/// Ghost layers on every side. The widest high-order stencil reaches five
/// cells past a face and the bound stencils add two more cells of reach.
pub const GHOST_WIDTH: usize = 6;

/// A uniform `n^D` periodic grid over the square domain `[lo, hi]^D`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    n: usize,
    lo: f64,
    hi: f64,
}

impl Grid {
    pub fn new(dim: usize, n: usize, lo: f64, hi: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2, got {dim}"
            )));
        }
        if n < 2 * GHOST_WIDTH {
            return Err(Error::InvalidGrid(format!(
                "need at least {} cells per dimension, got {n}",
                2 * GHOST_WIDTH
            )));
        }
        if hi <= lo || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidGrid(format!("bad domain [{lo}, {hi}]")));
        }
        Ok(Self { dim, n, lo, hi })
    }

    /// `[0, 1]^D` with `n` cells per dimension.
    pub fn unit(dim: usize, n: usize) -> Result<Self> {
        Self::new(dim, n, 0.0, 1.0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn extent(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn h(&self) -> f64 {
        self.extent() / self.n as f64
    }

    pub fn ghost_width(&self) -> usize {
        GHOST_WIDTH
    }

    /// Cells per padded row.
    pub fn padded_n(&self) -> usize {
        self.n + 2 * GHOST_WIDTH
    }

    /// Length of a padded storage array.
    pub fn len(&self) -> usize {
        self.padded_n().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn interior_len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Flat-index step for a unit move along dimension `d`.
    pub fn stride(&self, d: usize) -> usize {
        debug_assert!(d < self.dim);
        if d == 0 {
            1
        } else {
            self.padded_n()
        }
    }

    /// Flat index of the cell with integer coordinates `cell` (unused
    /// trailing coordinates are ignored). Coordinates may lie in the ghost
    /// frame, `-g <= c < n + g`.
    pub fn index(&self, cell: [isize; 2]) -> usize {
        let g = GHOST_WIDTH as isize;
        let mut k = 0usize;
        for d in (0..self.dim).rev() {
            let c = cell[d] + g;
            debug_assert!(c >= 0 && (c as usize) < self.padded_n());
            k = k * self.padded_n() + c as usize;
        }
        k
    }

    /// Inverse of [`Grid::index`].
    pub fn coords(&self, k: usize) -> [isize; 2] {
        let g = GHOST_WIDTH as isize;
        let p = self.padded_n();
        let mut out = [0isize; 2];
        let mut rest = k;
        for c in out.iter_mut().take(self.dim) {
            *c = (rest % p) as isize - g;
            rest /= p;
        }
        out
    }

    /// Flat indices of all interior cells in storage order.
    pub fn interior(&self) -> impl Iterator<Item = usize> + '_ {
        let n = self.n as isize;
        let ny = if self.dim == 2 { n } else { 1 };
        (0..ny).flat_map(move |j| (0..n).map(move |i| self.index([i, j])))
    }

    /// Interior cells as `(coords, flat index)`.
    pub fn interior_cells(&self) -> impl Iterator<Item = ([isize; 2], usize)> + '_ {
        self.interior().map(move |k| (self.coords(k), k))
    }

    /// Physical coordinate of the lower edge of cell index `i`.
    pub fn edge(&self, i: isize) -> f64 {
        self.lo + i as f64 * self.h()
    }

    pub fn cell_center(&self, cell: [isize; 2]) -> [f64; 2] {
        let h = self.h();
        let mut x = [0.0; 2];
        for d in 0..self.dim {
            x[d] = self.lo + (cell[d] as f64 + 0.5) * h;
        }
        x
    }

    /// Centroid of face `cell + 1/2 e^d`.
    pub fn face_centroid(&self, d: usize, cell: [isize; 2]) -> [f64; 2] {
        let mut x = self.cell_center(cell);
        x[d] += 0.5 * self.h();
        x
    }

    /// The interior cell whose periodic image is `cell`.
    pub fn wrap(&self, cell: [isize; 2]) -> [isize; 2] {
        let n = self.n as isize;
        let mut out = [0isize; 2];
        for d in 0..self.dim {
            out[d] = cell[d].rem_euclid(n);
        }
        out
    }

    /// Copy periodic images into the ghost frame of a padded array.
    pub fn fill_periodic(&self, data: &mut [f64]) {
        debug_assert_eq!(data.len(), self.len());
        let g = GHOST_WIDTH as isize;
        let n = self.n as isize;
        match self.dim {
            1 => {
                for i in -g..0 {
                    data[self.index([i, 0])] = data[self.index([i + n, 0])];
                }
                for i in n..n + g {
                    data[self.index([i, 0])] = data[self.index([i - n, 0])];
                }
            }
            _ => {
                for j in -g..n + g {
                    for i in -g..n + g {
                        if (0..n).contains(&i) && (0..n).contains(&j) {
                            continue;
                        }
                        let src = self.index(self.wrap([i, j]));
                        data[self.index([i, j])] = data[src];
                    }
                }
            }
        }
    }

    pub fn zeros(&self) -> CellField {
        CellField::zeros(*self)
    }
}

/// Cell averages `<q>_i` on a grid, ghosts included.
#[derive(Clone, Debug, PartialEq)]
pub struct CellField {
    grid: Grid,
    data: Vec<f64>,
}

impl CellField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            data: vec![0.0; grid.len()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            data: vec![value; grid.len()],
        }
    }

    /// Builds a field from an interior-cell function and fills the ghosts.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([isize; 2]) -> f64) -> Self {
        let mut field = Self::zeros(grid);
        for (cell, k) in grid.interior_cells() {
            field.data[k] = f(cell);
        }
        field.fill_ghosts();
        field
    }

    /// Builds a field from interior values listed in storage order.
    pub fn from_interior(grid: Grid, values: &[f64]) -> Result<Self> {
        if values.len() != grid.interior_len() {
            return Err(Error::GridMismatch(format!(
                "expected {} interior values, got {}",
                grid.interior_len(),
                values.len()
            )));
        }
        let mut field = Self::zeros(grid);
        for (k, &v) in grid.interior().zip(values) {
            field.data[k] = v;
        }
        field.fill_ghosts();
        Ok(field)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn at(&self, cell: [isize; 2]) -> f64 {
        self.data[self.grid.index(cell)]
    }

    pub fn set(&mut self, cell: [isize; 2], value: f64) {
        let k = self.grid.index(cell);
        self.data[k] = value;
    }

    /// Interior values in storage order.
    pub fn interior_values(&self) -> Vec<f64> {
        self.grid.interior().map(|k| self.data[k]).collect()
    }

    pub fn fill_ghosts(&mut self) {
        let grid = self.grid;
        grid.fill_periodic(&mut self.data);
    }

    /// `sum_i <q>_i h^D` over interior cells, using compensated summation.
    pub fn conserved_sum(&self) -> f64 {
        let vol = self.grid.h().powi(self.grid.dim() as i32);
        neumaier_sum(self.grid.interior().map(|k| self.data[k])) * vol
    }

    pub fn interior_max(&self) -> f64 {
        self.grid
            .interior()
            .map(|k| self.data[k])
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn interior_min(&self) -> f64 {
        self.grid
            .interior()
            .map(|k| self.data[k])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.grid
            .interior()
            .map(|k| self.data[k].abs())
            .fold(0.0, f64::max)
    }

    /// First interior cell holding a non-finite value.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.grid.interior().find(|&k| !self.data[k].is_finite())
    }
}

impl std::ops::Index<usize> for CellField {
    type Output = f64;

    fn index(&self, k: usize) -> &f64 {
        &self.data[k]
    }
}

impl std::ops::IndexMut<usize> for CellField {
    fn index_mut(&mut self, k: usize) -> &mut f64 {
        &mut self.data[k]
    }
}

/// Face averages, one padded array per dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceField {
    grid: Grid,
    comps: Vec<Vec<f64>>,
}

impl FaceField {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            comps: vec![vec![0.0; grid.len()]; grid.dim()],
        }
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            comps: vec![vec![value; grid.len()]; grid.dim()],
        }
    }

    /// Assembles a face field from per-dimension padded arrays.
    pub fn from_components(grid: Grid, comps: Vec<Vec<f64>>) -> Self {
        assert_eq!(comps.len(), grid.dim());
        assert!(comps.iter().all(|c| c.len() == grid.len()));
        Self { grid, comps }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Values of faces `i + 1/2 e^d`, indexed by the flat index of `i`.
    pub fn component(&self, d: usize) -> &[f64] {
        &self.comps[d]
    }

    pub fn component_mut(&mut self, d: usize) -> &mut [f64] {
        &mut self.comps[d]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.comps
    }

    pub fn at(&self, d: usize, cell: [isize; 2]) -> f64 {
        self.comps[d][self.grid.index(cell)]
    }

    pub fn fill_ghosts(&mut self) {
        let grid = self.grid;
        for c in &mut self.comps {
            grid.fill_periodic(c);
        }
    }

    /// Face-wise `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &FaceField, b: f64) -> FaceField {
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(x, y)| x.iter().zip(y).map(|(x, y)| a * x + b * y).collect())
            .collect();
        FaceField {
            grid: self.grid,
            comps,
        }
    }

    /// Sum of `|F|` over all faces bounding interior cells.
    pub fn interior_abs_sum(&self) -> f64 {
        self.comps
            .iter()
            .map(|c| self.grid.interior().map(|k| c[k].abs()).sum::<f64>())
            .sum()
    }
}

/// `(dt/h) sum_d [F_{i+1/2 e^d} - F_{i-1/2 e^d}]` on interior cells, ghosts
/// filled. The update is `q^{n+1} = q^n - flux_divergence(F, dt)`.
pub fn flux_divergence(flux: &FaceField, dt: f64) -> CellField {
    let grid = *flux.grid();
    let scale = dt / grid.h();
    let mut out = CellField::zeros(grid);
    for k in grid.interior() {
        let mut acc = 0.0;
        for d in 0..grid.dim() {
            let f = flux.component(d);
            acc += f[k] - f[k - grid.stride(d)];
        }
        out[k] = scale * acc;
    }
    out.fill_ghosts();
    out
}

/// Neumaier's compensated summation.
pub fn neumaier_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
