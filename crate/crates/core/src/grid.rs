//! Uniform meshes and the cell-average state container.
//!
//! A [`State`] stores `d` components on `N_x` interior cells plus one ghost
//! cell per side. Stochastic states add a dense `ξ` dimension; every
//! `ξ`-slice is an independent copy of the deterministic layout.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub dx: f64,
    pub cell_centers: Vec<f64>,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) || x_max <= x_min {
            return Err(Error::InvalidGrid(format!(
                "degenerate interval [{x_min}, {x_max}]"
            )));
        }
        if n_cells < 2 {
            return Err(Error::InvalidGrid(format!(
                "need at least 2 cells, got {n_cells}"
            )));
        }
        let dx = (x_max - x_min) / n_cells as f64;
        let cell_centers = (0..n_cells)
            .map(|j| x_min + (j as f64 + 0.5) * dx)
            .collect();
        Ok(Self {
            x_min,
            x_max,
            n_cells,
            dx,
            cell_centers,
        })
    }
}

/// Uniform cells in the random variable `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiGrid {
    pub xi_min: f64,
    pub xi_max: f64,
    pub n_xi: usize,
    pub dxi: f64,
    pub xi_centers: Vec<f64>,
}

impl XiGrid {
    pub fn new(xi_min: f64, xi_max: f64, n_xi: usize) -> Result<Self> {
        if !(xi_min.is_finite() && xi_max.is_finite()) || xi_max <= xi_min {
            return Err(Error::InvalidGrid(format!(
                "degenerate xi interval [{xi_min}, {xi_max}]"
            )));
        }
        if n_xi == 0 {
            return Err(Error::InvalidGrid("need at least one xi cell".into()));
        }
        let dxi = (xi_max - xi_min) / n_xi as f64;
        let xi_centers = (0..n_xi)
            .map(|k| xi_min + (k as f64 + 0.5) * dxi)
            .collect();
        Ok(Self {
            xi_min,
            xi_max,
            n_xi,
            dxi,
            xi_centers,
        })
    }
}

/// Cell averages of a `d`-component solution, ghost cells included.
///
/// Layout: slice-major, then component, then cell (`0` and `N_x + 1` are
/// ghosts). A deterministic state has exactly one slice.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub n_comp: usize,
    pub grid: Grid1D,
    pub xi: Option<XiGrid>,
    pub time: f64,
    values: Vec<f64>,
}

impl State {
    /// Zero state.
    pub fn zeros(n_comp: usize, grid: Grid1D, xi: Option<XiGrid>) -> Self {
        let n_slices = xi.as_ref().map_or(1, |g| g.n_xi);
        let len = n_slices * n_comp * (grid.n_cells + 2);
        Self {
            n_comp,
            grid,
            xi,
            time: 0.0,
            values: vec![0.0; len],
        }
    }

    /// Samples a deterministic initial condition at cell centers.
    pub fn from_fn<F>(n_comp: usize, grid: Grid1D, ic: F) -> Result<Self>
    where
        F: Fn(f64, &mut [f64]),
    {
        Self::from_fn_stochastic(n_comp, grid, None, |x, _xi, out| ic(x, out))
    }

    /// Samples an initial condition `(x, ξ) ↦ U` at cell centers of both
    /// meshes. With `xi = None` the closure receives `ξ = 0`.
    pub fn from_fn_stochastic<F>(
        n_comp: usize,
        grid: Grid1D,
        xi: Option<XiGrid>,
        ic: F,
    ) -> Result<Self>
    where
        F: Fn(f64, f64, &mut [f64]),
    {
        let mut state = Self::zeros(n_comp, grid, xi);
        let xis: Vec<f64> = state
            .xi
            .as_ref()
            .map_or_else(|| vec![0.0], |g| g.xi_centers.clone());
        let mut buf = vec![0.0; n_comp];
        let nx = state.grid.n_cells;
        for (k, &xi_k) in xis.iter().enumerate() {
            for j in 1..=nx {
                let x = state.grid.cell_centers[j - 1];
                ic(x, xi_k, &mut buf);
                for (i, &v) in buf.iter().enumerate() {
                    if !v.is_finite() {
                        return Err(Error::NonFiniteInitial { cell: j, slice: k });
                    }
                    state.set(k, i, j, v);
                }
            }
        }
        state.copy_ghosts_from_interior();
        Ok(state)
    }

    pub fn n_slices(&self) -> usize {
        self.xi.as_ref().map_or(1, |g| g.n_xi)
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells
    }

    /// Row length of one component, ghosts included.
    #[inline]
    pub fn row_len(&self) -> usize {
        self.grid.n_cells + 2
    }

    #[inline]
    fn offset(&self, slice: usize, comp: usize) -> usize {
        (slice * self.n_comp + comp) * self.row_len()
    }

    #[inline]
    pub fn get(&self, slice: usize, comp: usize, cell: usize) -> f64 {
        self.values[self.offset(slice, comp) + cell]
    }

    #[inline]
    pub fn set(&mut self, slice: usize, comp: usize, cell: usize, v: f64) {
        let o = self.offset(slice, comp);
        self.values[o + cell] = v;
    }

    /// One component of one slice, ghosts included.
    pub fn row(&self, slice: usize, comp: usize) -> &[f64] {
        let o = self.offset(slice, comp);
        &self.values[o..o + self.row_len()]
    }

    pub fn row_mut(&mut self, slice: usize, comp: usize) -> &mut [f64] {
        let o = self.offset(slice, comp);
        let n = self.row_len();
        &mut self.values[o..o + n]
    }

    /// All components of one slice, `n_comp * (N_x + 2)` values.
    pub fn slice_values(&self, slice: usize) -> &[f64] {
        let n = self.n_comp * self.row_len();
        &self.values[slice * n..(slice + 1) * n]
    }

    pub fn slice_values_mut(&mut self, slice: usize) -> &mut [f64] {
        let n = self.n_comp * self.row_len();
        &mut self.values[slice * n..(slice + 1) * n]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Extracts slice `k` of a stochastic state as a deterministic state.
    pub fn deterministic_slice(&self, slice: usize) -> State {
        let mut out = State::zeros(self.n_comp, self.grid.clone(), None);
        out.values.copy_from_slice(self.slice_values(slice));
        out.time = self.time;
        out
    }

    /// First non-finite interior or ghost entry, if any.
    pub fn find_non_finite(&self) -> Option<Error> {
        // any NaN or infinity turns its lane into NaN
        let mut lanes = [0.0f64; 8];
        let chunks = self.values.chunks_exact(8);
        let tail: f64 = chunks.remainder().iter().map(|v| v * 0.0).sum();
        for c in chunks {
            for (l, v) in lanes.iter_mut().zip(c) {
                *l += v * 0.0;
            }
        }
        if tail == 0.0 && lanes.iter().all(|&l| l == 0.0) {
            return None;
        }
        let row = self.row_len();
        self.values.iter().position(|v| !v.is_finite()).map(|p| {
            let cell = p % row;
            let comp = (p / row) % self.n_comp;
            let slice = p / (row * self.n_comp);
            Error::NonFinite { cell, comp, slice }
        })
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Exchanges the value buffer with `buf`, which must have the same length.
    pub(crate) fn swap_values(&mut self, buf: &mut Vec<f64>) {
        debug_assert_eq!(buf.len(), self.values.len());
        std::mem::swap(&mut self.values, buf);
    }

    pub(crate) fn copy_ghosts_from_interior(&mut self) {
        let nx = self.n_cells();
        for k in 0..self.n_slices() {
            for i in 0..self.n_comp {
                let row = self.row_mut(k, i);
                row[0] = row[1];
                row[nx + 1] = row[nx];
            }
        }
    }

    /// Largest absolute interior value.
    pub fn max_abs_interior(&self) -> f64 {
        let nx = self.n_cells();
        let mut m = 0.0f64;
        for k in 0..self.n_slices() {
            for i in 0..self.n_comp {
                for v in &self.row(k, i)[1..=nx] {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }
}
