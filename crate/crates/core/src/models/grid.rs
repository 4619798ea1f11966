use crate::error::{Error, Result};

/// Uniform cell-centred grid on `[-L, L]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    half_length: f64,
    n_cells: usize,
    n_ghost: usize,
}

impl Grid1D {
    pub const DEFAULT_GHOSTS: usize = 2;

    pub fn new(half_length: f64, n_cells: usize) -> Result<Self> {
        if !(half_length > 0.0 && half_length.is_finite()) {
            return Err(Error::Argument(format!("half_length must be positive, got {half_length}")));
        }
        if n_cells == 0 {
            return Err(Error::Argument("n_cells must be positive".into()));
        }
        Ok(Self {
            half_length,
            n_cells,
            n_ghost: Self::DEFAULT_GHOSTS,
        })
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn n_ghost(&self) -> usize {
        self.n_ghost
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_length / self.n_cells as f64
    }

    /// Centre of cell `i`.
    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        -self.half_length + (i as f64 + 0.5) * self.dx()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.x(i)).collect()
    }

    /// Same domain with twice as many cells.
    pub fn refined(&self) -> Self {
        Self {
            n_cells: 2 * self.n_cells,
            ..*self
        }
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_cells).map(|i| f(self.x(i))).collect()
    }
}
