//! Complex samples of a field at the cell centers of a grid.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::{Error, Grid, Result, Vec3};

#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl GridField {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid("value count differs from cell count"));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::invalid("field values must be finite"));
        }
        Ok(GridField { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        GridField {
            grid,
            values: alloc::vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    /// Samples `f` at every cell center.
    pub fn from_fn(grid: Grid, mut f: impl FnMut(Vec3) -> Complex64) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(grid.center(i))).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, idx: usize) -> Complex64 {
        self.values[idx]
    }

    /// Discrete L2 norm `sqrt(Σ |v|² h³)`.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        Float::sqrt(s * self.grid.cell_volume())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn difference(&self, other: &GridField) -> Result<GridField> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Ok(GridField {
            grid: self.grid,
            values,
        })
    }

    /// `max |self − other| / max |other|`.
    pub fn relative_max_difference(&self, other: &GridField) -> Result<f64> {
        let diff = self.difference(other)?;
        let scale = other.max_abs();
        Ok(if scale == 0.0 {
            diff.max_abs()
        } else {
            diff.max_abs() / scale
        })
    }
}
