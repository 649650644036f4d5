use alloc::vec::Vec;

use num_complex::Complex64;

use crate::{Grid, RefractionProfile};

/// `q₀(x) = k² − k² n₀²(x)` sampled at cell centers.
#[derive(Debug, Clone, PartialEq)]
pub struct ContrastField {
    grid: Grid,
    values: Vec<Complex64>,
}

impl ContrastField {
    pub fn from_values(grid: Grid, values: Vec<Complex64>) -> Self {
        assert_eq!(
            values.len(),
            grid.len(),
            "contrast length differs from grid"
        );
        ContrastField { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|q| *q == Complex64::new(0.0, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|q| q.norm()).fold(0.0, f64::max)
    }
}

pub fn derive_contrast(n0_sq: &RefractionProfile, k: f64, grid: &Grid) -> ContrastField {
    let k2 = k * k;
    let values = (0..grid.len())
        .map(|i| {
            let n = n0_sq.value(grid.center(i));
            Complex64::new(k2, 0.0) - n * k2
        })
        .collect();
    ContrastField {
        grid: *grid,
        values,
    }
}
