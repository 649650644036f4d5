use num_complex::Complex64;
use num_traits::Float;

use crate::{Error, GridField, RefractionProfile, Result};

/// Relative discrete residual of `(∇² + k² n²) u` over interior cells.
///
/// Uses the 7-point Laplacian and skips a one-cell boundary layer. The
/// residual norm is divided by the norm of `k² n² u` over the same cells.
pub fn helmholtz_residual(field: &GridField, n_sq: &RefractionProfile, k: f64) -> Result<f64> {
    let grid = field.grid();
    let n = grid.cells_per_axis();
    if n.iter().any(|&m| m < 5) {
        return Err(Error::invalid("residual needs at least 5 cells per axis"));
    }
    let h = grid.spacing();
    let inv_h2 = [
        1.0 / (h[0] * h[0]),
        1.0 / (h[1] * h[1]),
        1.0 / (h[2] * h[2]),
    ];
    let k2 = k * k;
    let u = |i: usize, j: usize, l: usize| field.get(grid.linear_index([i, j, l]));
    let (mut num, mut den) = (0.0, 0.0);
    for l in 1..n[2] - 1 {
        for j in 1..n[1] - 1 {
            for i in 1..n[0] - 1 {
                let c = u(i, j, l);
                let lap = (u(i + 1, j, l) + u(i - 1, j, l) - c * 2.0) * inv_h2[0]
                    + (u(i, j + 1, l) + u(i, j - 1, l) - c * 2.0) * inv_h2[1]
                    + (u(i, j, l + 1) + u(i, j, l - 1) - c * 2.0) * inv_h2[2];
                let x = grid.center_of([i, j, l]);
                let source: Complex64 = n_sq.value(x) * c * k2;
                num += (lap + source).norm_sqr();
                den += source.norm_sqr();
            }
        }
    }
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::invalid(
            "residual normalization vanishes (zero field or coefficient)",
        ));
    }
    Ok(Float::sqrt(num / den))
}
