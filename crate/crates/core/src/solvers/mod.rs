//! Volume-integral solvers on the cell grid.
//!
//! Every problem here is a second-kind equation `u + K M u = f` where `K` is
//! the free-space kernel integrated over grid cells (see
//! [`kernel::cell_kernel_integral`](crate::kernel::cell_kernel_integral)) and
//! `M` a diagonal multiplier (a contrast). Collocation is at cell centers.

mod background;
mod contrast;
mod diagnostics;
mod effective;
mod greens;
mod operator;
mod residual;

pub use background::{solve_background, solve_lippmann_schwinger, BackgroundField};
pub use contrast::{derive_contrast, ContrastField};
pub use diagnostics::{
    near_diagonal_limit, richardson_limit, weighted_sup_norm, NearDiagonalEstimate,
};
pub use effective::{born_approximation, solve_effective, EffectiveField, EffectiveMode};
pub use greens::{greens_function, GreenSource, GreensField, GreensSolver};
pub use operator::DiscreteOperator;
pub use residual::helmholtz_residual;

use alloc::format;
use alloc::string::String;

use crate::Grid;

/// Recommended minimum number of cells per local wavelength.
pub const CELLS_PER_WAVELENGTH: f64 = 10.0;

/// Warning text when `grid` under-resolves the wavelength `2π/(k·n_max)`.
pub(crate) fn resolution_warning(grid: &Grid, k: f64, n_max: f64) -> Option<String> {
    let per_wavelength = grid.cells_per_wavelength(k * n_max.max(1.0));
    (per_wavelength < CELLS_PER_WAVELENGTH).then(|| {
        format!(
            "grid resolves {:.1} cells per wavelength (recommended {})",
            per_wavelength, CELLS_PER_WAVELENGTH
        )
    })
}
