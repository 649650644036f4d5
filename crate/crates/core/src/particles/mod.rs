//! Embedded balls: density-driven placement, counting and Riemann sums over
//! the centers, and the discrete many-ball scattering system.

mod config;
mod counting;
mod foldy;
mod green;
mod placement;

pub use config::BallConfig;
pub use counting::{count_in_region, riemann_sum, total_volume_fraction, VolumeFraction};
pub use foldy::{
    assemble_foldy, evaluate_discrete_field, solve_discrete, DiscreteSolution, FoldyOptions,
    FoldySystem,
};
pub use green::{BackgroundGreen, FieldEvaluator, FreeSpaceGreen, GreenFunction};
pub use placement::{macro_cells_per_axis, place_balls, MACRO_CELL_FACTOR};
