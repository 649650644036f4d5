use num_complex::Complex64;

use super::BallConfig;
use crate::{Domain, Region, Vec3};

/// Number of centers inside `region`.
pub fn count_in_region(config: &BallConfig, region: &Region) -> usize {
    config
        .centers()
        .iter()
        .filter(|&&x| region.contains(x))
        .count()
}

/// `V_a Σ_m f(x_m)`, which tends to `∫_D f N dx` as `a → 0`.
pub fn riemann_sum(config: &BallConfig, f: impl Fn(Vec3) -> Complex64) -> Complex64 {
    let s: Complex64 = config.centers().iter().map(|&x| f(x)).sum();
    s * config.ball_volume()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeFraction {
    /// `V_a M / |D|`.
    pub fraction: f64,
    /// Set when the balls would occupy more than the domain volume.
    pub exceeds_domain: bool,
}

pub fn total_volume_fraction(config: &BallConfig, domain: &Domain) -> VolumeFraction {
    let fraction = config.ball_volume() * config.len() as f64 / domain.volume();
    VolumeFraction {
        fraction,
        exceeds_domain: fraction > 1.0,
    }
}
