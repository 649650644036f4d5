use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::{ball_volume, Domain, Error, Result, Vec3};

/// Relative slack on the `2a` separation check, absorbing rounding in
/// generated coordinates.
const SEPARATION_SLACK: f64 = 1e-12;

/// Non-intersecting balls of common radius `a` with per-ball coefficients
/// `n_m²`.
#[derive(Debug, Clone, PartialEq)]
pub struct BallConfig {
    radius: f64,
    centers: Vec<Vec3>,
    coeffs: Vec<Complex64>,
    seed: Option<u64>,
}

impl BallConfig {
    /// Validates radius, coefficient signs, containment in `domain` and
    /// pairwise separation `≥ 2a`.
    pub fn new(
        radius: f64,
        centers: Vec<Vec3>,
        coeffs: Vec<Complex64>,
        domain: &Domain,
    ) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::invalid("ball radius must be positive"));
        }
        if centers.len() != coeffs.len() {
            return Err(Error::invalid("one coefficient per center is required"));
        }
        for (m, (c, n)) in centers.iter().zip(&coeffs).enumerate() {
            if !c.is_finite() || !n.re.is_finite() || !n.im.is_finite() {
                return Err(Error::invalid(format!("ball {m} has non-finite data")));
            }
            if n.im < 0.0 {
                return Err(Error::Realizability(format!(
                    "ball {m} has Im n² = {:.3e} < 0",
                    n.im
                )));
            }
            if !domain.contains_ball(*c, radius * (1.0 - SEPARATION_SLACK)) {
                return Err(Error::invalid(format!(
                    "ball {m} is not contained in the domain"
                )));
            }
        }
        let config = BallConfig {
            radius,
            centers,
            coeffs,
            seed: None,
        };
        if let Some((i, j, d)) = config.closest_violation() {
            return Err(Error::invalid(format!(
                "balls {i} and {j} intersect (center distance {d:.6e} < 2a)"
            )));
        }
        Ok(config)
    }

    pub fn empty(radius: f64) -> Self {
        BallConfig {
            radius,
            centers: Vec::new(),
            coeffs: Vec::new(),
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `V_a = 4πa³/3`.
    pub fn ball_volume(&self) -> f64 {
        ball_volume(self.radius)
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// Index of the ball containing `x`, if any.
    pub fn ball_containing(&self, x: Vec3) -> Option<usize> {
        self.centers
            .iter()
            .position(|c| c.distance(x) <= self.radius)
    }

    /// Smallest pairwise center distance (infinite for fewer than two balls).
    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        self.for_each_close_pair(|_, _, d| best = best.min(d));
        best
    }

    fn closest_violation(&self) -> Option<(usize, usize, f64)> {
        let limit = 2.0 * self.radius * (1.0 - SEPARATION_SLACK);
        let mut found = None;
        self.for_each_close_pair(|i, j, d| {
            if d < limit && found.is_none() {
                found = Some((i, j, d));
            }
        });
        found
    }

    /// Visits every pair closer than `4a` using a hash grid of pitch `2a`.
    fn for_each_close_pair(&self, mut f: impl FnMut(usize, usize, f64)) {
        let pitch = 2.0 * self.radius;
        let key = |c: &Vec3| -> [i64; 3] {
            [
                Float::floor(c[0] / pitch) as i64,
                Float::floor(c[1] / pitch) as i64,
                Float::floor(c[2] / pitch) as i64,
            ]
        };
        let mut bins: BTreeMap<[i64; 3], Vec<usize>> = BTreeMap::new();
        for (i, c) in self.centers.iter().enumerate() {
            bins.entry(key(c)).or_default().push(i);
        }
        for (i, c) in self.centers.iter().enumerate() {
            let b = key(c);
            for dx in -2..=2 {
                for dy in -2..=2 {
                    for dz in -2..=2 {
                        if let Some(list) = bins.get(&[b[0] + dx, b[1] + dy, b[2] + dz]) {
                            for &j in list.iter().filter(|&&j| j > i) {
                                let d = c.distance(self.centers[j]);
                                if d < 2.0 * pitch {
                                    f(i, j, d);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}
