//! Points, the box-shaped design domain and its regular cell grid.

use core::ops::{Add, Index, Mul, Neg, Sub};

use num_traits::Float;

use crate::{Error, Result};

/// A point or displacement in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Vec3(pub [f64; 3]);

impl Vec3 {
    pub const ZERO: Vec3 = Vec3([0.0; 3]);

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3([x, y, z])
    }

    #[inline]
    pub fn dot(self, other: Vec3) -> f64 {
        self.0[0] * other.0[0] + self.0[1] * other.0[1] + self.0[2] * other.0[2]
    }

    #[inline]
    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> f64 {
        Float::sqrt(self.norm_squared())
    }

    #[inline]
    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for Vec3 {
    type Output = f64;

    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for Vec3 {
    type Output = Vec3;

    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Vec3 {
    type Output = Vec3;

    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;

    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

impl Neg for Vec3 {
    type Output = Vec3;

    #[inline]
    fn neg(self) -> Vec3 {
        Vec3([-self.0[0], -self.0[1], -self.0[2]])
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3(v)
    }
}

/// Axis-aligned box `[lo, hi]`. Everything outside it is the exterior, where
/// all refraction profiles equal one.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "DomainRepr"))]
pub struct Domain {
    lo: Vec3,
    hi: Vec3,
}

#[cfg(feature = "serde")]
#[derive(serde::Deserialize)]
struct DomainRepr {
    lo: Vec3,
    hi: Vec3,
}

#[cfg(feature = "serde")]
impl TryFrom<DomainRepr> for Domain {
    type Error = Error;

    fn try_from(r: DomainRepr) -> Result<Self> {
        Domain::new(r.lo, r.hi)
    }
}

impl Domain {
    pub fn new(lo: Vec3, hi: Vec3) -> Result<Self> {
        if !lo.is_finite() || !hi.is_finite() {
            return Err(Error::invalid("domain corners must be finite"));
        }
        if (0..3).any(|i| lo[i] >= hi[i]) {
            return Err(Error::invalid("domain requires lo < hi componentwise"));
        }
        Ok(Domain { lo, hi })
    }

    /// The unit cube `[0, 1]^3`.
    pub fn unit_cube() -> Self {
        Domain {
            lo: Vec3::ZERO,
            hi: Vec3::new(1.0, 1.0, 1.0),
        }
    }

    pub fn lo(&self) -> Vec3 {
        self.lo
    }

    pub fn hi(&self) -> Vec3 {
        self.hi
    }

    pub fn extent(&self) -> Vec3 {
        self.hi - self.lo
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e[0] * e[1] * e[2]
    }

    pub fn center(&self) -> Vec3 {
        (self.lo + self.hi) * 0.5
    }

    /// Closed-box membership.
    pub fn contains(&self, x: Vec3) -> bool {
        (0..3).all(|i| x[i] >= self.lo[i] && x[i] <= self.hi[i])
    }

    /// Whether the closed ball of radius `a` around `center` lies inside.
    pub fn contains_ball(&self, center: Vec3, a: f64) -> bool {
        (0..3).all(|i| center[i] - a >= self.lo[i] && center[i] + a <= self.hi[i])
    }

    /// Distance from `x` to the box (zero inside).
    pub fn distance_to(&self, x: Vec3) -> f64 {
        let mut d2 = 0.0;
        for i in 0..3 {
            let d = if x[i] < self.lo[i] {
                self.lo[i] - x[i]
            } else if x[i] > self.hi[i] {
                x[i] - self.hi[i]
            } else {
                0.0
            };
            d2 += d * d;
        }
        Float::sqrt(d2)
    }
}

/// One rectangular grid cell, described by its center and half-widths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub center: Vec3,
    pub half: Vec3,
}

impl Cell {
    pub fn volume(&self) -> f64 {
        8.0 * self.half[0] * self.half[1] * self.half[2]
    }

    /// Radius of the sphere through the cell corners.
    pub fn bounding_radius(&self) -> f64 {
        self.half.norm()
    }

    /// Radius of the ball with the same volume as the cell.
    pub fn equivalent_radius(&self) -> f64 {
        Float::cbrt(3.0 * self.volume() / (4.0 * core::f64::consts::PI))
    }

    pub fn contains(&self, x: Vec3) -> bool {
        (0..3).all(|i| Float::abs(x[i] - self.center[i]) <= self.half[i])
    }
}

/// Regular tiling of a [`Domain`] into `nx × ny × nz` cells. Linear index is
/// `i + nx * (j + ny * k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    domain: Domain,
    cells: [usize; 3],
}

impl Grid {
    pub fn new(domain: Domain, cells: [usize; 3]) -> Result<Self> {
        if cells.contains(&0) {
            return Err(Error::invalid("grid needs at least one cell per axis"));
        }
        Ok(Grid { domain, cells })
    }

    pub fn cubic(domain: Domain, n: usize) -> Result<Self> {
        Self::new(domain, [n, n, n])
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn cells_per_axis(&self) -> [usize; 3] {
        self.cells
    }

    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1] * self.cells[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> Vec3 {
        let e = self.domain.extent();
        Vec3::new(
            e[0] / self.cells[0] as f64,
            e[1] / self.cells[1] as f64,
            e[2] / self.cells[2] as f64,
        )
    }

    /// Largest cell edge.
    pub fn max_spacing(&self) -> f64 {
        let h = self.spacing();
        h[0].max(h[1]).max(h[2])
    }

    pub fn cell_volume(&self) -> f64 {
        self.domain.volume() / self.len() as f64
    }

    #[inline]
    pub fn linear_index(&self, ijk: [usize; 3]) -> usize {
        ijk[0] + self.cells[0] * (ijk[1] + self.cells[1] * ijk[2])
    }

    #[inline]
    pub fn ijk(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.cells[0];
        let rest = idx / self.cells[0];
        [i, rest % self.cells[1], rest / self.cells[1]]
    }

    #[inline]
    pub fn center_of(&self, ijk: [usize; 3]) -> Vec3 {
        let h = self.spacing();
        let lo = self.domain.lo();
        Vec3::new(
            lo[0] + (ijk[0] as f64 + 0.5) * h[0],
            lo[1] + (ijk[1] as f64 + 0.5) * h[1],
            lo[2] + (ijk[2] as f64 + 0.5) * h[2],
        )
    }

    #[inline]
    pub fn center(&self, idx: usize) -> Vec3 {
        self.center_of(self.ijk(idx))
    }

    pub fn cell(&self, idx: usize) -> Cell {
        Cell {
            center: self.center(idx),
            half: self.spacing() * 0.5,
        }
    }

    pub fn centers(&self) -> alloc::vec::Vec<Vec3> {
        (0..self.len()).map(|i| self.center(i)).collect()
    }

    /// Index of a closed cell containing `x`, if `x` lies in the domain.
    /// Points on shared faces resolve to the lower cell.
    pub fn locate(&self, x: Vec3) -> Option<usize> {
        if !self.domain.contains(x) {
            return None;
        }
        let h = self.spacing();
        let lo = self.domain.lo();
        let mut ijk = [0usize; 3];
        for a in 0..3 {
            let t = (x[a] - lo[a]) / h[a];
            let mut i = Float::ceil(t) as isize - 1;
            if i < 0 {
                i = 0;
            }
            ijk[a] = (i as usize).min(self.cells[a] - 1);
        }
        Some(self.linear_index(ijk))
    }

    /// Cells per wavelength along the coarsest axis.
    pub fn cells_per_wavelength(&self, k: f64) -> f64 {
        if k <= 0.0 {
            return f64::INFINITY;
        }
        (2.0 * core::f64::consts::PI / k) / self.max_spacing()
    }
}
