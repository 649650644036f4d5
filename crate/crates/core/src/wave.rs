use num_complex::Complex64;

use crate::{Error, Result, Vec3};

/// Plane wave `exp(i k α·x)` with unit direction `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidentWave {
    k: f64,
    alpha: Vec3,
}

impl IncidentWave {
    pub fn new(k: f64, alpha: Vec3) -> Result<Self> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::invalid("wavenumber must be positive and finite"));
        }
        if (alpha.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("incident direction must be a unit vector"));
        }
        Ok(IncidentWave { k, alpha })
    }

    /// Normalizes `direction` before constructing.
    pub fn towards(k: f64, direction: Vec3) -> Result<Self> {
        let n = direction.norm();
        if !(n > 0.0) {
            return Err(Error::invalid("incident direction must be nonzero"));
        }
        Self::new(k, direction * (1.0 / n))
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn alpha(&self) -> Vec3 {
        self.alpha
    }

    #[inline]
    pub fn value(&self, x: Vec3) -> Complex64 {
        Complex64::new(0.0, self.k * self.alpha.dot(x)).exp()
    }
}
