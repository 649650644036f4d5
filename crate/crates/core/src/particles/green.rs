use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::solvers::{BackgroundField, EffectiveField, GreenSource, GreensSolver};
use crate::{IncidentWave, Result, Vec3};

/// A field that can be evaluated anywhere (`u₀`, `u_e`, a plane wave).
pub trait FieldEvaluator: Sync {
    fn eval(&self, x: Vec3) -> Complex64;
}

impl FieldEvaluator for IncidentWave {
    fn eval(&self, x: Vec3) -> Complex64 {
        self.value(x)
    }
}

impl FieldEvaluator for BackgroundField {
    fn eval(&self, x: Vec3) -> Complex64 {
        BackgroundField::eval(self, x)
    }
}

impl FieldEvaluator for EffectiveField {
    fn eval(&self, x: Vec3) -> Complex64 {
        EffectiveField::eval(self, x)
    }
}

/// Background Green's function, split as `G = g + R` with `g` the free-space
/// kernel (handled analytically by callers) and `R` bounded.
pub trait GreenFunction: Sync {
    fn k(&self) -> f64;

    /// `R(x_i, y) = G(x_i, y) − g(x_i, y)` for every target, including
    /// targets equal to `y`.
    fn regular_part(&self, source: Vec3, targets: &[Vec3]) -> Result<Vec<Complex64>>;

    /// Whether `R` vanishes identically.
    fn is_free_space(&self) -> bool {
        false
    }
}

/// `G = g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSpaceGreen {
    pub k: f64,
}

impl GreenFunction for FreeSpaceGreen {
    fn k(&self) -> f64 {
        self.k
    }

    fn regular_part(&self, _source: Vec3, targets: &[Vec3]) -> Result<Vec<Complex64>> {
        Ok(vec![Complex64::new(0.0, 0.0); targets.len()])
    }

    fn is_free_space(&self) -> bool {
        true
    }
}

/// Green's function of an inhomogeneous background, one grid solve per
/// source point.
#[derive(Debug, Clone)]
pub struct BackgroundGreen {
    solver: GreensSolver,
}

impl BackgroundGreen {
    pub fn new(solver: GreensSolver) -> Self {
        BackgroundGreen { solver }
    }
}

impl GreenFunction for BackgroundGreen {
    fn k(&self) -> f64 {
        self.solver.k()
    }

    fn regular_part(&self, source: Vec3, targets: &[Vec3]) -> Result<Vec<Complex64>> {
        if self.solver.contrast_is_zero() {
            return Ok(vec![Complex64::new(0.0, 0.0); targets.len()]);
        }
        let field = self.solver.solve(GreenSource::Point(source))?;
        Ok(targets.iter().map(|&x| field.regular_part(x)).collect())
    }

    fn is_free_space(&self) -> bool {
        self.solver.contrast_is_zero()
    }
}
