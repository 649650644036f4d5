//! Piecewise coefficient fields over the design domain.
//!
//! A [`FieldExpr`] is a small expression tree: constants, smooth bumps,
//! first-match piecewise definitions over [`Region`]s, and the arithmetic the
//! designer needs to express `(n² − n₀²)/N`. [`RefractionProfile`] wraps an
//! expression with the domain and pins the exterior value to one;
//! [`DensityProfile`] is the real, nonnegative counterpart used for the ball
//! density `N(x)`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::{Domain, Error, Grid, Result, Vec3};

/// Relative tolerance used by [`FieldExpr::ZeroWhereEqual`].
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

/// Membership predicate over points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Region {
    All,
    Empty,
    /// Closed axis-aligned box.
    Box {
        lo: Vec3,
        hi: Vec3,
    },
    /// Closed ball.
    Ball {
        center: Vec3,
        radius: f64,
    },
    /// `normal · x <= offset`.
    HalfSpace {
        normal: Vec3,
        offset: f64,
    },
    And {
        regions: Vec<Region>,
    },
    Or {
        regions: Vec<Region>,
    },
    Not {
        region: Box<Region>,
    },
}

impl Region {
    pub fn contains(&self, x: Vec3) -> bool {
        match self {
            Region::All => true,
            Region::Empty => false,
            Region::Box { lo, hi } => (0..3).all(|i| x[i] >= lo[i] && x[i] <= hi[i]),
            Region::Ball { center, radius } => x.distance(*center) <= *radius,
            Region::HalfSpace { normal, offset } => normal.dot(x) <= *offset,
            Region::And { regions } => regions.iter().all(|r| r.contains(x)),
            Region::Or { regions } => regions.iter().any(|r| r.contains(x)),
            Region::Not { region } => !region.contains(x),
        }
    }

    pub fn from_domain(domain: &Domain) -> Self {
        Region::Box {
            lo: domain.lo(),
            hi: domain.hi(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Piece {
    pub region: Region,
    pub value: FieldExpr,
}

/// Complex scalar field given in closed form.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum FieldExpr {
    Constant {
        #[cfg_attr(feature = "serde", serde(with = "crate::serde_complex"))]
        value: Complex64,
    },
    /// `base + amplitude · exp(1 − 1/(1 − r²/R²))` for `r < R`, `base`
    /// elsewhere. Smooth, compactly supported, equal to `base + amplitude` at
    /// the center.
    Bump {
        center: Vec3,
        radius: f64,
        #[cfg_attr(feature = "serde", serde(with = "crate::serde_complex"))]
        base: Complex64,
        #[cfg_attr(feature = "serde", serde(with = "crate::serde_complex"))]
        amplitude: Complex64,
    },
    /// First piece whose region contains the point wins.
    Piecewise {
        pieces: Vec<Piece>,
        otherwise: Box<FieldExpr>,
    },
    Sum {
        terms: Vec<FieldExpr>,
    },
    Product {
        factors: Vec<FieldExpr>,
    },
    Scale {
        #[cfg_attr(feature = "serde", serde(with = "crate::serde_complex"))]
        factor: Complex64,
        field: Box<FieldExpr>,
    },
    Quotient {
        numerator: Box<FieldExpr>,
        denominator: Box<FieldExpr>,
    },
    /// Zero wherever `lhs` and `rhs` agree, `value` elsewhere.
    ZeroWhereEqual {
        lhs: Box<FieldExpr>,
        rhs: Box<FieldExpr>,
        value: Box<FieldExpr>,
    },
}

impl FieldExpr {
    pub fn constant(value: impl Into<Complex64>) -> Self {
        FieldExpr::Constant {
            value: value.into(),
        }
    }

    pub fn bump(
        center: Vec3,
        radius: f64,
        base: impl Into<Complex64>,
        amplitude: impl Into<Complex64>,
    ) -> Self {
        FieldExpr::Bump {
            center,
            radius,
            base: base.into(),
            amplitude: amplitude.into(),
        }
    }

    pub fn eval(&self, x: Vec3) -> Complex64 {
        match self {
            FieldExpr::Constant { value } => *value,
            FieldExpr::Bump {
                center,
                radius,
                base,
                amplitude,
            } => *base + *amplitude * bump_shape(x.distance(*center) / radius),
            FieldExpr::Piecewise { pieces, otherwise } => pieces
                .iter()
                .find(|p| p.region.contains(x))
                .map_or_else(|| otherwise.eval(x), |p| p.value.eval(x)),
            FieldExpr::Sum { terms } => terms.iter().map(|t| t.eval(x)).sum(),
            FieldExpr::Product { factors } => factors.iter().map(|f| f.eval(x)).product(),
            FieldExpr::Scale { factor, field } => *factor * field.eval(x),
            FieldExpr::Quotient {
                numerator,
                denominator,
            } => numerator.eval(x) / denominator.eval(x),
            FieldExpr::ZeroWhereEqual { lhs, rhs, value } => {
                let (l, r) = (lhs.eval(x), rhs.eval(x));
                if (l - r).norm() <= EQUALITY_TOLERANCE * l.norm().max(1.0) {
                    Complex64::new(0.0, 0.0)
                } else {
                    value.eval(x)
                }
            }
        }
    }

    /// `self − other`.
    pub fn minus(self, other: FieldExpr) -> FieldExpr {
        FieldExpr::Sum {
            terms: alloc::vec![
                self,
                FieldExpr::Scale {
                    factor: Complex64::new(-1.0, 0.0),
                    field: Box::new(other),
                },
            ],
        }
    }

    pub fn times(self, other: FieldExpr) -> FieldExpr {
        FieldExpr::Product {
            factors: alloc::vec![self, other],
        }
    }

    pub fn divided_by(self, other: FieldExpr) -> FieldExpr {
        FieldExpr::Quotient {
            numerator: Box::new(self),
            denominator: Box::new(other),
        }
    }
}

/// `exp(1 − 1/(1 − t²))` on `t < 1`, zero beyond.
fn bump_shape(t: f64) -> f64 {
    if t >= 1.0 {
        return 0.0;
    }
    Float::exp(1.0 - 1.0 / (1.0 - t * t))
}

/// Complex refraction coefficient: the expression inside the domain, one
/// outside.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RefractionProfile {
    domain: Domain,
    expr: FieldExpr,
}

impl RefractionProfile {
    pub fn new(domain: Domain, expr: FieldExpr) -> Self {
        RefractionProfile { domain, expr }
    }

    pub fn constant(domain: Domain, value: impl Into<Complex64>) -> Self {
        Self::new(domain, FieldExpr::constant(value))
    }

    /// Free space: one everywhere.
    pub fn vacuum(domain: Domain) -> Self {
        Self::constant(domain, 1.0)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }

    pub fn value(&self, x: Vec3) -> Complex64 {
        if self.domain.contains(x) {
            self.expr.eval(x)
        } else {
            Complex64::new(1.0, 0.0)
        }
    }

    /// Checks finiteness and `Im ≥ 0` at every cell center.
    pub fn validate_on(&self, grid: &Grid) -> Result<()> {
        for idx in 0..grid.len() {
            let x = grid.center(idx);
            let v = self.value(x);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::invalid(format!(
                    "profile is not finite at {:?}",
                    x.0
                )));
            }
            if v.im < 0.0 {
                return Err(Error::Realizability(format!(
                    "Im value {:.3e} < 0 at {:?}",
                    v.im, x.0
                )));
            }
        }
        Ok(())
    }
}

/// Real, nonnegative density of ball centers relative to `1/V_a`; zero
/// outside the domain.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DensityProfile {
    domain: Domain,
    expr: FieldExpr,
}

impl DensityProfile {
    pub fn new(domain: Domain, expr: FieldExpr) -> Self {
        DensityProfile { domain, expr }
    }

    pub fn constant(domain: Domain, value: f64) -> Self {
        Self::new(domain, FieldExpr::constant(value))
    }

    pub fn zero(domain: Domain) -> Self {
        Self::constant(domain, 0.0)
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn expr(&self) -> &FieldExpr {
        &self.expr
    }

    pub fn value(&self, x: Vec3) -> f64 {
        if self.domain.contains(x) {
            self.expr.eval(x).re
        } else {
            0.0
        }
    }

    /// Checks finiteness, a vanishing imaginary part and `N ≥ 0` at every
    /// cell center.
    pub fn validate_on(&self, grid: &Grid) -> Result<()> {
        for idx in 0..grid.len() {
            let x = grid.center(idx);
            let v = if self.domain.contains(x) {
                self.expr.eval(x)
            } else {
                Complex64::new(0.0, 0.0)
            };
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::invalid(format!(
                    "density is not finite at {:?}",
                    x.0
                )));
            }
            if v.im.abs() > EQUALITY_TOLERANCE * v.re.abs().max(1.0) {
                return Err(Error::Realizability(format!(
                    "density is not real at {:?}",
                    x.0
                )));
            }
            if v.re < 0.0 {
                return Err(Error::Realizability(format!(
                    "density {:.3e} < 0 at {:?}",
                    v.re, x.0
                )));
            }
        }
        Ok(())
    }

    /// Midpoint-rule integral over the grid.
    pub fn integrate_on(&self, grid: &Grid) -> f64 {
        let s: f64 = (0..grid.len()).map(|i| self.value(grid.center(i))).sum();
        s * grid.cell_volume()
    }
}
