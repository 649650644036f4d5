//! Choosing a ball density `N` and ball coefficient `ν²` so that
//! `n₀² + N ν² = n²`.
//!
//! The split is not unique. Each [`Strategy`] fixes one factor and solves for
//! the other. Pointwise conditions are checked at the centers of a sampling
//! grid.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::profile::EQUALITY_TOLERANCE;
use crate::{
    DensityProfile, Error, FieldExpr, Grid, RefractionProfile, Result, Vec3, PACKING_BOUND,
};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum Strategy {
    /// Constant density; `ν² = (n² − n₀²)/N`.
    FixedDensity { density: f64 },
    /// Constant ball coefficient; `N = (n² − n₀²)/ν²`, which must come out
    /// real and nonnegative.
    FixedNuSquared {
        #[cfg_attr(feature = "serde", serde(with = "crate::serde_complex"))]
        nu_sq: Complex64,
    },
    /// No balls where `n² = n₀²`, the given constant density elsewhere.
    ZeroWhereEqual { density: f64 },
}

/// Outcome of one realizability check.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Diagnostic {
    pub region: String,
    pub check: String,
    pub passed: bool,
    /// Worst value encountered.
    pub value: f64,
    /// Where the worst value was seen, for pointwise checks.
    pub location: Option<Vec3>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DesignResult {
    pub density: DensityProfile,
    pub nu_sq: RefractionProfile,
    pub diagnostics: Vec<Diagnostic>,
}

impl DesignResult {
    pub fn all_passed(&self) -> bool {
        self.diagnostics.iter().all(|d| d.passed)
    }

    /// `N(x) ν²(x)`, the contrast the balls add to the background.
    pub fn product(&self, x: Vec3) -> Complex64 {
        self.nu_sq.value(x) * self.density.value(x)
    }
}

pub const CHECK_DENSITY_NONNEGATIVE: &str = "density_nonnegative";
pub const CHECK_DENSITY_REAL: &str = "density_real";
pub const CHECK_PACKING: &str = "packing_bound";
pub const CHECK_VOLUME: &str = "total_volume";
pub const CHECK_ABSORPTION: &str = "im_nu_sq_nonnegative";

fn check_constant_density(density: f64) -> Result<()> {
    if !density.is_finite() || density < 0.0 {
        return Err(Error::invalid(format!(
            "density must be finite and positive, got {density}"
        )));
    }
    if density == 0.0 {
        return Err(Error::invalid(
            "density must be nonzero: ν² = (n² − n₀²)/N divides by it",
        ));
    }
    Ok(())
}

/// Splits `n² − n₀²` into `N · ν²` according to `strategy`, running every
/// realizability check but failing only on malformed input.
pub fn propose_design(
    n_sq: &RefractionProfile,
    n0_sq: &RefractionProfile,
    strategy: Strategy,
    grid: &Grid,
) -> Result<DesignResult> {
    if n_sq.domain() != n0_sq.domain() {
        return Err(Error::invalid(
            "target and background profiles must share a domain",
        ));
    }
    let domain = *n_sq.domain();
    let contrast = n_sq.expr().clone().minus(n0_sq.expr().clone());

    let (density, nu_sq) = match strategy {
        Strategy::FixedDensity { density } => {
            check_constant_density(density)?;
            (
                FieldExpr::constant(density),
                contrast.divided_by(FieldExpr::constant(density)),
            )
        }
        Strategy::FixedNuSquared { nu_sq } => {
            if !(nu_sq.re.is_finite() && nu_sq.im.is_finite()) {
                return Err(Error::invalid("ν² must be finite"));
            }
            if nu_sq.norm() == 0.0 {
                return Err(Error::invalid(
                    "ν² must be nonzero: N = (n² − n₀²)/ν² divides by it",
                ));
            }
            (
                contrast.divided_by(FieldExpr::constant(nu_sq)),
                FieldExpr::constant(nu_sq),
            )
        }
        Strategy::ZeroWhereEqual { density } => {
            check_constant_density(density)?;
            let n = FieldExpr::ZeroWhereEqual {
                lhs: Box::new(n_sq.expr().clone()),
                rhs: Box::new(n0_sq.expr().clone()),
                value: Box::new(FieldExpr::constant(density)),
            };
            (n, contrast.divided_by(FieldExpr::constant(density)))
        }
    };

    let mut result = DesignResult {
        density: DensityProfile::new(domain, density),
        nu_sq: RefractionProfile::new(domain, nu_sq),
        diagnostics: Vec::new(),
    };
    result.diagnostics = realizability_check(&result, grid);
    Ok(result)
}

/// [`propose_design`], failing if the result would need `Im ν² < 0` or
/// `N > π/6` at any cell center of `grid`. Other failed checks are only
/// reported in the diagnostics.
pub fn design(
    n_sq: &RefractionProfile,
    n0_sq: &RefractionProfile,
    strategy: Strategy,
    grid: &Grid,
) -> Result<DesignResult> {
    let result = propose_design(n_sq, n0_sq, strategy, grid)?;
    for d in &result.diagnostics {
        if d.passed {
            continue;
        }
        match d.check.as_str() {
            CHECK_ABSORPTION => {
                return Err(Error::Realizability(format!(
                    "design needs Im ν² = {:.3e} < 0 at {:?}; absorption must be nonnegative",
                    d.value,
                    d.location.map(|p| p.0)
                )))
            }
            CHECK_PACKING => {
                return Err(Error::PackingInfeasible {
                    region: match d.location {
                        Some(p) => format!("cell at {:?}", p.0),
                        None => d.region.clone(),
                    },
                    density: d.value,
                    bound: PACKING_BOUND,
                })
            }
            _ => {}
        }
    }
    Ok(result)
}

/// Largest `|n₀² + N ν² − n²|` over the cell centers of `grid`.
pub fn verify_design(
    result: &DesignResult,
    n0_sq: &RefractionProfile,
    n_sq: &RefractionProfile,
    grid: &Grid,
) -> f64 {
    (0..grid.len())
        .map(|i| {
            let x = grid.center(i);
            (n0_sq.value(x) + result.product(x) - n_sq.value(x)).norm()
        })
        .fold(0.0, f64::max)
}

/// Evaluates every realizability condition on the cell centers of `grid`.
/// Never fails; the caller decides what to do with failed checks.
pub fn realizability_check(result: &DesignResult, grid: &Grid) -> Vec<Diagnostic> {
    let domain = *grid.domain();
    let region = "domain".to_string();

    // (value, location) pairs tracking the worst sample of each check.
    let mut min_density = (f64::INFINITY, None);
    let mut max_density = (f64::NEG_INFINITY, None);
    let mut max_imag_density = (0.0_f64, None);
    let mut min_im_nu = (f64::INFINITY, None);
    let mut integral = 0.0;

    for i in 0..grid.len() {
        let x = grid.center(i);
        let n = if result.density.domain().contains(x) {
            result.density.expr().eval(x)
        } else {
            Complex64::new(0.0, 0.0)
        };
        if n.re < min_density.0 {
            min_density = (n.re, Some(x));
        }
        if n.re > max_density.0 {
            max_density = (n.re, Some(x));
        }
        let imag = n.im.abs() / n.re.abs().max(1.0);
        if imag > max_imag_density.0 {
            max_imag_density = (imag, Some(x));
        }
        let nu = result.nu_sq.value(x);
        // ν² only matters where balls are actually placed.
        if n.re > 0.0 && nu.im < min_im_nu.0 {
            min_im_nu = (nu.im, Some(x));
        }
        integral += n.re;
    }
    integral *= grid.cell_volume();
    if min_im_nu.0 == f64::INFINITY {
        min_im_nu.0 = 0.0;
    }

    let tol = EQUALITY_TOLERANCE;
    let diag = |check: &str, passed: bool, (value, location): (f64, Option<Vec3>)| Diagnostic {
        region: region.clone(),
        check: check.to_string(),
        passed,
        value,
        location,
    };
    alloc::vec![
        diag(
            CHECK_DENSITY_NONNEGATIVE,
            min_density.0 >= -tol,
            min_density
        ),
        diag(
            CHECK_DENSITY_REAL,
            max_imag_density.0 <= tol,
            max_imag_density
        ),
        diag(
            CHECK_PACKING,
            max_density.0 <= PACKING_BOUND * (1.0 + tol),
            max_density
        ),
        diag(
            CHECK_VOLUME,
            integral <= domain.volume() * (1.0 + tol),
            (integral, None)
        ),
        diag(CHECK_ABSORPTION, min_im_nu.0 >= -tol, min_im_nu),
    ]
}
