use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::{derive_contrast, resolution_warning, ContrastField, DiscreteOperator};
use crate::kernel::{cell_kernel_integral, free_space_kernel};
use crate::linalg::{self, LuFactorization, SolveMethod, SolveReport, SolverOptions};
use crate::{Error, Grid, GridField, RefractionProfile, Result, Vec3};

type C64 = Complex64;

/// Where the Green's function is excited.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GreenSource {
    /// Point source `δ(x − y)`.
    Point(Vec3),
    /// Source spread uniformly over one grid cell (unit total strength).
    Cell(usize),
}

#[derive(Debug)]
struct Shared {
    operator: DiscreteOperator,
    factor: Option<LuFactorization>,
    options: SolverOptions,
    warnings: Vec<alloc::string::String>,
}

/// Solves `G(x, y) = g(x, y) − ∫_D g(x, z) q₀(z) G(z, y) dz` for any number
/// of sources, factorizing the collocation matrix once when it is small
/// enough.
#[derive(Debug, Clone)]
pub struct GreensSolver {
    shared: Arc<Shared>,
}

impl GreensSolver {
    pub fn new(
        n0_sq: &RefractionProfile,
        k: f64,
        grid: &Grid,
        options: &SolverOptions,
    ) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::invalid("wavenumber must be positive"));
        }
        n0_sq.validate_on(grid)?;
        let contrast = derive_contrast(n0_sq, k, grid);
        Self::from_contrast(&contrast, k, options, n0_sq)
    }

    fn from_contrast(
        contrast: &ContrastField,
        k: f64,
        options: &SolverOptions,
        n0_sq: &RefractionProfile,
    ) -> Result<Self> {
        let grid = *contrast.grid();
        let operator = DiscreteOperator::new(grid, k, contrast.values().to_vec())?;
        let factor = if !contrast.is_zero() && grid.len() <= options.direct_limit {
            Some(LuFactorization::new(operator.to_dense())?)
        } else {
            None
        };
        let n_max = (0..grid.len())
            .map(|i| Float::sqrt(n0_sq.value(grid.center(i)).norm()))
            .fold(1.0, f64::max);
        let warnings = resolution_warning(&grid, k, n_max).into_iter().collect();
        Ok(GreensSolver {
            shared: Arc::new(Shared {
                operator,
                factor,
                options: *options,
                warnings,
            }),
        })
    }

    pub fn grid(&self) -> &Grid {
        self.shared.operator.grid()
    }

    pub fn k(&self) -> f64 {
        self.shared.operator.k()
    }

    pub fn contrast_is_zero(&self) -> bool {
        self.shared
            .operator
            .multiplier()
            .iter()
            .all(|q| q.norm() == 0.0)
    }

    /// Right-hand side for a source: `g(c_i, y)`, replaced by the average of
    /// `g(·, y)` over cell `i` when `y` lies in that cell, or the cell-averaged
    /// source column `K_ij / |cell|` for [`GreenSource::Cell`].
    fn rhs(&self, source: GreenSource) -> Result<Vec<C64>> {
        let grid = *self.grid();
        let k = self.k();
        match source {
            GreenSource::Point(y) => {
                if !y.is_finite() {
                    return Err(Error::invalid("source point must be finite"));
                }
                Ok((0..grid.len())
                    .map(|i| {
                        let cell = grid.cell(i);
                        if cell.contains(y) {
                            cell_kernel_integral(y, &cell, k) / cell.volume()
                        } else {
                            free_space_kernel(cell.center, y, k).expect("y outside the cell")
                        }
                    })
                    .collect())
            }
            GreenSource::Cell(j) => {
                if j >= grid.len() {
                    return Err(Error::invalid("source cell out of range"));
                }
                let vol = grid.cell_volume();
                Ok((0..grid.len())
                    .map(|i| self.shared.operator.weight(i, j) / vol)
                    .collect())
            }
        }
    }

    pub fn solve(&self, source: GreenSource) -> Result<GreensField> {
        let rhs = self.rhs(source)?;
        let grid = *self.grid();
        let sh = &self.shared;
        let (values, mut report) = if self.contrast_is_zero() {
            (
                rhs,
                SolveReport {
                    method: SolveMethod::Direct,
                    iterations: 0,
                    residual: 0.0,
                    tolerance: sh.options.tolerance,
                    unknowns: grid.len(),
                    warnings: Vec::new(),
                },
            )
        } else if let Some(lu) = &sh.factor {
            let x = lu.solve(&rhs);
            let report = SolveReport {
                method: SolveMethod::Direct,
                iterations: 0,
                residual: linalg::relative_residual(&sh.operator, &x, &rhs),
                tolerance: sh.options.tolerance,
                unknowns: grid.len(),
                warnings: Vec::new(),
            };
            if !report.converged() {
                return Err(Error::SolverFailure { report });
            }
            (x, report)
        } else {
            linalg::gmres(
                &sh.operator,
                &rhs,
                sh.options.tolerance,
                sh.options.max_iterations,
            )?
        };
        report.warnings.extend(sh.warnings.iter().cloned());
        Ok(GreensField {
            source,
            values: GridField::new(grid, values)?,
            report,
            solver: self.clone(),
        })
    }
}

/// `G(·, y)` at the cell centers with an evaluator for arbitrary targets.
#[derive(Debug, Clone)]
pub struct GreensField {
    source: GreenSource,
    values: GridField,
    report: SolveReport,
    solver: GreensSolver,
}

impl GreensField {
    pub fn source(&self) -> GreenSource {
        self.source
    }

    pub fn values(&self) -> &GridField {
        &self.values
    }

    pub fn report(&self) -> &SolveReport {
        &self.report
    }

    fn correction(&self, x: Vec3) -> C64 {
        self.solver
            .shared
            .operator
            .potential_at(x, self.values.values())
    }

    /// Right-hand side of the Fredholm equation at `x`.
    pub fn eval(&self, x: Vec3) -> Result<C64> {
        if !x.is_finite() {
            return Err(Error::invalid("evaluation point must be finite"));
        }
        let direct = match self.source {
            GreenSource::Point(y) => free_space_kernel(x, y, self.solver.k())?,
            GreenSource::Cell(j) => {
                let cell = self.solver.grid().cell(j);
                cell_kernel_integral(x, &cell, self.solver.k()) / cell.volume()
            }
        };
        Ok(direct - self.correction(x))
    }

    /// `G(x, y) − g(x, y)`, which stays bounded as `x → y`.
    pub fn regular_part(&self, x: Vec3) -> C64 {
        -self.correction(x)
    }
}

/// One-shot Green's function for a point source `y`.
pub fn greens_function(
    n0_sq: &RefractionProfile,
    k: f64,
    y: Vec3,
    grid: &Grid,
    options: &SolverOptions,
) -> Result<GreensField> {
    GreensSolver::new(n0_sq, k, grid, options)?.solve(GreenSource::Point(y))
}
