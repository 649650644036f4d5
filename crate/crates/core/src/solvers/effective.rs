use alloc::vec::Vec;

use num_complex::Complex64;

use super::{BackgroundField, DiscreteOperator, GreenSource, GreensSolver};
use crate::linalg::{self, DenseMatrix, SolveReport, SolverOptions};
use crate::{
    par, DensityProfile, Error, Grid, GridField, IncidentWave, RefractionProfile, Result, Vec3,
};

type C64 = Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EffectiveMode {
    /// `u_e = e^{ikα·x} − ∫ g (q₀ − k² N ν²) u_e`, one free-space kernel.
    #[default]
    SingleKernel,
    /// `u_e = u₀ + k² ∫ G N ν² u_e` with `G` from the background Green's
    /// solver, one cell-source solve per grid cell. Slow; for
    /// cross-validation on small grids.
    DirectGreens,
}

/// Effective field on the grid.
#[derive(Debug, Clone)]
pub struct EffectiveField {
    field: GridField,
    wave: IncidentWave,
    operator: DiscreteOperator,
    report: SolveReport,
}

impl EffectiveField {
    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn report(&self) -> &SolveReport {
        &self.report
    }

    /// Total contrast `q₀ − k² N ν²` at the cell centers.
    pub fn total_contrast(&self) -> &[C64] {
        self.operator.multiplier()
    }

    /// Integral representation of `u_e` at any point.
    pub fn eval(&self, x: Vec3) -> C64 {
        self.wave.value(x) - self.operator.potential_at(x, self.field.values())
    }
}

fn sample_product(density: &DensityProfile, nu_sq: &RefractionProfile, grid: &Grid) -> Vec<C64> {
    (0..grid.len())
        .map(|i| {
            let x = grid.center(i);
            nu_sq.value(x) * density.value(x)
        })
        .collect()
}

/// Solves the effective-field equation `u_e = u₀ + k² ∫_D G N ν² u_e`.
pub fn solve_effective(
    u0: &BackgroundField,
    n0_sq: &RefractionProfile,
    density: &DensityProfile,
    nu_sq: &RefractionProfile,
    grid: &Grid,
    options: &SolverOptions,
    mode: EffectiveMode,
) -> Result<EffectiveField> {
    if u0.field().grid() != grid {
        return Err(Error::GridMismatch);
    }
    density.validate_on(grid)?;
    nu_sq.validate_on(grid)?;
    let wave = *u0.wave();
    let k = wave.k();
    let k2 = k * k;
    let q0 = u0.operator().multiplier();
    let product = sample_product(density, nu_sq, grid);
    let total: Vec<C64> = q0.iter().zip(&product).map(|(q, p)| q - p * k2).collect();
    let operator = DiscreteOperator::new(*grid, k, total)?;

    let (values, report) = match mode {
        EffectiveMode::SingleKernel => {
            let rhs: Vec<C64> = (0..grid.len())
                .map(|i| wave.value(grid.center(i)))
                .collect();
            if operator.multiplier().iter().all(|q| q.norm() == 0.0) {
                (rhs, trivial_report(grid.len(), options))
            } else {
                linalg::solve(&operator, || operator.to_dense(), &rhs, options)?
            }
        }
        EffectiveMode::DirectGreens => {
            let system = direct_greens_matrix(n0_sq, k, grid, &product, options)?;
            let rhs = u0.field().values().to_vec();
            linalg::solve(&system, || system.clone(), &rhs, options)?
        }
    };
    let mut report = report;
    report.warnings.extend(u0.report().warnings.iter().cloned());
    Ok(EffectiveField {
        field: GridField::new(*grid, values)?,
        wave,
        operator,
        report,
    })
}

/// `δ_ij − k² W_ij N_j ν²_j` with `W_ij = ∫_{cell j} G(c_i, y) dy`.
fn direct_greens_matrix(
    n0_sq: &RefractionProfile,
    k: f64,
    grid: &Grid,
    product: &[C64],
    options: &SolverOptions,
) -> Result<DenseMatrix> {
    let solver = GreensSolver::new(n0_sq, k, grid, options)?;
    let n = grid.len();
    let vol = grid.cell_volume();
    let mut columns: Vec<Vec<C64>> = (0..n).map(|_| Vec::new()).collect();
    for (j, col) in columns.iter_mut().enumerate() {
        if product[j].norm() != 0.0 {
            *col = solver
                .solve(GreenSource::Cell(j))?
                .values()
                .values()
                .to_vec();
        }
    }
    let k2 = k * k;
    Ok(DenseMatrix::from_rows(n, |i, row| {
        for (j, v) in row.iter_mut().enumerate() {
            if !columns[j].is_empty() {
                *v = -columns[j][i] * vol * product[j] * k2;
            }
        }
        row[i] += C64::new(1.0, 0.0);
    }))
}

fn trivial_report(n: usize, options: &SolverOptions) -> SolveReport {
    SolveReport {
        method: linalg::SolveMethod::Direct,
        iterations: 0,
        residual: 0.0,
        tolerance: options.tolerance,
        unknowns: n,
        warnings: Vec::new(),
    }
}

/// First Born approximation of the effective field on the grid,
/// `u₀ + k² K (N ν² u₀)` with the same discrete kernel as the solver.
pub fn born_approximation(
    u0: &BackgroundField,
    density: &DensityProfile,
    nu_sq: &RefractionProfile,
) -> Result<GridField> {
    let grid = *u0.field().grid();
    let k = u0.wave().k();
    let product = sample_product(density, nu_sq, &grid);
    let op = DiscreteOperator::new(grid, k, product)?;
    let scattered = op.apply_kernel(u0.field().values());
    let mut values = u0.field().values().to_vec();
    par::for_each_row(&mut values, |i, v| *v += scattered[i] * (k * k));
    GridField::new(grid, values)
}
