use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use super::{derive_contrast, resolution_warning, ContrastField, DiscreteOperator};
use crate::linalg::{self, SolveReport, SolverOptions};
use crate::{GridField, IncidentWave, RefractionProfile, Result, Vec3};

/// Background field `u₀` on the grid plus what is needed to extend it off
/// the grid.
#[derive(Debug, Clone)]
pub struct BackgroundField {
    field: GridField,
    wave: IncidentWave,
    operator: DiscreteOperator,
    report: SolveReport,
}

impl BackgroundField {
    pub fn field(&self) -> &GridField {
        &self.field
    }

    pub fn wave(&self) -> &IncidentWave {
        &self.wave
    }

    pub fn report(&self) -> &SolveReport {
        &self.report
    }

    pub fn contrast(&self) -> ContrastField {
        ContrastField::from_values(*self.field.grid(), self.operator.multiplier().to_vec())
    }

    pub(crate) fn operator(&self) -> &DiscreteOperator {
        &self.operator
    }

    /// Scattered part `v = u₀ − e^{ikα·x}` at the cell centers.
    pub fn scattered(&self) -> GridField {
        let grid = *self.field.grid();
        let values = (0..grid.len())
            .map(|i| self.field.get(i) - self.wave.value(grid.center(i)))
            .collect();
        GridField::new(grid, values).expect("difference of finite fields")
    }

    /// `u₀(x) = e^{ikα·x} − ∫_D g(x, z) q₀(z) u₀(z) dz` at any point.
    pub fn eval(&self, x: Vec3) -> Complex64 {
        self.wave.value(x) - self.operator.potential_at(x, self.field.values())
    }

    /// Scattered part at any point.
    pub fn eval_scattered(&self, x: Vec3) -> Complex64 {
        -self.operator.potential_at(x, self.field.values())
    }
}

/// Solves `u + K q u = f` for the given contrast and incident samples.
pub fn solve_lippmann_schwinger(
    contrast: &ContrastField,
    k: f64,
    incident: impl Fn(Vec3) -> Complex64,
    options: &SolverOptions,
) -> Result<(GridField, DiscreteOperator, SolveReport)> {
    let grid = *contrast.grid();
    let operator = DiscreteOperator::new(grid, k, contrast.values().to_vec())?;
    let rhs: Vec<Complex64> = (0..grid.len()).map(|i| incident(grid.center(i))).collect();
    let (values, report) = if contrast.is_zero() {
        let report = SolveReport {
            method: linalg::SolveMethod::Direct,
            iterations: 0,
            residual: 0.0,
            tolerance: options.tolerance,
            unknowns: grid.len(),
            warnings: Vec::new(),
        };
        (rhs, report)
    } else {
        linalg::solve(&operator, || operator.to_dense(), &rhs, options)?
    };
    Ok((GridField::new(grid, values)?, operator, report))
}

/// Background scattering problem in volume-integral form,
/// `u₀ = e^{ikα·x} − ∫_D g q₀ u₀`; the outgoing kernel carries the radiation
/// condition.
pub fn solve_background(
    n0_sq: &RefractionProfile,
    wave: &IncidentWave,
    grid: &crate::Grid,
    options: &SolverOptions,
) -> Result<BackgroundField> {
    n0_sq.validate_on(grid)?;
    let k = wave.k();
    let contrast = derive_contrast(n0_sq, k, grid);
    let n_max = (0..grid.len())
        .map(|i| Float::sqrt(n0_sq.value(grid.center(i)).norm()))
        .fold(1.0, f64::max);
    let (field, operator, mut report) =
        solve_lippmann_schwinger(&contrast, k, |x| wave.value(x), options)?;
    report.warnings.extend(resolution_warning(grid, k, n_max));
    Ok(BackgroundField {
        field,
        wave: *wave,
        operator,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Domain, Grid};

    #[test]
    fn vacuum_returns_incident_wave() {
        let d = Domain::unit_cube();
        let g = Grid::cubic(d, 5).unwrap();
        let w = IncidentWave::towards(2.0, Vec3::new(1.0, 0.0, 1.0)).unwrap();
        let u = solve_background(
            &RefractionProfile::vacuum(d),
            &w,
            &g,
            &SolverOptions::default(),
        )
        .unwrap();
        for i in 0..g.len() {
            assert_eq!(u.field().get(i), w.value(g.center(i)));
        }
        assert!(u.scattered().max_abs() == 0.0);
        let x = Vec3::new(3.0, -1.0, 0.2);
        assert_eq!(u.eval(x), w.value(x));
    }

    #[test]
    fn coarse_grid_warns() {
        let d = Domain::unit_cube();
        let g = Grid::cubic(d, 3).unwrap();
        let w = IncidentWave::towards(10.0, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let u = solve_background(
            &RefractionProfile::constant(d, 1.1),
            &w,
            &g,
            &SolverOptions::default(),
        )
        .unwrap();
        assert_eq!(u.report().warnings.len(), 1);
    }

    #[test]
    fn off_grid_evaluation_matches_grid_values() {
        let d = Domain::unit_cube();
        let g = Grid::cubic(d, 4).unwrap();
        let w = IncidentWave::towards(1.0, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let u = solve_background(
            &RefractionProfile::constant(d, 1.5),
            &w,
            &g,
            &SolverOptions::default(),
        )
        .unwrap();
        for i in 0..g.len() {
            let e = u.eval(g.center(i));
            assert!((e - u.field().get(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn rejects_negative_absorption() {
        let d = Domain::unit_cube();
        let g = Grid::cubic(d, 2).unwrap();
        let w = IncidentWave::towards(1.0, Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let p = RefractionProfile::constant(d, Complex64::new(1.0, -0.1));
        assert!(solve_background(&p, &w, &g, &SolverOptions::default()).is_err());
    }
}
