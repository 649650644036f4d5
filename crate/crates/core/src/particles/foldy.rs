//! The discrete many-ball system: one unknown `U(x_m)` per ball,
//!
//! ```text
//! U(x_m) − k² Σ_j n_j² Γ_mj U(x_j) = u₀(x_m),   Γ_mj ≈ ∫_{B_j} G(x_m, y) dy.
//! ```

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{BallConfig, FieldEvaluator, GreenFunction};
use crate::kernel::{ball_potential, ball_self_integral, kernel_at_distance, smooth_kernel_part};
use crate::linalg::{self, DenseMatrix, LuFactorization, SolveMethod, SolveReport, SolverOptions};
use crate::{par, Error, Result, Vec3};

type C64 = Complex64;

const FOUR_PI: f64 = 4.0 * core::f64::consts::PI;

/// Pairs closer than this many radii use the exact static ball integral.
const NEAR_PAIR_RADII: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FoldyOptions {
    /// Add `V_a (G − g)(x_m, x_m)` to the self term. Only meaningful for an
    /// inhomogeneous background.
    pub self_correction: bool,
}

#[derive(Debug, Clone)]
pub struct FoldySystem<'a> {
    matrix: DenseMatrix,
    rhs: Vec<C64>,
    config: &'a BallConfig,
    k: f64,
}

impl<'a> FoldySystem<'a> {
    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[C64] {
        &self.rhs
    }

    pub fn config(&self) -> &'a BallConfig {
        self.config
    }

    pub fn k(&self) -> f64 {
        self.k
    }
}

/// `∫_{B(center, a)} G(x, y) dy` from the static ball potential, the smooth
/// part of `g` and the regular part `R` at the center.
fn ball_integral(x: Vec3, center: Vec3, a: f64, k: f64, regular: C64) -> C64 {
    let va = crate::ball_volume(a);
    let r = x.distance(center);
    if r == 0.0 {
        return ball_self_integral(a, k) + regular * va;
    }
    if r < NEAR_PAIR_RADII * a {
        let static_part = ball_potential(x, center, a) / FOUR_PI;
        return smooth_kernel_part(r, k) * va + static_part + regular * va;
    }
    (kernel_at_distance(r, k) + regular) * va
}

/// Builds the matrix `δ_mj − k² n_j² Γ_mj` and right-hand side `u₀(x_m)`.
///
/// Off-diagonal `Γ_mj = V_a G(x_m, x_j)`; the diagonal uses the exact self
/// integral of the free-space kernel over the ball.
pub fn assemble_foldy<'a>(
    config: &'a BallConfig,
    u0: &dyn FieldEvaluator,
    green: &dyn GreenFunction,
    options: FoldyOptions,
) -> Result<FoldySystem<'a>> {
    let m = config.len();
    if m == 0 {
        return Err(Error::invalid("configuration has no balls"));
    }
    let k = green.k();
    let a = config.radius();
    let centers = config.centers();
    let coeffs = config.coeffs();
    if config.min_separation() == 0.0 {
        return Err(Error::invalid("coincident ball centers"));
    }

    // Column j of R holds R(x_m, x_j).
    let regular: Option<Vec<Vec<C64>>> = if green.is_free_space() {
        None
    } else {
        let mut cols = Vec::with_capacity(m);
        for &y in centers {
            cols.push(green.regular_part(y, centers)?);
        }
        Some(cols)
    };

    let k2 = k * k;
    let matrix = DenseMatrix::from_rows(m, |i, row| {
        let xi = centers[i];
        for (j, v) in row.iter_mut().enumerate() {
            let r = regular.as_ref().map_or(C64::new(0.0, 0.0), |cols| {
                if i == j && !options.self_correction {
                    C64::new(0.0, 0.0)
                } else {
                    cols[j][i]
                }
            });
            let gamma = ball_integral(xi, centers[j], a, k, r);
            *v = -gamma * coeffs[j] * k2;
        }
        row[i] += C64::new(1.0, 0.0);
    });
    if !matrix.is_finite() {
        return Err(Error::invalid("assembled matrix is not finite"));
    }
    let rhs = centers.iter().map(|&x| u0.eval(x)).collect();
    Ok(FoldySystem {
        matrix,
        rhs,
        config,
        k,
    })
}

/// `U(x_m)` together with how it was obtained.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub values: Vec<C64>,
    pub report: SolveReport,
    /// Pivot-ratio estimate when the system was factorized.
    pub condition_estimate: Option<f64>,
}

pub fn solve_discrete(
    system: &FoldySystem<'_>,
    options: &SolverOptions,
) -> Result<DiscreteSolution> {
    let n = system.matrix.dim();
    if n <= options.direct_limit {
        let lu = LuFactorization::new(system.matrix.clone())?;
        let values = lu.solve(&system.rhs);
        let report = SolveReport {
            method: SolveMethod::Direct,
            iterations: 0,
            residual: linalg::relative_residual(&system.matrix, &values, &system.rhs),
            tolerance: options.tolerance,
            unknowns: n,
            warnings: Vec::new(),
        };
        if !report.converged() {
            return Err(Error::SolverFailure { report });
        }
        Ok(DiscreteSolution {
            values,
            report,
            condition_estimate: Some(lu.condition_estimate()),
        })
    } else {
        let (values, report) = linalg::gmres(
            &system.matrix,
            &system.rhs,
            options.tolerance,
            options.max_iterations,
        )?;
        Ok(DiscreteSolution {
            values,
            report,
            condition_estimate: None,
        })
    }
}

/// `U(x) = u₀(x) + k² Σ_m n_m² ∫_{B_m} G(x, y) dy U(x_m)`.
///
/// Ball integrals use `V_a G(x, x_m)` away from the ball and the exact static
/// potential within `3a` of its surface (interior branch inside the ball).
/// `R(x, x_m)` is obtained from one solve with source `x` by reciprocity.
pub fn evaluate_discrete_field(
    config: &BallConfig,
    solution: &[C64],
    u0: &dyn FieldEvaluator,
    green: &dyn GreenFunction,
    x: Vec3,
) -> Result<C64> {
    if !x.is_finite() {
        return Err(Error::invalid("evaluation point must be finite"));
    }
    if solution.len() != config.len() {
        return Err(Error::invalid(format!(
            "solution has {} entries for {} balls",
            solution.len(),
            config.len()
        )));
    }
    let k = green.k();
    let a = config.radius();
    let regular = if green.is_free_space() || config.is_empty() {
        vec![C64::new(0.0, 0.0); config.len()]
    } else {
        green.regular_part(x, config.centers())?
    };
    let mut terms = vec![C64::new(0.0, 0.0); config.len()];
    par::for_each_row(&mut terms, |m, t| {
        let gamma = ball_integral(x, config.centers()[m], a, k, regular[m]);
        *t = config.coeffs()[m] * gamma * solution[m];
    });
    let sum: C64 = terms.iter().sum();
    Ok(u0.eval(x) + sum * (k * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::particles::FreeSpaceGreen;
    use crate::{Domain, IncidentWave};

    fn wave() -> IncidentWave {
        IncidentWave::towards(1.0, Vec3::new(0.0, 0.0, 1.0)).unwrap()
    }

    #[test]
    fn single_ball_scalar_system() {
        let d = Domain::unit_cube();
        let n2 = C64::new(3.0, 0.5);
        let cfg = BallConfig::new(0.05, vec![Vec3::new(0.5, 0.5, 0.5)], vec![n2], &d).unwrap();
        let g = FreeSpaceGreen { k: 1.0 };
        let sys = assemble_foldy(&cfg, &wave(), &g, FoldyOptions::default()).unwrap();
        let expected = C64::new(1.0, 0.0) - n2 * ball_self_integral(0.05, 1.0);
        assert!((sys.matrix().get(0, 0) - expected).norm() < 1e-16);
    }

    #[test]
    fn two_balls_are_symmetric() {
        let d = Domain::unit_cube();
        let c = vec![Vec3::new(0.3, 0.5, 0.5), Vec3::new(0.7, 0.45, 0.5)];
        let cfg = BallConfig::new(0.02, c.clone(), vec![C64::new(2.0, 0.0); 2], &d).unwrap();
        let g = FreeSpaceGreen { k: 2.0 };
        let sys = assemble_foldy(&cfg, &wave(), &g, FoldyOptions::default()).unwrap();
        let m = sys.matrix();
        assert!((m.get(0, 1) - m.get(1, 0)).norm() < 1e-18);
        let gamma = kernel_at_distance(c[0].distance(c[1]), 2.0) * crate::ball_volume(0.02);
        assert!((m.get(0, 1) + gamma * 2.0 * 4.0).norm() < 1e-16);
    }

    #[test]
    fn zero_contrast_is_identity() {
        let d = Domain::unit_cube();
        let c = vec![
            Vec3::new(0.3, 0.5, 0.5),
            Vec3::new(0.5, 0.5, 0.5),
            Vec3::new(0.7, 0.5, 0.5),
        ];
        let cfg = BallConfig::new(0.05, c, vec![C64::new(0.0, 0.0); 3], &d).unwrap();
        let g = FreeSpaceGreen { k: 1.0 };
        let w = wave();
        let sys = assemble_foldy(&cfg, &w, &g, FoldyOptions::default()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_eq!(sys.matrix().get(i, j), C64::new(e, 0.0));
            }
        }
        let sol = solve_discrete(&sys, &SolverOptions::default()).unwrap();
        for (u, x) in sol.values.iter().zip(cfg.centers()) {
            assert!((u - w.value(*x)).norm() < 1e-15);
        }
        let probe = Vec3::new(0.1, 0.2, 0.3);
        let v = evaluate_discrete_field(&cfg, &sol.values, &w, &g, probe).unwrap();
        assert!((v - w.value(probe)).norm() < 1e-15);
    }

    #[test]
    fn empty_config_cannot_be_assembled() {
        let cfg = BallConfig::empty(0.1);
        let g = FreeSpaceGreen { k: 1.0 };
        assert!(assemble_foldy(&cfg, &wave(), &g, FoldyOptions::default()).is_err());
    }

    #[test]
    fn interior_evaluation_is_finite_and_continuous() {
        let d = Domain::unit_cube();
        let c = Vec3::new(0.5, 0.5, 0.5);
        let cfg = BallConfig::new(0.05, vec![c], vec![C64::new(2.0, 0.0)], &d).unwrap();
        let g = FreeSpaceGreen { k: 1.0 };
        let w = wave();
        let sys = assemble_foldy(&cfg, &w, &g, FoldyOptions::default()).unwrap();
        let sol = solve_discrete(&sys, &SolverOptions::default()).unwrap();
        let inside = evaluate_discrete_field(
            &cfg,
            &sol.values,
            &w,
            &g,
            c + Vec3::new(0.05 * (1.0 - 1e-9), 0.0, 0.0),
        )
        .unwrap();
        let outside = evaluate_discrete_field(
            &cfg,
            &sol.values,
            &w,
            &g,
            c + Vec3::new(0.05 * (1.0 + 1e-9), 0.0, 0.0),
        )
        .unwrap();
        assert!((inside - outside).norm() < 1e-9);
        assert!(
            evaluate_discrete_field(&cfg, &sol.values, &w, &g, Vec3::new(f64::NAN, 0.0, 0.0))
                .is_err()
        );
    }
}
