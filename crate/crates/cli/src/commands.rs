//! The four experiments. Each reads a resolved [`RunConfig`], writes its
//! files into `out` and returns a short summary for the terminal.

use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use refract_core::designer::{self, DesignResult, Diagnostic};
use refract_core::linalg::SolveReport;
use refract_core::particles::{
    assemble_foldy, evaluate_discrete_field, place_balls, solve_discrete, BackgroundGreen,
    BallConfig, FieldEvaluator, FoldyOptions, FreeSpaceGreen, GreenFunction,
};
use refract_core::solvers::{
    born_approximation, helmholtz_residual, near_diagonal_limit, solve_background, solve_effective,
    weighted_sup_norm, BackgroundField, EffectiveField, GreenSource, GreensSolver,
};
use refract_core::{Error, FieldExpr, Grid, RefractionProfile, Vec3};
use serde::Serialize;

use crate::config::{complex_pair, Embedding, GridSpec, RunConfig};
use crate::output::{balls_csv, field_csv, num, write_json, Csv};
use crate::CliError;

pub const DESIGN_FILE: &str = "design.json";
pub const DIAGNOSTICS_FILE: &str = "diagnostics.json";
pub const FIELD_FILE: &str = "effective_field.csv";
pub const RESIDUAL_FILE: &str = "residual.json";
pub const CONVERGENCE_FILE: &str = "convergence.csv";
pub const REPORT_FILE: &str = "report.json";
pub const GREENS_FILE: &str = "greens_diag.json";

#[derive(Serialize)]
struct DesignFile<'a> {
    config: &'a RunConfig,
    design: &'a DesignResult,
    /// Cell-center extremes of the designed fields, for reading without
    /// evaluating the expressions.
    sampled: Sampled,
    /// Largest `|n₀² + N ν² − n²|` on the grid.
    identity_error: f64,
}

#[derive(Serialize)]
struct Sampled {
    density: [f64; 2],
    nu_sq_re: [f64; 2],
    nu_sq_im: [f64; 2],
}

fn sample_design(result: &DesignResult, grid: &Grid) -> Sampled {
    let mut s = Sampled {
        density: [f64::INFINITY, f64::NEG_INFINITY],
        nu_sq_re: [f64::INFINITY, f64::NEG_INFINITY],
        nu_sq_im: [f64::INFINITY, f64::NEG_INFINITY],
    };
    let widen = |r: &mut [f64; 2], v: f64| *r = [r[0].min(v), r[1].max(v)];
    for i in 0..grid.len() {
        let x = grid.center(i);
        let nu = result.nu_sq.value(x);
        widen(&mut s.density, result.density.value(x));
        widen(&mut s.nu_sq_re, nu.re);
        widen(&mut s.nu_sq_im, nu.im);
    }
    s
}

#[derive(Serialize)]
struct DiagnosticsFile<'a> {
    config: &'a RunConfig,
    all_passed: bool,
    diagnostics: &'a [Diagnostic],
}

/// Designs `(N, ν²)` for the configured target and writes the design and its
/// diagnostics. Fails with a realizability error after writing if any check
/// failed.
pub fn cmd_design(config: &RunConfig, out: &Path) -> Result<String, CliError> {
    let grid = config.grid()?;
    let target = config.target()?;
    let background = config.background();
    let result = designer::propose_design(&target, &background, config.strategy()?, &grid)?;
    let identity_error = designer::verify_design(&result, &background, &target, &grid);

    write_json(
        &out.join(DESIGN_FILE),
        &DesignFile {
            config,
            design: &result,
            sampled: sample_design(&result, &grid),
            identity_error,
        },
    )?;
    write_json(
        &out.join(DIAGNOSTICS_FILE),
        &DiagnosticsFile {
            config,
            all_passed: result.all_passed(),
            diagnostics: &result.diagnostics,
        },
    )?;

    let failed: Vec<&str> = result
        .diagnostics
        .iter()
        .filter(|d| !d.passed)
        .map(|d| d.check.as_str())
        .collect();
    if !failed.is_empty() {
        return Err(CliError::Realizability(format!(
            "failed checks: {}",
            failed.join(", ")
        )));
    }
    Ok(format!(
        "design written; identity error {identity_error:.3e}"
    ))
}

/// `N` and `ν²` given directly or designed from the target.
fn embedding(config: &RunConfig, grid: &Grid) -> Result<Embedding, CliError> {
    if let Some(e) = config.direct_embedding() {
        return Ok(e);
    }
    if config.target.is_none() {
        return Err(CliError::Config(
            "either `density` and `nu_sq` or `target` and `strategy` are required".into(),
        ));
    }
    let d = designer::design(
        &config.target()?,
        &config.background(),
        config.strategy()?,
        grid,
    )?;
    Ok(Embedding {
        density: d.density,
        nu_sq: d.nu_sq,
    })
}

/// `n₀² + N ν²`.
fn total_refraction(config: &RunConfig, e: &Embedding) -> RefractionProfile {
    let n0 = config.background().expr().clone();
    let added = e.density.expr().clone().times(e.nu_sq.expr().clone());
    RefractionProfile::new(
        config.domain,
        FieldExpr::Sum {
            terms: vec![n0, added],
        },
    )
}

struct Solved {
    background: BackgroundField,
    effective: EffectiveField,
}

fn solve_fields(config: &RunConfig, grid: &Grid, e: &Embedding) -> Result<Solved, CliError> {
    let options = config.options();
    let n0 = config.background();
    let background = solve_background(&n0, &config.incident()?, grid, &options)?;
    let effective = solve_effective(
        &background,
        &n0,
        &e.density,
        &e.nu_sq,
        grid,
        &options,
        config.mode.into(),
    )?;
    Ok(Solved {
        background,
        effective,
    })
}

#[derive(Serialize)]
struct ResidualLevel {
    cells: [usize; 3],
    residual: f64,
    solve: SolveReport,
}

#[derive(Serialize)]
struct ResidualFile<'a> {
    config: &'a RunConfig,
    levels: Vec<ResidualLevel>,
    /// Coarse over fine residual, when a refined level was solved.
    ratio: Option<f64>,
    /// `‖u_e − u_Born‖ / ‖u_Born − u₀‖`; absent without contrast.
    born_relative_deviation: Option<f64>,
}

/// Solves for the effective field, writes its cell samples and the
/// Helmholtz residual against `n₀² + N ν²`.
pub fn cmd_effective(config: &RunConfig, out: &Path) -> Result<String, CliError> {
    let grid = config.grid()?;
    let e = embedding(config, &grid)?;
    let n_sq = total_refraction(config, &e);
    let k = config.wave.k;

    let mut levels = Vec::new();
    let solved = solve_fields(config, &grid, &e)?;
    field_csv(config, solved.effective.field())?.write(&out.join(FIELD_FILE))?;
    levels.push(ResidualLevel {
        cells: grid.cells_per_axis(),
        residual: residual(solved.effective.field(), &n_sq, k)?,
        solve: solved.effective.report().clone(),
    });

    let born = born_approximation(&solved.background, &e.density, &e.nu_sq)?;
    let scattered = born.difference(solved.background.field())?.l2_norm();
    let born_relative_deviation = if scattered > 0.0 {
        Some(solved.effective.field().difference(&born)?.l2_norm() / scattered)
    } else {
        None
    };

    let mut ratio = None;
    if config.refine_residual {
        let fine = config.grid_for(config.grid.refined())?;
        let s = solve_fields(config, &fine, &e)?;
        let r = residual(s.effective.field(), &n_sq, k)?;
        ratio = Some(levels[0].residual / r);
        levels.push(ResidualLevel {
            cells: fine.cells_per_axis(),
            residual: r,
            solve: s.effective.report().clone(),
        });
    }

    let summary = format!(
        "effective field solved; residual {:.3e}",
        levels[0].residual
    );
    write_json(
        &out.join(RESIDUAL_FILE),
        &ResidualFile {
            config,
            levels,
            ratio,
            born_relative_deviation,
        },
    )?;
    Ok(summary)
}

fn residual(
    field: &refract_core::GridField,
    n_sq: &RefractionProfile,
    k: f64,
) -> Result<f64, CliError> {
    helmholtz_residual(field, n_sq, k).map_err(|e| match e {
        Error::InvalidArgument(m) => CliError::Config(format!("residual: {m}")),
        other => other.into(),
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timings {
    pub placement: f64,
    pub assembly: f64,
    pub solve: f64,
    pub evaluation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub radius: f64,
    pub balls: usize,
    /// `max |U_a − u_e|` over the probes; absent for failed rows.
    pub error: Option<f64>,
    pub status: String,
    pub message: Option<String>,
    pub timings: Timings,
    pub solve: Option<SolveReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub successful_rows: usize,
    /// At least three successful rows with strictly decreasing error.
    pub strictly_decreasing: bool,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    config: &'a RunConfig,
    effective_solve: &'a SolveReport,
    rows: &'a [ConvergenceRow],
    verdict: &'a Verdict,
}

pub fn verdict(rows: &[ConvergenceRow]) -> Verdict {
    let errors: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
    Verdict {
        successful_rows: errors.len(),
        strictly_decreasing: errors.len() >= 3 && errors.windows(2).all(|w| w[1] < w[0]),
    }
}

/// Places balls for each radius, solves the discrete problem and compares it
/// with the effective field at the probe points.
pub fn cmd_converge(
    config: &RunConfig,
    out: &Path,
) -> Result<(Vec<ConvergenceRow>, Verdict), CliError> {
    if config.radii.len() < 3 {
        return Err(CliError::Config(
            "field `radii`: at least three radii are needed".into(),
        ));
    }
    if config.probes.is_empty() {
        return Err(CliError::Config(
            "field `probes`: at least one probe point is needed".into(),
        ));
    }
    let grid = config.grid()?;
    let e = embedding(config, &grid)?;
    let solved = solve_fields(config, &grid, &e)?;
    let reference: Vec<Complex64> = config
        .probes
        .iter()
        .map(|&p| solved.effective.eval(p))
        .collect();

    let options = config.options();
    let k = config.wave.k;
    let green: Box<dyn GreenFunction> = if solved.background.contrast().is_zero() {
        Box::new(FreeSpaceGreen { k })
    } else {
        Box::new(BackgroundGreen::new(GreensSolver::new(
            &config.background(),
            k,
            &grid,
            &options,
        )?))
    };
    let u0: &dyn FieldEvaluator = &solved.background;

    let mut rows = Vec::new();
    for (idx, &a) in config.radii.iter().enumerate() {
        let mut timings = Timings::default();
        let t = Instant::now();
        let placed = place_balls(&e.density, &e.nu_sq, a, &config.domain, config.seed);
        timings.placement = t.elapsed().as_secs_f64();
        let balls = match placed {
            Ok(b) => b,
            Err(err @ (Error::PackingInfeasible { .. } | Error::Realizability(_))) => {
                rows.push(failed_row(
                    a,
                    0,
                    "packing_infeasible",
                    err.to_string(),
                    timings,
                ));
                continue;
            }
            Err(err) => return Err(err.into()),
        };
        if config.write_balls {
            balls_csv(&balls, &config.domain)?.write(&out.join(format!("balls_{idx}.csv")))?;
        }
        if let Some(p) = config
            .probes
            .iter()
            .find(|&&p| balls.ball_containing(p).is_some())
        {
            let msg = format!("probe {:?} lies inside a ball", p.0);
            rows.push(failed_row(
                a,
                balls.len(),
                "probe_inside_ball",
                msg,
                timings,
            ));
            continue;
        }
        rows.push(discrete_row(
            &balls,
            u0,
            green.as_ref(),
            config,
            &reference,
            &options,
            timings,
        )?);
    }

    let verdict = verdict(&rows);
    let mut csv = Csv::new(config, &["radius", "balls", "error", "status"])?;
    for r in &rows {
        csv.row(&[
            num(r.radius),
            r.balls.to_string(),
            r.error.map(num).unwrap_or_default(),
            r.status.clone(),
        ]);
    }
    csv.write(&out.join(CONVERGENCE_FILE))?;
    write_json(
        &out.join(REPORT_FILE),
        &ReportFile {
            config,
            effective_solve: solved.effective.report(),
            rows: &rows,
            verdict: &verdict,
        },
    )?;
    Ok((rows, verdict))
}

fn failed_row(
    radius: f64,
    balls: usize,
    status: &str,
    message: String,
    timings: Timings,
) -> ConvergenceRow {
    ConvergenceRow {
        radius,
        balls,
        error: None,
        status: status.to_string(),
        message: Some(message),
        timings,
        solve: None,
    }
}

fn discrete_row(
    balls: &BallConfig,
    u0: &dyn FieldEvaluator,
    green: &dyn GreenFunction,
    config: &RunConfig,
    reference: &[Complex64],
    options: &refract_core::linalg::SolverOptions,
    mut timings: Timings,
) -> Result<ConvergenceRow, CliError> {
    if balls.is_empty() {
        // Nothing scatters: the discrete field is the background field.
        let error = config
            .probes
            .iter()
            .zip(reference)
            .map(|(&p, r)| (u0.eval(p) - r).norm())
            .fold(0.0, f64::max);
        return Ok(ConvergenceRow {
            radius: balls.radius(),
            balls: 0,
            error: Some(error),
            status: "ok".into(),
            message: None,
            timings,
            solve: None,
        });
    }
    let t = Instant::now();
    let system = assemble_foldy(balls, u0, green, FoldyOptions::default())?;
    timings.assembly = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let solution = solve_discrete(&system, options)?;
    timings.solve = t.elapsed().as_secs_f64();
    drop(system);
    let t = Instant::now();
    let mut error = 0.0f64;
    for (&p, r) in config.probes.iter().zip(reference) {
        let u = evaluate_discrete_field(balls, &solution.values, u0, green, p)?;
        error = error.max((u - r).norm());
    }
    timings.evaluation = t.elapsed().as_secs_f64();
    Ok(ConvergenceRow {
        radius: balls.radius(),
        balls: balls.len(),
        error: Some(error),
        status: "ok".into(),
        message: None,
        timings,
        solve: Some(solution.report),
    })
}

#[derive(Serialize)]
struct GreensLevel {
    cells: [usize; 3],
    sup_norm: f64,
    near_diagonal_samples: [[f64; 2]; 3],
    near_diagonal_limit: [f64; 2],
    relative_deviation: f64,
    solve: SolveReport,
}

#[derive(Serialize)]
struct GreensFile<'a> {
    config: &'a RunConfig,
    levels: &'a [GreensLevel],
    /// `(max − min)/min` of the weighted norm across levels.
    sup_norm_spread: f64,
}

/// Default targets: the centers of a 5×5×5 subdivision of the domain.
fn lattice_targets(config: &RunConfig) -> Vec<Vec3> {
    let lo = config.domain.lo();
    let e = config.domain.extent();
    let mut pts = Vec::with_capacity(125);
    for k in 0..5 {
        for j in 0..5 {
            for i in 0..5 {
                let t = |n: usize, ax: usize| lo[ax] + (n as f64 + 0.5) / 5.0 * e[ax];
                pts.push(Vec3::new(t(i, 0), t(j, 1), t(k, 2)));
            }
        }
    }
    pts
}

/// Solves for `G(·, y)` on each configured grid and records the weighted
/// norm `sup |x − y| |G|` and the extrapolated near-diagonal limit.
pub fn cmd_probe_greens(config: &RunConfig, out: &Path) -> Result<String, CliError> {
    let probe = config.greens()?;
    let y = probe.source;
    if !config.domain.contains(y) {
        return Err(CliError::Config(
            "field `greens.source`: must lie in the domain".into(),
        ));
    }
    let grids: Vec<GridSpec> = if probe.grids.is_empty() {
        vec![config.grid]
    } else {
        probe.grids.clone()
    };
    let mut targets = if probe.targets.is_empty() {
        lattice_targets(config)
    } else {
        probe.targets.clone()
    };
    let len = probe.direction.norm();
    if !(len > 0.0) || !(probe.distance > 0.0) {
        return Err(CliError::Config(
            "field `greens`: direction and distance must be nonzero".into(),
        ));
    }
    let unit = probe.direction * (1.0 / len);
    targets.extend([1.0, 0.5, 0.25].map(|s| y + unit * (probe.distance * s)));
    targets.retain(|&x| x != y);

    let n0 = config.background();
    let options = config.options();
    let mut levels = Vec::new();
    for spec in grids {
        let grid = config.grid_for(spec)?;
        let solver = GreensSolver::new(&n0, config.wave.k, &grid, &options)?;
        let field = solver.solve(GreenSource::Point(y))?;
        let pairs = targets
            .iter()
            .map(|&x| Ok((x, y, field.eval(x)?)))
            .collect::<Result<Vec<_>, Error>>()?;
        let near = near_diagonal_limit(&field, unit, probe.distance)?;
        levels.push(GreensLevel {
            cells: grid.cells_per_axis(),
            sup_norm: weighted_sup_norm(&pairs)?,
            near_diagonal_samples: near.samples.map(complex_pair),
            near_diagonal_limit: complex_pair(near.limit),
            relative_deviation: near.relative_deviation,
            solve: field.report().clone(),
        });
    }
    let norms: Vec<f64> = levels.iter().map(|l| l.sup_norm).collect();
    let max = norms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = norms.iter().cloned().fold(f64::INFINITY, f64::min);
    let sup_norm_spread = (max - min) / min;
    write_json(
        &out.join(GREENS_FILE),
        &GreensFile {
            config,
            levels: &levels,
            sup_norm_spread,
        },
    )?;
    let last = levels.last().expect("at least one level");
    Ok(format!(
        "near-diagonal limit deviates {:.3e} from 1/(4π); weighted norm spread {:.3e}",
        last.relative_deviation, sup_norm_spread
    ))
}
