use num_complex::Complex64;
use refract_core::designer::{
    design, propose_design, realizability_check, verify_design, Strategy, CHECK_ABSORPTION,
    CHECK_PACKING,
};
use refract_core::linalg::SolverOptions;
use refract_core::profile::Piece;
use refract_core::solvers::{solve_background, solve_effective, EffectiveMode};
use refract_core::{
    DensityProfile, Domain, FieldExpr, Grid, IncidentWave, RefractionProfile, Region, Vec3,
};

fn cube() -> Domain {
    Domain::unit_cube()
}

fn grid(n: usize) -> Grid {
    Grid::cubic(cube(), n).unwrap()
}

fn constant(v: impl Into<Complex64>) -> RefractionProfile {
    RefractionProfile::constant(cube(), v)
}

/// `inside` on the left half of the cube, `outside` elsewhere.
fn piecewise(inside: Complex64, outside: Complex64) -> RefractionProfile {
    let left = Region::Box {
        lo: Vec3::ZERO,
        hi: Vec3::new(0.5, 1.0, 1.0),
    };
    let expr = FieldExpr::Piecewise {
        pieces: vec![Piece {
            region: left,
            value: FieldExpr::constant(inside),
        }],
        otherwise: Box::new(FieldExpr::constant(outside)),
    };
    RefractionProfile::new(cube(), expr)
}

#[test]
fn fixed_density_splits_constant_contrast() {
    let g = grid(4);
    let r = design(
        &constant(2.0),
        &constant(1.0),
        Strategy::FixedDensity { density: 0.5 },
        &g,
    )
    .unwrap();
    for i in 0..g.len() {
        let x = g.center(i);
        assert_eq!(r.nu_sq.value(x), Complex64::new(2.0, 0.0));
        assert_eq!(r.density.value(x), 0.5);
    }
    assert!(r.all_passed());
    assert_eq!(verify_design(&r, &constant(1.0), &constant(2.0), &g), 0.0);
}

#[test]
fn absorbing_target_gives_absorbing_balls() {
    let g = grid(4);
    let n = constant(Complex64::new(1.0, 0.2));
    let r = design(
        &n,
        &constant(1.0),
        Strategy::FixedDensity { density: 0.1 },
        &g,
    )
    .unwrap();
    let nu = r.nu_sq.value(g.center(0));
    assert!((nu - Complex64::new(0.0, 2.0)).norm() <= 1e-15, "{nu}");
    assert!(r.all_passed());
    assert!(verify_design(&r, &constant(1.0), &n, &g) <= 1e-14);
}

#[test]
fn zero_contrast_needs_no_coefficient() {
    let g = grid(4);
    let n0 = RefractionProfile::new(
        cube(),
        FieldExpr::bump(Vec3::new(0.5, 0.5, 0.5), 0.4, 1.0, 0.3),
    );
    let r = design(&n0, &n0, Strategy::FixedDensity { density: 0.2 }, &g).unwrap();
    for i in 0..g.len() {
        assert_eq!(r.nu_sq.value(g.center(i)), Complex64::new(0.0, 0.0));
    }
    assert!(r.all_passed());
    let z = design(&n0, &n0, Strategy::ZeroWhereEqual { density: 0.2 }, &g).unwrap();
    for i in 0..g.len() {
        assert_eq!(z.density.value(g.center(i)), 0.0);
    }
}

#[test]
fn absorptive_background_fails_realizability() {
    let g = grid(4);
    let err = design(
        &constant(1.0),
        &constant(Complex64::new(1.0, 0.1)),
        Strategy::FixedDensity { density: 0.1 },
        &g,
    )
    .unwrap_err();
    assert!(
        matches!(err, refract_core::Error::Realizability(_)),
        "{err}"
    );
    let r = propose_design(
        &constant(1.0),
        &constant(Complex64::new(1.0, 0.1)),
        Strategy::FixedDensity { density: 0.1 },
        &g,
    )
    .unwrap();
    let failed: Vec<_> = r
        .diagnostics
        .iter()
        .filter(|d| !d.passed)
        .map(|d| d.check.as_str())
        .collect();
    assert_eq!(failed, [CHECK_ABSORPTION]);
}

#[test]
fn overpacked_density_fails() {
    let g = grid(4);
    let err = design(
        &constant(2.0),
        &constant(1.0),
        Strategy::FixedDensity { density: 0.6 },
        &g,
    )
    .unwrap_err();
    assert!(
        matches!(err, refract_core::Error::PackingInfeasible { .. }),
        "{err}"
    );
    let r = propose_design(
        &constant(2.0),
        &constant(1.0),
        Strategy::FixedDensity { density: 0.6 },
        &g,
    )
    .unwrap();
    let packing = r
        .diagnostics
        .iter()
        .find(|d| d.check == CHECK_PACKING)
        .unwrap();
    assert!(!packing.passed);
    assert_eq!(packing.value, 0.6);
    assert_eq!(realizability_check(&r, &g), r.diagnostics);
}

#[test]
fn zero_density_is_rejected() {
    let err = design(
        &constant(2.0),
        &constant(1.0),
        Strategy::FixedDensity { density: 0.0 },
        &grid(2),
    )
    .unwrap_err();
    assert!(
        matches!(err, refract_core::Error::InvalidArgument(_)),
        "{err}"
    );
}

#[test]
fn fixed_coefficient_density_must_be_real() {
    let g = grid(4);
    let nu = Complex64::new(2.0, 0.0);
    let r = design(
        &constant(1.5),
        &constant(1.0),
        Strategy::FixedNuSquared { nu_sq: nu },
        &g,
    )
    .unwrap();
    assert!((r.density.value(g.center(0)) - 0.25).abs() < 1e-15);
    assert!(r.all_passed());
    let bad = propose_design(
        &constant(Complex64::new(1.5, 0.3)),
        &constant(1.0),
        Strategy::FixedNuSquared { nu_sq: nu },
        &g,
    )
    .unwrap();
    assert!(!bad.all_passed());
}

#[test]
fn perturbed_density_error_is_linear() {
    let g = grid(4);
    let (n, n0) = (
        piecewise(Complex64::new(2.0, 0.1), Complex64::new(1.5, 0.0)),
        constant(1.0),
    );
    let mut r = design(&n, &n0, Strategy::FixedDensity { density: 0.3 }, &g).unwrap();
    r.density = DensityProfile::new(
        cube(),
        r.density.expr().clone().times(FieldExpr::constant(1.01)),
    );
    let max_contrast = Complex64::new(1.0, 0.1).norm();
    let err = verify_design(&r, &n0, &n, &g);
    assert!((err - 0.01 * max_contrast).abs() <= 1e-15, "{err}");
}

#[test]
fn strategies_agree_on_the_product() {
    let g = grid(6);
    let n0 = constant(1.0);
    let n = piecewise(Complex64::new(1.8, 0.05), Complex64::new(1.0, 0.0));
    let a = design(&n, &n0, Strategy::FixedDensity { density: 0.1 }, &g).unwrap();
    let b = design(&n, &n0, Strategy::FixedDensity { density: 0.4 }, &g).unwrap();
    let z = design(&n, &n0, Strategy::ZeroWhereEqual { density: 0.4 }, &g).unwrap();
    for i in 0..g.len() {
        let x = g.center(i);
        assert!((a.product(x) - b.product(x)).norm() <= 1e-15);
        assert!((a.product(x) - z.product(x)).norm() <= 1e-15);
        if x[0] > 0.5 {
            assert_eq!(z.density.value(x), 0.0);
        }
    }
    for r in [&a, &b, &z] {
        assert!(r.all_passed());
        assert!(verify_design(r, &n0, &n, &g) <= 1e-14);
    }
}

#[test]
fn designed_embedding_reproduces_target_field() {
    let g = grid(8);
    let n0 = RefractionProfile::new(
        cube(),
        FieldExpr::bump(Vec3::new(0.5, 0.5, 0.5), 0.45, 1.0, 0.3),
    );
    let n = RefractionProfile::new(
        cube(),
        FieldExpr::Sum {
            terms: vec![
                n0.expr().clone(),
                FieldExpr::bump(
                    Vec3::new(0.4, 0.55, 0.5),
                    0.35,
                    0.0,
                    Complex64::new(0.4, 0.05),
                ),
            ],
        },
    );
    let r = design(&n, &n0, Strategy::FixedDensity { density: 0.2 }, &g).unwrap();
    assert!(r.all_passed());
    let w = IncidentWave::towards(1.0, Vec3::new(0.0, 0.6, 0.8)).unwrap();
    let opts = SolverOptions::default();
    let u0 = solve_background(&n0, &w, &g, &opts).unwrap();
    let ue = solve_effective(
        &u0,
        &n0,
        &r.density,
        &r.nu_sq,
        &g,
        &opts,
        EffectiveMode::SingleKernel,
    )
    .unwrap();
    let direct = solve_background(&n, &w, &g, &opts).unwrap();
    let d = ue.field().relative_max_difference(direct.field()).unwrap();
    assert!(d <= 1e-12, "{d}");
}
