mod common;

use std::f64::consts::PI;

use common::{ball_potential_quadrature, box_integral, rel, volume_potential, SphericalRule};
use num_complex::Complex64;
use refract_core::kernel::{
    ball_potential, ball_self_integral, cell_kernel_integral, free_space_kernel,
};
use refract_core::{ball_volume, Cell, Domain, Grid, Vec3};

#[test]
fn self_integral_matches_radial_quadrature() {
    let rule = SphericalRule {
        polar: 8,
        azimuth: 8,
        radial: 40,
    };
    for (a, k) in [(0.01, 1.0), (0.05, 1.0), (0.3, 2.0), (1.0, 3.0), (0.2, 0.0)] {
        let c = Vec3::new(0.1, 0.2, 0.3);
        let oracle = ball_potential_quadrature(c, c, a, k, rule);
        let got = ball_self_integral(a, k);
        assert!(
            rel(got, oracle) < 1e-12,
            "a = {a}, k = {k}: {got} vs {oracle}"
        );
    }
}

#[test]
fn self_integral_static_limit() {
    let a = 0.07;
    let limit = a * a / 2.0;
    let mut prev = f64::INFINITY;
    for k in [1.0, 0.1, 0.01, 1e-3] {
        let gap = (ball_self_integral(a, k) - limit).norm();
        assert!(gap < prev);
        prev = gap;
    }
    // Leading correction is i k a³/3, relative size 2ka/3.
    assert!(prev < 1.01 * (2.0 / 3.0) * 1e-3 * a * limit);
}

#[test]
fn off_center_ball_potential_static() {
    // For k = 0 the quadrature reproduces the interior branch at any point.
    let rule = SphericalRule {
        polar: 48,
        azimuth: 48,
        radial: 8,
    };
    let (c, a) = (Vec3::new(0.0, 0.0, 0.0), 0.4);
    for x in [
        Vec3::new(0.1, 0.0, 0.0),
        Vec3::new(0.2, -0.1, 0.15),
        Vec3::new(0.0, 0.39, 0.0),
    ] {
        let oracle = ball_potential_quadrature(x, c, a, 0.0, rule).re;
        let got = ball_potential(x, c, a) / (4.0 * PI);
        assert!(
            (got - oracle).abs() < 1e-6 * oracle,
            "{x:?}: {got} vs {oracle}"
        );
    }
}

#[test]
fn far_cell_integral_is_midpoint_accurate() {
    let cell = Cell {
        center: Vec3::new(0.5, 0.5, 0.5),
        half: Vec3::new(0.05, 0.05, 0.05),
    };
    let lo = cell.center - cell.half;
    let hi = cell.center + cell.half;
    for x in [
        Vec3::new(0.8, 0.5, 0.5),
        Vec3::new(1.5, 2.0, -0.3),
        Vec3::new(0.62, 0.62, 0.62),
    ] {
        let oracle = box_integral(x, lo, hi, 1.0, 12);
        let got = cell_kernel_integral(x, &cell, 1.0);
        assert!(rel(got, oracle) < 1e-3, "{x:?}: rel {}", rel(got, oracle));
    }
}

#[test]
fn cell_sum_approximates_domain_potential() {
    let domain = Domain::unit_cube();
    let grid = Grid::cubic(domain, 16).unwrap();
    let k = 1.0;
    for x in [
        grid.center(grid.linear_index([8, 8, 8])),
        grid.center(grid.linear_index([2, 5, 11])),
    ] {
        let sum: Complex64 = (0..grid.len())
            .map(|j| cell_kernel_integral(x, &grid.cell(j), k))
            .sum();
        let oracle = volume_potential(
            x,
            k,
            &domain,
            |_| Complex64::new(1.0, 0.0),
            SphericalRule::default(),
        );
        assert!(rel(sum, oracle) < 0.02, "{x:?}: rel {}", rel(sum, oracle));
    }
}

#[test]
fn kernel_reference_values() {
    let g = free_space_kernel(Vec3::ZERO, Vec3::new(0.0, 0.0, 2.0), 0.5).unwrap();
    let expected = Complex64::new(0.0, 1.0).exp() / (8.0 * PI);
    assert!((g - expected).norm() < 1e-16);
    let va = ball_volume(0.5);
    assert!((va - PI / 6.0).abs() < 1e-16);
}
