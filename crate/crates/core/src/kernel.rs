//! Free-space Helmholtz kernel and the exact ball integrals used to tame its
//! singularity.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::{ball_volume, Cell, Error, Result, Vec3};

const FOUR_PI: f64 = 4.0 * PI;

/// Below this `k·a` the self integral is summed as a power series to avoid
/// cancellation in the closed form.
const SERIES_THRESHOLD: f64 = 0.5;

/// `exp(i k |x − y|) / (4π |x − y|)`.
pub fn free_space_kernel(x: Vec3, y: Vec3, k: f64) -> Result<Complex64> {
    let r = x.distance(y);
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(kernel_at_distance(r, k))
}

/// Free-space kernel as a function of the distance `r > 0`.
#[inline]
pub fn kernel_at_distance(r: f64, k: f64) -> Complex64 {
    Complex64::new(0.0, k * r).exp() / (FOUR_PI * r)
}

/// Smooth part `(exp(i k r) − 1) / (4π r)` of the kernel, continuous at
/// `r = 0` where it equals `i k / 4π`.
#[inline]
pub fn smooth_kernel_part(r: f64, k: f64) -> Complex64 {
    let kr = k * r;
    if kr < 1e-4 {
        // (e^{ikr} - 1)/r = ik - k²r/2 - i k³r²/6 + ...
        return Complex64::new(-k * kr / 2.0, k - k * kr * kr / 6.0) / FOUR_PI;
    }
    (Complex64::new(0.0, kr).exp() - 1.0) / (FOUR_PI * r)
}

/// Newtonian potential `∫_{|y − center| ≤ a} |x − y|⁻¹ dy` of a uniform ball.
///
/// Outside the ball this is the point-mass value `V_a / |x − center|`; inside
/// it is `2π (a² − |x − center|² / 3)`. Both branches give `4πa²/3` on the
/// sphere.
pub fn ball_potential(x: Vec3, center: Vec3, a: f64) -> f64 {
    let r = x.distance(center);
    if r >= a {
        ball_volume(a) / r
    } else {
        2.0 * PI * (a * a - r * r / 3.0)
    }
}

/// `∫_{|y| ≤ a} g(0, y) dy = ∫₀^a r e^{ikr} dr = (e^{ika}(1 − ika) − 1)/k²`,
/// with the analytic limit `a²/2` at `k = 0`.
pub fn ball_self_integral(a: f64, k: f64) -> Complex64 {
    let ka = k * a;
    if ka < SERIES_THRESHOLD {
        // a² Σ_n (ika)^n / (n! (n + 2))
        let ika = Complex64::new(0.0, ka);
        let mut power = Complex64::new(1.0, 0.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..40 {
            let term = power / (n as f64 + 2.0);
            sum += term;
            if term.norm() <= 1e-18 * sum.norm() {
                break;
            }
            power = power * ika / (n as f64 + 1.0);
        }
        return sum * (a * a);
    }
    let e = Complex64::new(0.0, ka).exp();
    (e * Complex64::new(1.0, -ka) - 1.0) / (k * k)
}

/// Approximation of `∫_cell g(x, y) dy`.
///
/// Far from the cell (outside its bounding sphere) this is the midpoint rule.
/// At the cell center the cell is replaced by the ball of equal volume and the
/// exact [`ball_self_integral`] is used. In between, the static part
/// `1/(4π r)` is integrated exactly over that equivalent ball via
/// [`ball_potential`] and the smooth remainder by the midpoint rule. The three
/// cases agree at the bounding sphere.
pub fn cell_kernel_integral(x: Vec3, cell: &Cell, k: f64) -> Complex64 {
    let vol = cell.volume();
    let r = x.distance(cell.center);
    if r > cell.bounding_radius() {
        return kernel_at_distance(r, k) * vol;
    }
    let a_eq = cell.equivalent_radius();
    if r <= 1e-12 * a_eq {
        return ball_self_integral(a_eq, k);
    }
    let static_part = ball_potential(x, cell.center, a_eq) / FOUR_PI;
    smooth_kernel_part(r, k) * vol + static_part
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_points_error() {
        let p = Vec3::new(0.1, 0.2, 0.3);
        assert!(matches!(
            free_space_kernel(p, p, 1.0),
            Err(Error::CoincidentPoints)
        ));
    }

    #[test]
    fn static_limit_at_unit_distance() {
        let g = free_space_kernel(Vec3::ZERO, Vec3::new(0.0, 1.0, 0.0), 0.0).unwrap();
        assert!((g.re - 0.079_577_471_5).abs() < 1e-10);
        assert_eq!(g.im, 0.0);
    }

    #[test]
    fn half_wave_distance() {
        let g = free_space_kernel(Vec3::ZERO, Vec3::new(PI, 0.0, 0.0), 1.0).unwrap();
        assert!((g.re + 1.0 / (4.0 * PI * PI)).abs() < 1e-15);
        assert!((g.re + 0.025_330_3).abs() < 1e-7);
        assert!(g.im.abs() < 1e-17);
    }

    #[test]
    fn ball_potential_reference_values() {
        let a = 0.3;
        let c = Vec3::new(1.0, -2.0, 0.5);
        assert!((ball_potential(c, c, a) - 2.0 * PI * a * a).abs() < 1e-15);
        let two_a = c + Vec3::new(0.0, 2.0 * a, 0.0);
        assert!((ball_potential(two_a, c, a) - 2.0 * PI * a * a / 3.0).abs() < 1e-15);
        let on = c + Vec3::new(a, 0.0, 0.0);
        let interior = 2.0 * PI * (a * a - a * a / 3.0);
        assert!((ball_potential(on, c, a) - 4.0 * PI * a * a / 3.0).abs() < 1e-15);
        assert!((interior - ball_volume(a) / a).abs() < 1e-15);
    }

    #[test]
    fn self_integral_static_limit() {
        for a in [1e-3, 0.1, 2.0] {
            let s = ball_self_integral(a, 0.0);
            assert_eq!(s, Complex64::new(a * a / 2.0, 0.0));
            let potential = ball_potential(Vec3::ZERO, Vec3::ZERO, a) / FOUR_PI;
            assert!((s.re - potential).abs() < 1e-15 * potential);
        }
    }

    #[test]
    fn self_integral_series_meets_closed_form() {
        // Both evaluation routes near the switch point.
        let k = 1.0;
        for a in [0.45, 0.499_999, 0.5, 0.6] {
            let series = {
                let ika = Complex64::new(0.0, k * a);
                let mut p = Complex64::new(1.0, 0.0);
                let mut s = Complex64::new(0.0, 0.0);
                for n in 0..60 {
                    s += p / (n as f64 + 2.0);
                    p = p * ika / (n as f64 + 1.0);
                }
                s * a * a
            };
            let closed =
                (Complex64::new(0.0, k * a).exp() * Complex64::new(1.0, -k * a) - 1.0) / (k * k);
            let got = ball_self_integral(a, k);
            assert!((got - series).norm() < 1e-14 * series.norm());
            assert!((got - closed).norm() < 1e-13 * closed.norm());
        }
    }

    #[test]
    fn cell_integral_cases_are_continuous() {
        let cell = Cell {
            center: Vec3::new(0.5, 0.5, 0.5),
            half: Vec3::new(0.05, 0.05, 0.05),
        };
        let k = 2.0;
        let rb = cell.bounding_radius();
        let inside = cell.center + Vec3::new(rb * (1.0 - 1e-12), 0.0, 0.0);
        let outside = cell.center + Vec3::new(rb * (1.0 + 1e-12), 0.0, 0.0);
        let a = cell_kernel_integral(inside, &cell, k);
        let b = cell_kernel_integral(outside, &cell, k);
        assert!((a - b).norm() < 1e-9 * b.norm());

        let at_center = cell_kernel_integral(cell.center, &cell, k);
        let a_eq = cell.equivalent_radius();
        assert_eq!(at_center, ball_self_integral(a_eq, k));
        let nearly = cell_kernel_integral(cell.center + Vec3::new(1e-7, 0.0, 0.0), &cell, k);
        // The midpoint rule drops the k² a⁴/8 term of the smooth part.
        let gap = (nearly - at_center).norm() / at_center.norm();
        assert!(gap < 0.5 * (k * a_eq).powi(2), "{gap}");
    }

    #[test]
    fn smooth_part_series_branch() {
        for r in [1e-6, 5e-5, 2e-4, 1e-2] {
            let k = 1.0;
            let direct = (Complex64::new(0.0, k * r).exp() - 1.0) / (FOUR_PI * r);
            assert!((smooth_kernel_part(r, k) - direct).norm() < 1e-10);
        }
    }
}
