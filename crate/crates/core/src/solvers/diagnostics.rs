use num_complex::Complex64;

use super::GreensField;
use crate::{Error, Result, Vec3};

/// `max |x − y| · |G(x, y)|` over sampled pairs `(x, y, G(x, y))`.
pub fn weighted_sup_norm(samples: &[(Vec3, Vec3, Complex64)]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid(
            "weighted norm needs at least one sample pair",
        ));
    }
    let mut best = 0.0f64;
    for (x, y, g) in samples {
        let r = x.distance(*y);
        if r == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        best = best.max(r * g.norm());
    }
    Ok(best)
}

/// Limit at `d → 0` of samples `f(d), f(d/2), f(d/4)` assuming
/// `f(d) = L + c₁ d + c₂ d² + O(d³)`.
pub fn richardson_limit(f_d: Complex64, f_half: Complex64, f_quarter: Complex64) -> Complex64 {
    (f_quarter * 8.0 - f_half * 6.0 + f_d) / 3.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearDiagonalEstimate {
    /// `|x − y| G(x, y)` at distances `d, d/2, d/4`.
    pub samples: [Complex64; 3],
    pub limit: Complex64,
    /// `|limit − 1/(4π)| · 4π`.
    pub relative_deviation: f64,
}

/// Extrapolates `|x − y| G(x, y)` to `x → y` along `direction`.
pub fn near_diagonal_limit(
    green: &GreensField,
    direction: Vec3,
    d: f64,
) -> Result<NearDiagonalEstimate> {
    let y = match green.source() {
        super::GreenSource::Point(y) => y,
        super::GreenSource::Cell(_) => {
            return Err(Error::invalid("near-diagonal limit needs a point source"));
        }
    };
    let len = direction.norm();
    if !(len > 0.0) || !(d > 0.0) {
        return Err(Error::invalid("direction and distance must be nonzero"));
    }
    let unit = direction * (1.0 / len);
    let mut samples = [Complex64::new(0.0, 0.0); 3];
    for (s, scale) in samples.iter_mut().zip([1.0, 0.5, 0.25]) {
        let dist = d * scale;
        *s = green.eval(y + unit * dist)? * dist;
    }
    let limit = richardson_limit(samples[0], samples[1], samples[2]);
    let target = 1.0 / (4.0 * core::f64::consts::PI);
    Ok(NearDiagonalEstimate {
        samples,
        limit,
        relative_deviation: (limit - target).norm() / target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::free_space_kernel;

    #[test]
    fn free_space_norm() {
        let mut s = alloc::vec::Vec::new();
        for i in 1..20 {
            let x = Vec3::new(0.1 * i as f64, 0.3, -0.2);
            let y = Vec3::new(0.0, 0.1 * i as f64, 0.5);
            let g = free_space_kernel(x, y, 1.7).unwrap();
            s.push((x, y, g));
        }
        let n = weighted_sup_norm(&s).unwrap();
        assert!((n - 1.0 / (4.0 * core::f64::consts::PI)).abs() < 1e-16);
        let doubled: alloc::vec::Vec<_> = s.iter().map(|(x, y, g)| (*x, *y, g * 2.0)).collect();
        let n2 = weighted_sup_norm(&doubled).unwrap();
        assert!((n2 - 1.0 / (2.0 * core::f64::consts::PI)).abs() < 1e-16);
    }

    #[test]
    fn empty_samples() {
        assert!(weighted_sup_norm(&[]).is_err());
    }

    #[test]
    fn richardson_is_exact_for_quadratics() {
        let f = |d: f64| Complex64::new(0.5 + 2.0 * d - 3.0 * d * d, -d);
        let l = richardson_limit(f(0.1), f(0.05), f(0.025));
        assert!((l - Complex64::new(0.5, 0.0)).norm() < 1e-14);
    }
}
