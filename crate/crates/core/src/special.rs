//! Complex log-gamma and digamma on the principal branch.
//!
//! Both use upward recurrence until `|z| >= 10` with `Re z >= 0`, followed by
//! the Stirling series. The principal branch of `ln Γ` is analytic off the
//! negative real axis, so the result is continuous along any vertical line
//! with positive real part; this is what keeps the theta phase continuous.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const STIRLING_RADIUS: f64 = 10.0;

fn check_pole(z: Complex64) -> Result<()> {
    let k = z.re.round();
    if k <= 0.0 && (z - Complex64::new(k, 0.0)).norm() < 1e-8 {
        return Err(Error::NearPole(z));
    }
    Ok(())
}

/// Principal branch of `ln Γ(z)`.
pub fn ln_gamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.0 || w.norm() < STIRLING_RADIUS {
        shift += w.ln();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut power = inv;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let m = 2.0 * (k as f64 + 1.0);
        series += power * (b / (m * (m - 1.0)));
        power *= inv2;
    }
    Ok((w - 0.5) * w.ln() - w + LN_SQRT_2PI + series - shift)
}

/// Digamma `ψ(z) = Γ'(z)/Γ(z)`.
pub fn digamma(z: Complex64) -> Result<Complex64> {
    check_pole(z)?;
    let mut w = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while w.re < 0.0 || w.norm() < STIRLING_RADIUS {
        shift += w.inv();
        w += 1.0;
    }
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut power = inv2;
    let mut series = Complex64::new(0.0, 0.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let m = 2.0 * (k as f64 + 1.0);
        series += power * (b / m);
        power *= inv2;
    }
    Ok(w.ln() - 0.5 * inv - series - shift)
}

/// Real `ln Γ(x)` for `x > 0`.
pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0))
        .map(|v| v.re)
        .unwrap_or(f64::INFINITY)
}

/// Reduce an angle to `(-π, π]`.
pub fn wrap_phase(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn real_values() {
        assert_relative_eq!(ln_gamma(c(1.0, 0.0)).unwrap().re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(ln_gamma(c(2.0, 0.0)).unwrap().re, 0.0, epsilon = 1e-15);
        assert_relative_eq!(
            ln_gamma(c(0.5, 0.0)).unwrap().re,
            PI.sqrt().ln(),
            epsilon = 1e-14
        );
        // Γ(10) = 9!
        assert_relative_eq!(
            ln_gamma(c(10.0, 0.0)).unwrap().re,
            362880f64.ln(),
            max_relative = 1e-15
        );
        assert_relative_eq!(ln_gamma_real(0.1), 2.252_712_651_734_206, epsilon = 1e-14);
    }

    #[test]
    fn negative_real_axis_uses_principal_branch() {
        // Γ(-1/2) = -2√π, so the principal log has imaginary part ±π.
        let v = ln_gamma(c(-0.5, 1e-300)).unwrap();
        assert_relative_eq!(v.re, (2.0 * PI.sqrt()).ln(), epsilon = 1e-14);
        assert_relative_eq!(v.im.abs(), PI, epsilon = 1e-12);
    }

    #[test]
    fn complex_reference_values() {
        // mpmath.loggamma(0.25+50j)
        let v = ln_gamma(c(0.25, 50.0)).unwrap();
        assert_relative_eq!(v.re, -78.598_880_432_701_84, max_relative = 1e-13);
        assert_relative_eq!(v.im, 145.208_659_524_257_2, max_relative = 1e-13);
        // mpmath.loggamma(3+4j)
        let v = ln_gamma(c(3.0, 4.0)).unwrap();
        assert_relative_eq!(v.re, -1.756_626_784_603_784, max_relative = 1e-13);
        assert_relative_eq!(v.im, 4.742_664_438_034_658, max_relative = 1e-13);
    }

    #[test]
    fn recurrence_holds_along_vertical_line() {
        for k in 0..50 {
            let z = c(0.3, -40.0 + 2.0 * k as f64);
            let lhs = ln_gamma(z + 1.0).unwrap();
            let rhs = ln_gamma(z).unwrap() + z.ln();
            assert!((lhs - rhs).norm() < 1e-12, "{z}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn digamma_values() {
        assert_relative_eq!(digamma(c(1.0, 0.0)).unwrap().re, -EULER_GAMMA, epsilon = 1e-15);
        assert_relative_eq!(
            digamma(c(0.5, 0.0)).unwrap().re,
            -EULER_GAMMA - 2.0 * 2f64.ln(),
            epsilon = 1e-14
        );
        // Finite difference of ln Γ.
        let z = c(0.75, 12.5);
        let h = 1e-5;
        let fd = (ln_gamma(z + h).unwrap() - ln_gamma(z - h).unwrap()) / (2.0 * h);
        assert!((digamma(z).unwrap() - fd).norm() < 1e-8);
    }

    #[test]
    fn poles_are_rejected() {
        assert!(matches!(ln_gamma(c(0.0, 0.0)), Err(Error::NearPole(_))));
        assert!(matches!(ln_gamma(c(-3.0, 1e-10)), Err(Error::NearPole(_))));
        assert!(ln_gamma(c(-3.0, 1e-6)).is_ok());
        assert!(matches!(digamma(c(-1.0, 0.0)), Err(Error::NearPole(_))));
    }

    #[test]
    fn wrap_phase_range() {
        assert_relative_eq!(wrap_phase(3.0 * PI), PI, epsilon = 1e-12);
        assert_relative_eq!(wrap_phase(-0.5), -0.5);
        assert_relative_eq!(wrap_phase(7.0), 7.0 - 2.0 * PI, epsilon = 1e-12);
    }
}
