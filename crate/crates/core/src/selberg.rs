//! Functional-equation data of a Selberg-class function and its invariants.
//!
//! A function `F` is completed as `Φ(s) = Q^s ∏ Γ(λ_j s + μ_j) F(s) = γ(s) F(s)`
//! with `Φ(s) = ω Φ̄(1 - s)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaFactor {
    pub lambda: f64,
    pub mu: Complex64,
}

impl GammaFactor {
    pub fn new(lambda: f64, mu: Complex64) -> Self {
        Self { lambda, mu }
    }

    pub fn real(lambda: f64, mu: f64) -> Self {
        Self::new(lambda, Complex64::new(mu, 0.0))
    }
}

/// Archimedean data `(Q, {(λ_j, μ_j)}, ω)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFactorSpec {
    pub q_scale: f64,
    pub factors: Vec<GammaFactor>,
    pub omega: Complex64,
}

impl GammaFactorSpec {
    pub fn new(q_scale: f64, factors: Vec<GammaFactor>, omega: Complex64) -> Result<Self> {
        let spec = Self {
            q_scale,
            factors,
            omega,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.q_scale.is_finite() && self.q_scale > 0.0) {
            return Err(Error::InvalidSpec(format!("Q must be positive, got {}", self.q_scale)));
        }
        if self.factors.is_empty() {
            return Err(Error::InvalidSpec("at least one gamma factor is required".into()));
        }
        for (j, f) in self.factors.iter().enumerate() {
            if !(f.lambda.is_finite() && f.lambda > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "lambda_{j} must be positive, got {}",
                    f.lambda
                )));
            }
            if !(f.mu.re >= 0.0 && f.mu.im.is_finite()) {
                return Err(Error::InvalidSpec(format!(
                    "mu_{j} must have nonnegative real part, got {}",
                    f.mu
                )));
            }
        }
        if (self.omega.norm() - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidSpec(format!(
                "|omega| must be 1, got {}",
                self.omega.norm()
            )));
        }
        Ok(())
    }

    pub fn degree(&self) -> f64 {
        2.0 * self.factors.iter().map(|f| f.lambda).sum::<f64>()
    }

    /// Concatenate the gamma data of two functions (their product).
    pub fn product(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        Self {
            q_scale: self.q_scale * other.q_scale,
            factors,
            omega: self.omega * other.omega,
        }
    }
}

/// Invariants derived from [`GammaFactorSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelbergInvariants {
    /// `d = 2 Σ λ_j`
    pub degree: f64,
    /// `ξ = 2 Σ (μ_j - 1/2)`
    pub xi: Complex64,
    /// `q = (2π)^d Q² ∏ λ_j^{2λ_j}`
    pub conductor: f64,
    /// `Q₁ = Q ∏ λ_j^{λ_j} = √q (2π)^{-d/2}`
    pub q1: f64,
    pub omega1: Complex64,
    pub omega1_prime: Complex64,
    /// Principal square root of `1/ω₁′`.
    pub omega2: Complex64,
}

pub fn compute_invariants(spec: &GammaFactorSpec) -> Result<SelbergInvariants> {
    spec.validate()?;
    let degree = spec.degree();
    let xi = spec
        .factors
        .iter()
        .map(|f| 2.0 * (f.mu - 0.5))
        .sum::<Complex64>();

    let ln_lambda_pow: f64 = spec.factors.iter().map(|f| f.lambda * f.lambda.ln()).sum();
    let ln_q1 = spec.q_scale.ln() + ln_lambda_pow;
    let q1 = ln_q1.exp();
    let conductor = (degree * (2.0 * PI).ln() + 2.0 * ln_q1).exp();

    // ∏ λ_j^{-2i Im μ_j}
    let lambda_phase: f64 = spec
        .factors
        .iter()
        .map(|f| -2.0 * f.mu.im * f.lambda.ln())
        .sum();
    let omega1 = spec.omega
        * Complex64::from_polar(1.0, -PI / 2.0 * (degree / 2.0 + xi.re) + xi.im + lambda_phase);
    let omega1_prime =
        spec.omega * Complex64::from_polar(1.0, -PI / 2.0 * (1.0 + xi.re) + lambda_phase);
    let omega2 = omega1_prime.inv().sqrt();

    Ok(SelbergInvariants {
        degree,
        xi,
        conductor,
        q1,
        omega1,
        omega1_prime,
        omega2,
    })
}

/// Principal part of the completed function `Φ = γ F` at `s = 1`:
/// `Φ(s) = Σ_j c_j / (s - 1)^j + holomorphic`, with `coefficients[j-1] = c_j`.
/// The pole at `s = 0` follows from the functional equation. Only orders up to
/// two are supported, which covers `ζ²` and products with one `ζ` factor.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PolarPart {
    pub coefficients: Vec<Complex64>,
}

impl PolarPart {
    pub fn entire() -> Self {
        Self::default()
    }

    pub fn is_entire(&self) -> bool {
        self.coefficients.iter().all(|c| c.norm() == 0.0)
    }

    pub fn order(&self) -> usize {
        self.coefficients
            .iter()
            .rposition(|c| c.norm() != 0.0)
            .map_or(0, |i| i + 1)
    }

    /// Coefficients of the principal part at `s = 0`, `d_j = ω c̄_j (-1)^j`.
    pub fn at_zero(&self, omega: Complex64) -> Vec<Complex64> {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
                omega * c.conj() * sign
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn zeta_type() -> GammaFactorSpec {
        GammaFactorSpec::new(PI.powf(-0.5), vec![GammaFactor::real(0.5, 0.0)], 1.0.into()).unwrap()
    }

    fn dedekind_minus3() -> GammaFactorSpec {
        GammaFactorSpec::new(3f64.sqrt() / (2.0 * PI), vec![GammaFactor::real(1.0, 0.0)], 1.0.into())
            .unwrap()
    }

    fn chi_odd(q: f64) -> GammaFactorSpec {
        GammaFactorSpec::new((q / PI).sqrt(), vec![GammaFactor::real(0.5, 0.5)], 1.0.into()).unwrap()
    }

    #[test]
    fn zeta_invariants() {
        let inv = compute_invariants(&zeta_type()).unwrap();
        assert_eq!(inv.degree, 1.0);
        assert_relative_eq!(inv.xi.re, -1.0);
        assert_eq!(inv.xi.im, 0.0);
        assert_relative_eq!(inv.conductor, 1.0, max_relative = 1e-14);
        // ω₁ = e^{iπ/4} reproduces the classical χ(1/2+it) ~ (t/2π)^{-it} e^{it + iπ/4}.
        assert_relative_eq!(inv.omega1.arg(), PI / 4.0, epsilon = 1e-15);
    }

    #[test]
    fn dedekind_minus3_invariants() {
        let inv = compute_invariants(&dedekind_minus3()).unwrap();
        assert_eq!(inv.degree, 2.0);
        assert_relative_eq!(inv.xi.re, -1.0);
        assert_relative_eq!(inv.conductor, 3.0, max_relative = 1e-14);
        assert_relative_eq!(inv.q1, 3f64.sqrt() / (2.0 * PI), max_relative = 1e-14);
        let from_q = inv.conductor.sqrt() * (2.0 * PI).powf(-inv.degree / 2.0);
        assert_relative_eq!(inv.q1, from_q, max_relative = 1e-12);
        for w in [inv.omega1, inv.omega1_prime, inv.omega2] {
            assert_relative_eq!(w.norm(), 1.0, epsilon = 1e-12);
        }
        assert_relative_eq!((inv.omega2 * inv.omega2 * inv.omega1_prime).re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn conductors_multiply_over_products() {
        let zc3 = compute_invariants(&zeta_type().product(&chi_odd(3.0))).unwrap();
        assert_relative_eq!(zc3.conductor, 3.0, max_relative = 1e-13);
        assert_relative_eq!(zc3.xi.re, -1.0, epsilon = 1e-15);
        let c3c4 = compute_invariants(&chi_odd(3.0).product(&chi_odd(4.0))).unwrap();
        assert_relative_eq!(c3c4.conductor, 12.0, max_relative = 1e-13);
        assert_relative_eq!(c3c4.xi.re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn omega_rotation_moves_omega1_only() {
        let base = dedekind_minus3();
        let a = compute_invariants(&base).unwrap();
        for phi in [0.3, -1.2, 2.9] {
            let mut rotated = base.clone();
            rotated.omega *= Complex64::from_polar(1.0, phi);
            let b = compute_invariants(&rotated).unwrap();
            let ratio = b.omega1 / a.omega1;
            assert_relative_eq!(ratio.re, phi.cos(), epsilon = 1e-14);
            assert_relative_eq!(ratio.im, phi.sin(), epsilon = 1e-14);
            assert_eq!(a.degree, b.degree);
            assert_eq!(a.xi, b.xi);
            assert_eq!(a.conductor, b.conductor);
        }
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let f = vec![GammaFactor::real(0.5, 0.0)];
        assert!(GammaFactorSpec::new(0.0, f.clone(), 1.0.into()).is_err());
        assert!(GammaFactorSpec::new(1.0, vec![GammaFactor::real(-0.5, 0.0)], 1.0.into()).is_err());
        assert!(GammaFactorSpec::new(1.0, vec![GammaFactor::real(0.5, -0.1)], 1.0.into()).is_err());
        assert!(GammaFactorSpec::new(1.0, f.clone(), Complex64::new(1.1, 0.0)).is_err());
        assert!(GammaFactorSpec::new(1.0, vec![], 1.0.into()).is_err());
    }

    #[test]
    fn polar_part_mirrors_to_zero() {
        let p = PolarPart {
            coefficients: vec![Complex64::new(0.5, 0.1), Complex64::new(2.0, 0.0)],
        };
        let d = p.at_zero(Complex64::new(0.0, 1.0));
        assert_eq!(p.order(), 2);
        assert_relative_eq!(d[0].re, -0.1, epsilon = 1e-15);
        assert_relative_eq!(d[0].im, -0.5, epsilon = 1e-15);
        assert_relative_eq!(d[1].im, 2.0, epsilon = 1e-15);
        assert!(PolarPart::entire().is_entire());
    }
}
