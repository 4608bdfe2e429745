//! A concrete function: gamma data, a Dirichlet coefficient table and the
//! polar part of its completion.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::arith::QuadraticCharacter;
use crate::coefficients::{
    coefficients_character, coefficients_dedekind_quadratic, coefficients_dirichlet_product,
    CoefficientSeries,
};
use crate::error::{Error, Result};
use crate::gamma_delta::gamma_factor;
use crate::selberg::{compute_invariants, GammaFactor, GammaFactorSpec, PolarPart, SelbergInvariants};
use crate::special::{digamma, EULER_GAMMA};

#[derive(Debug, Clone, Serialize)]
pub struct LFunction {
    pub name: String,
    pub gamma: GammaFactorSpec,
    #[serde(skip)]
    pub series: CoefficientSeries,
    pub polar: PolarPart,
    pub invariants: SelbergInvariants,
}

impl LFunction {
    pub fn new(
        name: impl Into<String>,
        gamma: GammaFactorSpec,
        series: CoefficientSeries,
        polar: PolarPart,
    ) -> Result<Self> {
        let invariants = compute_invariants(&gamma)?;
        if polar.order() > 2 {
            return Err(Error::Unsupported("poles of order above two".into()));
        }
        Ok(Self {
            name: name.into(),
            gamma,
            series,
            polar,
            invariants,
        })
    }

    pub fn zeta(len: usize) -> Result<Self> {
        Self::dirichlet_l(1, 0, len)
    }

    /// `L(s, χ)` for a real primitive character; degree one.
    pub fn dirichlet_l(modulus: u64, index: usize, len: usize) -> Result<Self> {
        let chi = QuadraticCharacter::primitive(modulus, index)?;
        let gamma = character_gamma(&chi);
        let series = coefficients_character(chi, len)?;
        let polar = product_polar_part(&gamma, &[chi])?;
        Self::new(format!("L(s,{modulus}.{index})"), gamma, series, polar)
    }

    /// `L(s, χ₁) L(s, χ₂)` for real primitive characters given by
    /// `(modulus, index)`; modulus 1 is `ζ`.
    pub fn dirichlet_product(
        m1: u64,
        i1: usize,
        m2: u64,
        i2: usize,
        len: usize,
    ) -> Result<Self> {
        let c1 = QuadraticCharacter::primitive(m1, i1)?;
        let c2 = QuadraticCharacter::primitive(m2, i2)?;
        let gamma = character_gamma(&c1).product(&character_gamma(&c2));
        let series = coefficients_dirichlet_product(m1, i1, m2, i2, len)?;
        let polar = product_polar_part(&gamma, &[c1, c2])?;
        Self::new(format!("L(s,{m1}.{i1})L(s,{m2}.{i2})"), gamma, series, polar)
    }

    /// Dedekind zeta of `Q(√D)`, `ζ(s) L(s, χ_D)`.
    pub fn dedekind_quadratic(d: i64, len: usize) -> Result<Self> {
        let chi = QuadraticCharacter::from_discriminant(d)?;
        if chi.is_principal() {
            return Err(Error::NotFundamental(d));
        }
        let series = coefficients_dedekind_quadratic(d, len)?;
        let gamma = dedekind_gamma(d)?;
        let polar = product_polar_part(&gamma, &[QuadraticCharacter::principal(), chi])?;
        Self::new(format!("zeta_K(D={d})"), gamma, series, polar)
    }

    pub fn degree(&self) -> f64 {
        self.invariants.degree
    }
}

/// Gamma data of `L(s, χ)`: `(q/π)^{s/2} Γ((s + a)/2)` with `a = 0` for even
/// and `a = 1` for odd characters.
pub fn character_gamma(chi: &QuadraticCharacter) -> GammaFactorSpec {
    let q = chi.modulus() as f64;
    let a = if chi.is_odd() { 0.5 } else { 0.0 };
    GammaFactorSpec {
        q_scale: (q / PI).sqrt(),
        factors: vec![GammaFactor::real(0.5, a)],
        omega: 1.0.into(),
    }
}

/// Gamma data of the Dedekind zeta function of `Q(√D)` in its standard form.
pub fn dedekind_gamma(d: i64) -> Result<GammaFactorSpec> {
    let ad = d.unsigned_abs() as f64;
    let spec = if d < 0 {
        GammaFactorSpec::new(ad.sqrt() / (2.0 * PI), vec![GammaFactor::real(1.0, 0.0)], 1.0.into())?
    } else {
        GammaFactorSpec::new(
            ad.sqrt() / PI,
            vec![GammaFactor::real(0.5, 0.0), GammaFactor::real(0.5, 0.0)],
            1.0.into(),
        )?
    };
    Ok(spec)
}

/// Principal part of `γ(s) ∏ L(s, χ_k)` at `s = 1`.
///
/// With `F = f₂/(s-1)² + f₁/(s-1) + ...` and `γ(s) = γ(1)(1 + g (s-1) + ...)`,
/// where `g = ln Q + Σ λ ψ(λ + μ)`, the completed coefficients are
/// `c₂ = γ(1) f₂` and `c₁ = γ(1) (f₁ + g f₂)`.
pub fn product_polar_part(
    gamma: &GammaFactorSpec,
    characters: &[QuadraticCharacter],
) -> Result<PolarPart> {
    let principal = characters.iter().filter(|c| c.is_principal()).count();
    let (f1, f2) = match principal {
        0 => return Ok(PolarPart::entire()),
        1 => {
            let mut f1 = 1.0;
            for c in characters.iter().filter(|c| !c.is_principal()) {
                f1 *= c.l_at_one().expect("non-principal");
            }
            (f1, 0.0)
        }
        2 if characters.len() == 2 => (2.0 * EULER_GAMMA, 1.0),
        _ => return Err(Error::Unsupported("poles of order above two".into())),
    };
    let one = Complex64::new(1.0, 0.0);
    let g1 = gamma_factor(gamma, one)?.exp();
    let mut g = Complex64::new(gamma.q_scale.ln(), 0.0);
    for f in &gamma.factors {
        g += f.lambda * digamma(f.lambda + f.mu)?;
    }
    let c1 = g1 * (f1 + g * f2);
    let c2 = g1 * f2;
    let coefficients = if f2 == 0.0 { vec![c1] } else { vec![c1, c2] };
    Ok(PolarPart { coefficients })
}
