//! TOML definition files describing an L-function.
//!
//! ```toml
//! name = "zeta_chi3"
//!
//! [gamma]
//! Q = 0.5513288954217920
//! factors = [{ lambda = 0.5, mu = 0.0 }, { lambda = 0.5, mu = { re = 0.5, im = 0.0 } }]
//! omega = { re = 1.0, im = 0.0 }
//!
//! [coefficients]
//! kind = "dirichlet_product"
//! characters = [[1, 0], [3, 0]]
//! N = 2000
//! ```
//!
//! `kind` is one of `dirichlet_product` (two `[modulus, index]` pairs),
//! `dedekind_quadratic` (`discriminant`) or `explicit_list` (`values`, each a
//! number or `{ re, im }`). For the first two the gamma data and the polar
//! part are fixed by the arithmetic and the file is checked against them; an
//! `explicit_list` may carry a `[pole]` section with the Laurent coefficients
//! `laurent = [c₁, c₂]` of the completed function at `s = 1`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::afe::{required_terms, AfePolicy};
use crate::arith::QuadraticCharacter;
use crate::coefficients::{
    coefficients_character, coefficients_dedekind_quadratic, coefficients_dirichlet_product,
    CoefficientSeries,
};
use crate::error::{Error, Result};
use crate::lfunction::{character_gamma, dedekind_gamma, product_polar_part, LFunction};
use crate::selberg::{GammaFactor, GammaFactorSpec, PolarPart};

/// Relative tolerance when comparing file data with the canonical data.
const MATCH_TOL: f64 = 1e-10;

/// Definition files bundled with the crate, by name.
pub const SHIPPED: [(&str, &str); 3] = [
    ("zeta_chi3", include_str!("../definitions/zeta_chi3.toml")),
    ("chi3_chi4", include_str!("../definitions/chi3_chi4.toml")),
    ("zeta_sq", include_str!("../definitions/zeta_sq.toml")),
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Real(f64),
    Parts { re: f64, im: f64 },
}

impl From<ComplexEntry> for Complex64 {
    fn from(c: ComplexEntry) -> Self {
        match c {
            ComplexEntry::Real(re) => Complex64::new(re, 0.0),
            ComplexEntry::Parts { re, im } => Complex64::new(re, im),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorEntry {
    pub lambda: f64,
    pub mu: ComplexEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSection {
    #[serde(rename = "Q")]
    pub q: f64,
    pub factors: Vec<FactorEntry>,
    pub omega: ComplexEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientSection {
    DirichletProduct {
        characters: [[u64; 2]; 2],
        #[serde(rename = "N")]
        n: usize,
    },
    DedekindQuadratic {
        discriminant: i64,
        #[serde(rename = "N")]
        n: usize,
    },
    ExplicitList {
        values: Vec<ComplexEntry>,
        #[serde(default)]
        multiplicative: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoleSection {
    pub laurent: Vec<ComplexEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Definition {
    #[serde(default)]
    pub name: Option<String>,
    pub gamma: GammaSection,
    pub coefficients: CoefficientSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pole: Option<PoleSection>,
}

impl Definition {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Definition(e.message().to_string()))
    }

    pub fn shipped(name: &str) -> Option<Self> {
        SHIPPED
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_toml_str(text).expect("bundled definition parses"))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Definition(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn gamma_spec(&self) -> Result<GammaFactorSpec> {
        let factors = self
            .gamma
            .factors
            .iter()
            .map(|f| GammaFactor::new(f.lambda, f.mu.into()))
            .collect();
        GammaFactorSpec::new(self.gamma.q, factors, self.gamma.omega.into())
    }

    /// Table length the file asks for.
    pub fn table_len(&self) -> usize {
        match &self.coefficients {
            CoefficientSection::DirichletProduct { n, .. }
            | CoefficientSection::DedekindQuadratic { n, .. } => *n,
            CoefficientSection::ExplicitList { values, .. } => values.len(),
        }
    }

    /// Same definition with a different table length. Explicit lists cannot
    /// be extended.
    pub fn with_table_len(mut self, len: usize) -> Result<Self> {
        match &mut self.coefficients {
            CoefficientSection::DirichletProduct { n, .. }
            | CoefficientSection::DedekindQuadratic { n, .. } => *n = len,
            CoefficientSection::ExplicitList { values, .. } => {
                if len > values.len() {
                    return Err(Error::TableTooShort { needed: len, available: values.len() });
                }
                values.truncate(len);
            }
        }
        Ok(self)
    }

    /// Coefficient tables of the two factors of a `dirichlet_product`.
    pub fn factor_series(&self, len: usize) -> Result<Option<(CoefficientSeries, CoefficientSeries)>> {
        let CoefficientSection::DirichletProduct { characters, .. } = &self.coefficients else {
            return Ok(None);
        };
        let [[m1, i1], [m2, i2]] = *characters;
        let a = coefficients_character(QuadraticCharacter::primitive(m1, i1 as usize)?, len)?;
        let b = coefficients_character(QuadraticCharacter::primitive(m2, i2 as usize)?, len)?;
        Ok(Some((a, b)))
    }

    /// Build with a table long enough to evaluate on the critical line up to
    /// height `t_max`, extending the file's `N` when it falls short.
    pub fn build_for_height(&self, t_max: f64) -> Result<LFunction> {
        let lf = self.build()?;
        let need = required_terms(&lf, t_max, &AfePolicy::default())?;
        if need <= lf.series.len() {
            return Ok(lf);
        }
        self.clone().with_table_len(need)?.build()
    }

    pub fn build(&self) -> Result<LFunction> {
        let gamma = self.gamma_spec()?;
        let name = self.name.clone().unwrap_or_else(|| "unnamed".into());
        let (series, polar) = match &self.coefficients {
            CoefficientSection::DirichletProduct { characters, n } => {
                let [[m1, i1], [m2, i2]] = *characters;
                let c1 = QuadraticCharacter::primitive(m1, i1 as usize)?;
                let c2 = QuadraticCharacter::primitive(m2, i2 as usize)?;
                let canonical = character_gamma(&c1).product(&character_gamma(&c2));
                check_gamma(&gamma, &canonical)?;
                let series = coefficients_dirichlet_product(m1, i1 as usize, m2, i2 as usize, *n)?;
                (series, product_polar_part(&gamma, &[c1, c2])?)
            }
            CoefficientSection::DedekindQuadratic { discriminant, n } => {
                let chi = QuadraticCharacter::from_discriminant(*discriminant)?;
                if chi.is_principal() {
                    return Err(Error::NotFundamental(*discriminant));
                }
                check_gamma(&gamma, &dedekind_gamma(*discriminant)?)?;
                let series = coefficients_dedekind_quadratic(*discriminant, *n)?;
                let polar =
                    product_polar_part(&gamma, &[QuadraticCharacter::principal(), chi])?;
                (series, polar)
            }
            CoefficientSection::ExplicitList { values, multiplicative } => {
                let table: Vec<Complex64> = values.iter().map(|&v| v.into()).collect();
                let series = CoefficientSeries::from_values(&table, *multiplicative)?;
                let polar = PolarPart {
                    coefficients: self
                        .pole
                        .as_ref()
                        .map(|p| p.laurent.iter().map(|&c| c.into()).collect())
                        .unwrap_or_default(),
                };
                (series, polar)
            }
        };
        if let (Some(pole), false) = (
            &self.pole,
            matches!(self.coefficients, CoefficientSection::ExplicitList { .. }),
        ) {
            check_pole(pole, &polar)?;
        }
        LFunction::new(name, gamma, series, polar)
    }
}

fn close(a: Complex64, b: Complex64) -> bool {
    (a - b).norm() <= MATCH_TOL * b.norm().max(1.0)
}

/// The file's gamma data must agree with the data the coefficients imply,
/// up to the order of the factors.
fn check_gamma(given: &GammaFactorSpec, canonical: &GammaFactorSpec) -> Result<()> {
    let mismatch = |what: &str| {
        Error::Definition(format!(
            "[gamma] {what} does not match the coefficient data (expected Q = {}, factors = {:?}, omega = {})",
            canonical.q_scale,
            canonical
                .factors
                .iter()
                .map(|f| (f.lambda, f.mu.re, f.mu.im))
                .collect::<Vec<_>>(),
            canonical.omega
        ))
    };
    if !close(given.q_scale.into(), canonical.q_scale.into()) {
        return Err(mismatch("Q"));
    }
    if !close(given.omega, canonical.omega) {
        return Err(mismatch("omega"));
    }
    let key = |f: &GammaFactor| (f.lambda, f.mu.re, f.mu.im);
    let mut a: Vec<_> = given.factors.iter().map(key).collect();
    let mut b: Vec<_> = canonical.factors.iter().map(key).collect();
    a.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    b.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    let same = a.len() == b.len()
        && a.iter().zip(&b).all(|(x, y)| {
            close(x.0.into(), y.0.into())
                && close(Complex64::new(x.1, x.2), Complex64::new(y.1, y.2))
        });
    if !same {
        return Err(mismatch("factors"));
    }
    Ok(())
}

fn check_pole(pole: &PoleSection, derived: &PolarPart) -> Result<()> {
    let given: Vec<Complex64> = pole.laurent.iter().map(|&c| c.into()).collect();
    let n = given.len().max(derived.coefficients.len());
    let at = |v: &[Complex64], k: usize| v.get(k).copied().unwrap_or_default();
    if (0..n).all(|k| close(at(&given, k), at(&derived.coefficients, k))) {
        Ok(())
    } else {
        Err(Error::Definition(format!(
            "[pole] laurent {:?} disagrees with the value {:?} implied by the coefficients",
            given, derived.coefficients
        )))
    }
}
