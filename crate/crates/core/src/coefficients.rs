//! Dense Dirichlet-coefficient tables `a(1..=N)`.

use num_complex::Complex64;

use crate::arith::{smallest_prime_factors, QuadraticCharacter};
use crate::error::{Error, Result};

/// Desk-scale ceiling on table length.
pub const MAX_TABLE_LEN: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeries {
    /// `values[n]` is `a(n)`; `values[0]` is unused and zero.
    values: Vec<Complex64>,
    multiplicative: bool,
}

impl CoefficientSeries {
    /// Build a multiplicative table from its values at prime powers.
    /// `prime_power(p, k)` returns `a(p^k)` for `k >= 1`.
    pub fn from_prime_powers<G>(len: usize, mut prime_power: G) -> Result<Self>
    where
        G: FnMut(u64, u32) -> Complex64,
    {
        check_len(len)?;
        let spf = smallest_prime_factors(len);
        let mut values = vec![Complex64::new(0.0, 0.0); len + 1];
        values[1] = Complex64::new(1.0, 0.0);
        for n in 2..=len {
            let p = spf[n] as usize;
            let mut rest = n / p;
            let mut k = 1u32;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            values[n] = prime_power(p as u64, k) * values[rest];
        }
        Ok(Self {
            values,
            multiplicative: true,
        })
    }

    /// Table from explicit values `a(1), a(2), ...`. When `multiplicative` is
    /// claimed it is verified on every coprime pair.
    pub fn from_values(values: &[Complex64], multiplicative: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("coefficient list is empty".into()));
        }
        if (values[0] - Complex64::new(1.0, 0.0)).norm() > 1e-12 {
            return Err(Error::InvalidArgument(format!("a(1) must be 1, got {}", values[0])));
        }
        check_len(values.len())?;
        let mut v = Vec::with_capacity(values.len() + 1);
        v.push(Complex64::new(0.0, 0.0));
        v.extend_from_slice(values);
        let series = Self {
            values: v,
            multiplicative,
        };
        if multiplicative {
            if let Some((m, n)) = series.multiplicativity_violation(values.len()) {
                return Err(Error::InvalidArgument(format!(
                    "coefficients are not multiplicative: a({m})a({n}) != a({})",
                    m * n
                )));
            }
        }
        Ok(series)
    }

    pub fn len(&self) -> usize {
        self.values.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_multiplicative(&self) -> bool {
        self.multiplicative
    }

    /// `a(n)`; zero outside the table.
    pub fn get(&self, n: usize) -> Complex64 {
        self.values.get(n).copied().unwrap_or_default()
    }

    /// `a(1..=N)` as a slice indexed from zero (`slice[0] = a(1)`).
    pub fn as_slice(&self) -> &[Complex64] {
        &self.values[1..]
    }

    /// Raw table with the unused zero slot, so that `raw()[n] = a(n)`.
    pub fn raw(&self) -> &[Complex64] {
        &self.values
    }

    pub fn ensure_covers(&self, n: usize) -> Result<()> {
        if n > self.len() {
            Err(Error::TableTooShort {
                needed: n,
                available: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// First coprime pair `(m, n)` with `mn <= limit` where `a(mn) != a(m)a(n)`.
    pub fn multiplicativity_violation(&self, limit: usize) -> Option<(usize, usize)> {
        let limit = limit.min(self.len());
        for m in 2..=limit {
            for n in m + 1..=limit / m {
                if gcd(m, n) != 1 {
                    continue;
                }
                let lhs = self.get(m * n);
                let rhs = self.get(m) * self.get(n);
                if (lhs - rhs).norm() > 1e-9 * (1.0 + lhs.norm()) {
                    return Some((m, n));
                }
            }
        }
        None
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::InvalidArgument("table length must be at least 1".into()));
    }
    if len > MAX_TABLE_LEN {
        return Err(Error::InvalidArgument(format!(
            "table length {len} exceeds the limit {MAX_TABLE_LEN}"
        )));
    }
    Ok(())
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn product_prime_power(chi1: QuadraticCharacter, chi2: QuadraticCharacter, p: u64, k: u32) -> f64 {
    let x = chi1.value(p) as f64;
    let y = chi2.value(p) as f64;
    (0..=k).map(|j| x.powi(j as i32) * y.powi((k - j) as i32)).sum()
}

/// Coefficients of `L(s, χ)` for a single primitive real character.
pub fn coefficients_character(chi: QuadraticCharacter, len: usize) -> Result<CoefficientSeries> {
    CoefficientSeries::from_prime_powers(len, |p, k| {
        Complex64::new((chi.value(p) as f64).powi(k as i32), 0.0)
    })
}

/// Coefficients of `L(s, χ₁) L(s, χ₂)`, i.e. `a(n) = Σ_{de=n} χ₁(d) χ₂(e)`,
/// with each character given by its conductor and an index among the
/// primitive real characters of that conductor.
pub fn coefficients_dirichlet_product(
    modulus1: u64,
    index1: usize,
    modulus2: u64,
    index2: usize,
    len: usize,
) -> Result<CoefficientSeries> {
    let chi1 = QuadraticCharacter::primitive(modulus1, index1)?;
    let chi2 = QuadraticCharacter::primitive(modulus2, index2)?;
    CoefficientSeries::from_prime_powers(len, |p, k| {
        Complex64::new(product_prime_power(chi1, chi2, p, k), 0.0)
    })
}

/// Ideal counts of the quadratic field of discriminant `d`:
/// `a(n) = Σ_{m | n} χ_d(m)`.
pub fn coefficients_dedekind_quadratic(d: i64, len: usize) -> Result<CoefficientSeries> {
    if d == 1 {
        return Err(Error::NotFundamental(d));
    }
    let chi = QuadraticCharacter::from_discriminant(d)?;
    let one = QuadraticCharacter::principal();
    CoefficientSeries::from_prime_powers(len, |p, k| {
        Complex64::new(product_prime_power(one, chi, p, k), 0.0)
    })
}

/// Truncated local factor `Σ_{m=0}^{M} a(p^m) p^{-ms}`.
pub fn euler_factor(series: &CoefficientSeries, p: u64, s: Complex64, order: u32) -> Result<Complex64> {
    if !crate::arith::is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    let mut total = Complex64::new(1.0, 0.0);
    let step = (-s * (p as f64).ln()).exp();
    let mut pk: u64 = 1;
    let mut weight = Complex64::new(1.0, 0.0);
    for _ in 0..order {
        pk = pk
            .checked_mul(p)
            .filter(|&v| v as usize <= series.len())
            .ok_or(Error::TableTooShort {
                needed: (pk as usize).saturating_mul(p as usize),
                available: series.len(),
            })?;
        weight *= step;
        total += series.get(pk as usize) * weight;
    }
    Ok(total)
}
