//! Elementary arithmetic: prime sieves, the Kronecker symbol and real
//! primitive Dirichlet characters.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Smallest-prime-factor table for `0..=n` (entries 0 and 1 are 0).
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::new();
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let m = i * p as usize;
            if p > si || m > n {
                break;
            }
            spf[m] = p;
        }
    }
    spf
}

/// Primes up to and including `n`, by the sieve of Eratosthenes.
pub fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn is_squarefree(n: u64) -> bool {
    let mut m = n;
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) {
                return false;
            }
        }
        d += 1;
    }
    true
}

/// Kronecker symbol `(a / n)`, extending the Jacobi symbol to all integers `n`.
pub fn kronecker(a: i64, n: i64) -> i8 {
    if n == 0 {
        return if a.abs() == 1 { 1 } else { 0 };
    }
    let mut a = a as i128;
    let mut n = n as i128;
    if a % 2 == 0 && n % 2 == 0 {
        return 0;
    }
    let mut result: i8 = 1;
    let v = n.trailing_zeros();
    n >>= v;
    // (a/2) = 0 for even a, otherwise depends on a mod 8.
    if v % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
        result = -result;
    }
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    // n is now odd and positive: Jacobi symbol.
    a = a.rem_euclid(n);
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && matches!(n % 8, 3 | 5) {
            result = -result;
        }
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Fundamental discriminants exclude 1 here: `D ≡ 1 (mod 4)` squarefree, or
/// `D = 4m` with `m ≡ 2, 3 (mod 4)` squarefree.
pub fn is_fundamental_discriminant(d: i64) -> bool {
    if d == 0 || d == 1 {
        return false;
    }
    match d.rem_euclid(4) {
        1 => is_squarefree(d.unsigned_abs()),
        0 => {
            let m = d / 4;
            matches!(m.rem_euclid(4), 2 | 3) && is_squarefree(m.unsigned_abs())
        }
        _ => false,
    }
}

/// A real primitive Dirichlet character, `n ↦ (D / n)` for a fundamental
/// discriminant `D`, or the trivial character when `D = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadraticCharacter {
    discriminant: i64,
}

impl QuadraticCharacter {
    pub fn principal() -> Self {
        Self { discriminant: 1 }
    }

    pub fn from_discriminant(d: i64) -> Result<Self> {
        if d == 1 || is_fundamental_discriminant(d) {
            Ok(Self { discriminant: d })
        } else {
            Err(Error::NotFundamental(d))
        }
    }

    /// The `index`-th primitive real character of conductor `modulus`, ordered
    /// by discriminant (negative first). Modulus 8 has two such characters;
    /// every other admissible modulus has exactly one.
    pub fn primitive(modulus: u64, index: usize) -> Result<Self> {
        let reject = Error::NonPrimitiveCharacter { modulus, index };
        if modulus == 0 {
            return Err(reject);
        }
        if modulus == 1 {
            return if index == 0 { Ok(Self::principal()) } else { Err(reject) };
        }
        let m = i64::try_from(modulus).map_err(|_| Error::NonPrimitiveCharacter { modulus, index })?;
        let candidates: Vec<i64> = [-m, m]
            .into_iter()
            .filter(|&d| is_fundamental_discriminant(d))
            .collect();
        candidates
            .get(index)
            .map(|&d| Self { discriminant: d })
            .ok_or(reject)
    }

    pub fn discriminant(&self) -> i64 {
        self.discriminant
    }

    pub fn modulus(&self) -> u64 {
        self.discriminant.unsigned_abs()
    }

    pub fn is_principal(&self) -> bool {
        self.discriminant == 1
    }

    /// Odd characters (`χ(-1) = -1`) have negative discriminant.
    pub fn is_odd(&self) -> bool {
        self.discriminant < 0
    }

    pub fn value(&self, n: u64) -> i8 {
        if self.discriminant == 1 {
            return 1;
        }
        kronecker(self.discriminant, n as i64)
    }

    /// `L(1, χ)` in closed form (Dirichlet's class-number formulas).
    pub fn l_at_one(&self) -> Option<f64> {
        if self.is_principal() {
            return None;
        }
        let q = self.modulus();
        let qf = q as f64;
        let value = if self.is_odd() {
            let s: f64 = (1..q).map(|a| a as f64 * self.value(a) as f64).sum();
            -PI * s / qf.powf(1.5)
        } else {
            let s: f64 = (1..q)
                .map(|a| self.value(a) as f64 * (PI * a as f64 / qf).sin().ln())
                .sum();
            -s / qf.sqrt()
        };
        Some(value)
    }
}
