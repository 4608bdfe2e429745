//! Independent degree-one reference implementation: Hurwitz zeta by
//! Euler-Maclaurin summation, log-gamma by shifted Stirling series, and a
//! plain bisection zero finder. Shares no code with the library.

#![allow(dead_code)]

use num_complex::Complex64;
use std::f64::consts::PI;

/// `B_{2k}` for `k = 1..=15`.
const BERNOULLI: [f64; 15] = [
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
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// `ζ(s, a)` for `0 < a ≤ 1`, `s ≠ 1`.
pub fn hurwitz(s: Complex64, a: f64) -> Complex64 {
    let n = 30 + (s.im.abs() / 2.0).ceil() as usize;
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..n {
        sum += (-s * (k as f64 + a).ln()).exp();
    }
    let x = n as f64 + a;
    let lx = x.ln();
    let xs = (-s * lx).exp();
    sum += xs * x / (s - one) + 0.5 * xs;
    // Σ B_{2k}/(2k)! · s(s+1)...(s+2k-2) · x^{-s-2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut xpow = xs / x;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let term = b / fact * rising * xpow;
        sum += term;
        let j = 2.0 * (k as f64 + 1.0);
        rising *= (s + (j - 1.0)) * (s + j);
        fact *= (j + 1.0) * (j + 2.0);
        xpow /= x * x;
    }
    sum
}

/// A real primitive character given by its value table mod `q`.
#[derive(Clone)]
pub struct Character {
    pub q: u64,
    pub values: Vec<i8>,
}

impl Character {
    pub fn trivial() -> Self {
        Self { q: 1, values: vec![1] }
    }

    /// The character mod 3 (odd).
    pub fn mod3() -> Self {
        Self { q: 3, values: vec![0, 1, -1] }
    }

    /// The character mod 4 (odd).
    pub fn mod4() -> Self {
        Self { q: 4, values: vec![0, 1, 0, -1] }
    }

    pub fn is_odd(&self) -> bool {
        self.q > 1 && self.values[(self.q - 1) as usize] == -1
    }

    pub fn value(&self, n: u64) -> i8 {
        self.values[(n % self.q) as usize]
    }

    /// `L(s, χ) = q^{-s} Σ_a χ(a) ζ(s, a/q)`.
    pub fn l(&self, s: Complex64) -> Complex64 {
        let q = self.q as f64;
        let mut sum = Complex64::new(0.0, 0.0);
        for a in 1..=self.q {
            let c = self.value(a);
            if c != 0 {
                sum += c as f64 * hurwitz(s, a as f64 / q);
            }
        }
        sum * (-s * q.ln()).exp()
    }

    /// `θ(t) = Im ln Γ((1/2 + a + it)/2) + (t/2) ln(q/π)`.
    pub fn theta(&self, t: f64) -> f64 {
        let a = if self.is_odd() { 1.0 } else { 0.0 };
        ln_gamma(Complex64::new((0.5 + a) / 2.0, t / 2.0)).im + 0.5 * t * (self.q as f64 / PI).ln()
    }

    pub fn z(&self, t: f64) -> f64 {
        let v = Complex64::from_polar(1.0, self.theta(t)) * self.l(Complex64::new(0.5, t));
        v.re
    }

    /// Sign changes of `Z` on `[lo, hi]`, bisected to width `1e-12`.
    pub fn zeros(&self, lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let mut out = Vec::new();
        let mut a = lo;
        let mut za = self.z(a);
        while a < hi {
            let b = (a + step).min(hi);
            let zb = self.z(b);
            if (za > 0.0) != (zb > 0.0) {
                out.push(bisect(|t| self.z(t), a, b, za));
            }
            a = b;
            za = zb;
        }
        out
    }
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > 1e-12 {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Continuous-branch `ln Γ(z)` for `Re z > 0`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let shift = 12;
    let mut w = z;
    let mut acc = Complex64::new(0.0, 0.0);
    for _ in 0..shift {
        acc -= w.ln();
        w += 1.0;
    }
    let mut series = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let w2 = w * w;
    let mut wp = w;
    for (k, b) in BERNOULLI.iter().take(8).enumerate() {
        let n = 2.0 * (k as f64 + 1.0);
        series += b / (n * (n - 1.0) * wp);
        wp *= w2;
    }
    series + acc
}
