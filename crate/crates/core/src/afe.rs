//! Approximate functional equation for `F(s)`.
//!
//! The default policy is the smoothed form
//!
//! ```text
//! F(s) = Σ a(n) n^{-s} V₁(n) + Δ_F(s) Σ ā(n) n^{s-1} V₂(n) - P(s)/γ(s)
//! V₁(n) = (1/2πi) ∫_(c) γ(s+z)/γ(s) · e^{αz² - iβz} n^{-z} dz/z
//! V₂(n) = (1/2πi) ∫_(c) γ̄(1-s+z)/γ̄(1-s) · e^{αz² + iβz} n^{-z} dz/z
//! ```
//!
//! with `β = πd/4`, which flattens the Stirling growth of the gamma quotient
//! along the contour. The contour integrals are taken with the trapezoid
//! rule, which converges geometrically for these entire integrands. `P(s)`
//! collects the residues of `Φ(w) e^{α(w-s)² - iβ(w-s)}/(w-s)` at `w = 0, 1`.
//!
//! The sharp policy truncates both sums at `X = ⌈Q₁ t^{d/2}⌉` and is kept for
//! comparison; its error is only `O(1)`-small in `t^{-1/4}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma_delta::{gamma_factor, gamma_factor_dual, ln_delta};
use crate::lfunction::LFunction;

/// Smallest height accepted on the critical line.
pub const MIN_EVAL_T: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AfeKind {
    Smoothed,
    Sharp,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AfePolicy {
    pub kind: AfeKind,
    /// Gaussian width `α` of the smoothing weight.
    pub smoothing: f64,
    /// Abscissa `c` of the contour.
    pub contour: f64,
    /// Trapezoid step along the contour.
    pub node_step: f64,
    /// Multiplies the number of terms taken.
    pub length_scale: f64,
    /// Also evaluate with a perturbed weight (or cutoff) and report the difference.
    pub estimate_error: bool,
}

impl Default for AfePolicy {
    fn default() -> Self {
        Self {
            kind: AfeKind::Smoothed,
            smoothing: 0.02,
            contour: 1.5,
            node_step: 0.25,
            length_scale: 1.0,
            estimate_error: false,
        }
    }
}

impl AfePolicy {
    pub fn sharp() -> Self {
        Self {
            kind: AfeKind::Sharp,
            ..Self::default()
        }
    }

    pub fn with_error_estimate(mut self) -> Self {
        self.estimate_error = true;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FValue {
    pub value: Complex64,
    /// Balanced split point `⌈Q₁ t^{d/2}⌉`.
    pub cutoff: usize,
    /// Number of coefficients actually used.
    pub terms: usize,
    pub error_estimate: Option<f64>,
}

/// `⌈Q₁ t^{d/2}⌉`.
pub fn balanced_cutoff(lf: &LFunction, t: f64) -> usize {
    let inv = &lf.invariants;
    (inv.q1 * t.abs().powf(inv.degree / 2.0)).ceil().max(1.0) as usize
}

/// Smallest `ln n` beyond which every term of the smoothed sums is below
/// `e^{-40}`, from the saddle bound `|V(n)| ≲ n^{-c} |γ(s+c)/γ(s)| e^{αc²}`
/// minimized over real `c > 0`.
fn tail_log_length(lf: &LFunction, s: Complex64, alpha: f64) -> Result<f64> {
    let gamma = &lf.gamma;
    let sigma = s.re;
    let bound = |base: Complex64, exponent: f64| -> Result<f64> {
        let g0 = gamma_factor(gamma, base)?.re;
        let mut best = f64::INFINITY;
        let mut c = 0.5;
        while c < 120.0 {
            if c + exponent > 0.1 {
                let g = gamma_factor(gamma, base + c)?.re - g0 + alpha * c * c;
                best = best.min((g + 40.0) / (c + exponent));
            }
            c *= 1.15;
        }
        Ok(best)
    };
    // Second sum: n^{σ-1-c} |γ̄(1-s+c)/γ̄(1-s)| with |Δ| folded into the margin.
    let first = bound(s, sigma)?;
    let second = bound((1.0 - s).conj(), 1.0 - sigma)?
        + ln_delta(gamma, s)?.re.max(0.0) / (1.0 - sigma).max(0.1);
    Ok(first.max(second).max(0.0))
}

/// Number of terms the evaluation at `s` needs.
pub fn required_terms_at(lf: &LFunction, s: Complex64, policy: &AfePolicy) -> Result<usize> {
    match policy.kind {
        AfeKind::Sharp => {
            let x = balanced_cutoff(lf, s.im);
            Ok(if policy.estimate_error { 2 * x } else { x })
        }
        AfeKind::Smoothed => {
            let mut alpha = policy.smoothing;
            if policy.estimate_error {
                alpha = alpha.max(perturbed_smoothing(alpha));
            }
            let n = tail_log_length(lf, s, alpha)?.exp() * policy.length_scale;
            Ok(n.ceil() as usize + 2)
        }
    }
}

/// Table length needed to evaluate on the critical line up to height `t`.
pub fn required_terms(lf: &LFunction, t: f64, policy: &AfePolicy) -> Result<usize> {
    required_terms_at(lf, Complex64::new(0.5, t.max(MIN_EVAL_T)), policy)
}

fn perturbed_smoothing(alpha: f64) -> f64 {
    alpha * 1.5
}

/// `F(1/2 + it)`.
pub fn evaluate_f_critical(lf: &LFunction, t: f64, policy: &AfePolicy) -> Result<FValue> {
    if t < MIN_EVAL_T {
        return Err(Error::TooSmallT { t, min: MIN_EVAL_T });
    }
    evaluate_f(lf, Complex64::new(0.5, t), policy)
}

/// `F(s)` for `Im s ≥ MIN_EVAL_T`.
pub fn evaluate_f(lf: &LFunction, s: Complex64, policy: &AfePolicy) -> Result<FValue> {
    if s.im < MIN_EVAL_T {
        return Err(Error::TooSmallT {
            t: s.im,
            min: MIN_EVAL_T,
        });
    }
    let needed = required_terms_at(lf, s, policy)?;
    lf.series.ensure_covers(needed)?;
    let cutoff = balanced_cutoff(lf, s.im);
    match policy.kind {
        AfeKind::Sharp => {
            let value = sharp_sum(lf, s, cutoff, cutoff)?;
            let error_estimate = if policy.estimate_error {
                let other = sharp_sum(lf, s, 2 * cutoff, cutoff.div_ceil(2))?;
                Some((other - value).norm())
            } else {
                None
            };
            Ok(FValue {
                value,
                cutoff,
                terms: if policy.estimate_error { 2 * cutoff } else { cutoff },
                error_estimate,
            })
        }
        AfeKind::Smoothed => {
            let (value, terms, scale) = smoothed(lf, s, policy, policy.smoothing)?;
            let error_estimate = if policy.estimate_error {
                let (other, _, _) = smoothed(lf, s, policy, perturbed_smoothing(policy.smoothing))?;
                Some((other - value).norm().max(64.0 * f64::EPSILON * scale))
            } else {
                None
            };
            Ok(FValue {
                value,
                cutoff,
                terms,
                error_estimate,
            })
        }
    }
}

fn sharp_sum(lf: &LFunction, s: Complex64, x1: usize, x2: usize) -> Result<Complex64> {
    lf.series.ensure_covers(x1.max(x2))?;
    let mut first = Complex64::new(0.0, 0.0);
    for n in 1..=x1 {
        let ln_n = (n as f64).ln();
        first += lf.series.get(n) * (-s * ln_n).exp();
    }
    let mut second = Complex64::new(0.0, 0.0);
    for n in 1..=x2 {
        let ln_n = (n as f64).ln();
        second += lf.series.get(n).conj() * ((s - 1.0) * ln_n).exp();
    }
    Ok(first + ln_delta(&lf.gamma, s)?.exp() * second)
}

/// Returns the value, the number of terms and the size of the largest
/// partial sum (for a rounding floor).
fn smoothed(
    lf: &LFunction,
    s: Complex64,
    policy: &AfePolicy,
    alpha: f64,
) -> Result<(Complex64, usize, f64)> {
    let gamma = &lf.gamma;
    let beta = PI * lf.invariants.degree / 4.0;
    // Each contour keeps `contour` clear of the gamma poles of its integrand.
    let c1 = policy.contour + (0.5 - s.re).max(0.0);
    let c2 = policy.contour + (s.re - 0.5).max(0.0);
    let h = policy.node_step;
    let half_width = (36.0 / alpha).sqrt();
    let k_max = (half_width / h).ceil() as i64;

    let ln_g_s = gamma_factor(gamma, s)?;
    let ln_gd_s = gamma_factor_dual(gamma, s)?;
    let i = Complex64::new(0.0, 1.0);

    // Node weights G₁ at c₁ + ikh and G₂ at c₂ + ikh, in increasing k.
    let mut ys = Vec::with_capacity((2 * k_max + 1) as usize);
    let mut g1 = Vec::with_capacity(ys.capacity());
    let mut g2 = Vec::with_capacity(ys.capacity());
    let mut peak = 0.0f64;
    for k in -k_max..=k_max {
        let y = k as f64 * h;
        let z1 = Complex64::new(c1, y);
        let z2 = Complex64::new(c2, y);
        let a = (gamma_factor(gamma, s + z1)? - ln_g_s + alpha * z1 * z1 - i * beta * z1).exp() / z1;
        let b = (gamma_factor(gamma, (1.0 - s + z2).conj())?.conj() - ln_gd_s
            + alpha * z2 * z2
            + i * beta * z2)
            .exp()
            / z2;
        peak = peak.max(a.norm()).max(b.norm());
        ys.push(y);
        g1.push(a);
        g2.push(b);
    }
    // Drop nodes that cannot affect the result.
    let keep = |j: usize| g1[j].norm().max(g2[j].norm()) > 1e-18 * peak;
    let lo = (0..ys.len()).find(|&j| keep(j)).unwrap_or(0);
    let hi = (0..ys.len()).rfind(|&j| keep(j)).unwrap_or(0);
    let (ys, g1, g2) = (&ys[lo..=hi], &g1[lo..=hi], &g2[lo..=hi]);

    let terms = required_terms_at(
        lf,
        s,
        &AfePolicy {
            smoothing: alpha,
            estimate_error: false,
            ..*policy
        },
    )?;
    lf.series.ensure_covers(terms)?;

    let mut first = Complex64::new(0.0, 0.0);
    let mut second = Complex64::new(0.0, 0.0);
    let delta = ln_delta(gamma, s)?.exp();
    let delta_norm = delta.norm();
    let mut scale = 0.0f64;
    let y0 = ys[0];
    for n in 1..=terms {
        let an = lf.series.get(n);
        if an.re == 0.0 && an.im == 0.0 {
            continue;
        }
        let ln_n = (n as f64).ln();
        // n^{-c₁-iy_k} = n^{-c₁} · n^{-iy₀} · (n^{-ih})^k
        let mut w = Complex64::from_polar((-c1 * ln_n).exp(), -y0 * ln_n);
        let step = Complex64::from_polar(1.0, -h * ln_n);
        let mut v1 = Complex64::new(0.0, 0.0);
        let mut v2 = Complex64::new(0.0, 0.0);
        for (a, b) in g1.iter().zip(g2) {
            v1 += a * w;
            v2 += b * w;
            w *= step;
        }
        let t1 = an * (-s * ln_n).exp() * v1;
        let t2 = an.conj() * ((s - 1.0 - (c2 - c1)) * ln_n).exp() * v2;
        scale = scale.max(t1.norm()).max(delta_norm * t2.norm());
        first += t1;
        second += t2;
    }
    let norm = h / (2.0 * PI);
    first *= norm;
    second *= norm;

    let polar = polar_correction(lf, s, alpha, beta, ln_g_s)?;
    let value = first + delta * second - polar;
    Ok((value, terms, scale * norm))
}

/// `P(s)/γ(s)`, evaluated in log space.
fn polar_correction(
    lf: &LFunction,
    s: Complex64,
    alpha: f64,
    beta: f64,
    ln_g_s: Complex64,
) -> Result<Complex64> {
    if lf.polar.is_entire() {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let i = Complex64::new(0.0, 1.0);
    let at_one = &lf.polar.coefficients;
    let at_zero = lf.polar.at_zero(lf.gamma.omega);
    let mut total = Complex64::new(0.0, 0.0);
    for (w0, coeffs) in [(1.0, at_one.as_slice()), (0.0, at_zero.as_slice())] {
        let u = Complex64::new(w0, 0.0) - s;
        let ln_g = alpha * u * u - i * beta * u;
        let scale = (ln_g - ln_g_s).exp();
        // Residue of (Σ c_j/(w-w0)^j) g(w)/(w-s) at w0, divided by g(w0).
        let mut r = Complex64::new(0.0, 0.0);
        if let Some(c1) = coeffs.first() {
            r += c1 / u;
        }
        if let Some(c2) = coeffs.get(1) {
            r += c2 * ((2.0 * alpha * u - i * beta) / u - 1.0 / (u * u));
        }
        total += scale * r;
    }
    Ok(total)
}
