//! The gamma factor `γ(s)`, the functional-equation quotient
//! `Δ_F(s) = ω γ̄(1-s) / γ(s)`, its Stirling main terms, and the continuous
//! theta phase that makes `Z_F` real.
//!
//! Everything is computed in log space: on the critical line `|γ(s)|` decays
//! like `e^{-π d t / 4}` and underflows long before `t = 10^4`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::afe::{evaluate_f, AfePolicy};
use crate::error::{Error, Result};
use crate::lfunction::LFunction;
use crate::selberg::{GammaFactorSpec, SelbergInvariants};
use crate::special::{ln_gamma, wrap_phase};

/// Below this height the Stirling expansions are not used.
pub const MIN_ASYMPTOTIC_T: f64 = 2.0;

/// Height at which the theta branch is anchored.
pub const THETA_REF_T: f64 = 10.0;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// `ln γ(s) = s ln Q + Σ ln Γ(λ_j s + μ_j)` on the principal branch, which is
/// continuous along vertical lines to the right of the gamma poles.
pub fn gamma_factor(spec: &GammaFactorSpec, s: Complex64) -> Result<Complex64> {
    let mut acc = s * spec.q_scale.ln();
    for f in &spec.factors {
        acc += ln_gamma(f.lambda * s + f.mu)?;
    }
    Ok(acc)
}

/// `ln γ̄(1 - s) = conj(ln γ(1 - s̄))`.
pub fn gamma_factor_dual(spec: &GammaFactorSpec, s: Complex64) -> Result<Complex64> {
    Ok(gamma_factor(spec, (1.0 - s).conj())?.conj())
}

/// `ln Δ_F(s)`, with the imaginary part continuous in `t`.
pub fn ln_delta(spec: &GammaFactorSpec, s: Complex64) -> Result<Complex64> {
    Ok(i() * spec.omega.arg() + gamma_factor_dual(spec, s)? - gamma_factor(spec, s)?)
}

pub fn delta(spec: &GammaFactorSpec, s: Complex64) -> Result<Complex64> {
    Ok(ln_delta(spec, s)?.exp())
}

fn check_asymptotic_height(t: f64) -> Result<()> {
    if t < MIN_ASYMPTOTIC_T {
        Err(Error::TooSmallT {
            t,
            min: MIN_ASYMPTOTIC_T,
        })
    } else {
        Ok(())
    }
}

/// Main term of the Stirling expansion of `Δ_F(σ + it)`:
/// `ω₁ (Q₁ t^{d/2})^{1-2σ-2it} t^{-i Im ξ} e^{idt}`.
pub fn delta_asymptotic(inv: &SelbergInvariants, s: Complex64) -> Result<Complex64> {
    let (sigma, t) = (s.re, s.im);
    check_asymptotic_height(t)?;
    let ln_base = inv.q1.ln() + 0.5 * inv.degree * t.ln();
    let exponent = Complex64::new(1.0 - 2.0 * sigma, -2.0 * t) * ln_base
        - i() * inv.xi.im * t.ln()
        + i() * inv.degree * t;
    Ok(inv.omega1 * exponent.exp())
}

/// Main term of `Δ_F^{-1/2}(σ + it)` for degree two and real `ξ`:
/// `ω₂ (Q₁ t)^{σ - 1/2 + it} e^{-it}`.
pub fn delta_inv_sqrt_asymptotic(inv: &SelbergInvariants, s: Complex64) -> Result<Complex64> {
    if (inv.degree - 2.0).abs() > 1e-12 || inv.xi.im.abs() > 1e-12 {
        return Err(Error::Unsupported(
            "the square-root expansion needs degree 2 and real xi".into(),
        ));
    }
    let (sigma, t) = (s.re, s.im);
    check_asymptotic_height(t)?;
    let exponent = Complex64::new(sigma - 0.5, t) * (inv.q1 * t).ln() - i() * t;
    Ok(inv.omega2 * exponent.exp())
}

/// Log of the Stirling main term
/// `(2π)^{1/2} t^{σ+it-1/2} e^{-πt/2 + iπ(σ-1/2)/2 - it}` for `Γ(σ + it)`.
/// The caller exponentiates; the modulus underflows for `t` beyond ~450.
pub fn stirling_gamma(sigma: f64, t: f64) -> Result<Complex64> {
    check_asymptotic_height(t)?;
    Ok(0.5 * LN_2PI + Complex64::new(sigma - 0.5, t) * t.ln() - PI * t / 2.0
        + i() * (PI / 2.0 * (sigma - 0.5) - t))
}

/// Continuous phase `θ_F(t)` with `e^{iθ_F(t)} = ±Δ_F(1/2 + it)^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaState {
    pub t: f64,
    pub theta: f64,
    /// Value of the phase at the anchor height `t_ref`.
    pub branch_offset: f64,
    pub t_ref: f64,
}

/// `Im ln γ(1/2 + it) - arg(ω)/2`; then `e^{2iθ} Δ_F(1/2 + it) = 1`.
fn raw_theta(spec: &GammaFactorSpec, t: f64) -> Result<f64> {
    Ok(gamma_factor(spec, Complex64::new(0.5, t))?.im - 0.5 * spec.omega.arg())
}

impl ThetaState {
    /// Anchor the branch at `t_ref`. The global sign is the one for which
    /// `e^{2iθ} Δ_F = 1` exactly; for `ζ` this is the classical Riemann-Siegel
    /// theta.
    pub fn anchor(spec: &GammaFactorSpec, t_ref: f64) -> Result<Self> {
        let theta = raw_theta(spec, t_ref)?;
        Ok(Self {
            t: t_ref,
            theta,
            branch_offset: theta,
            t_ref,
        })
    }

    pub fn default_anchor(spec: &GammaFactorSpec) -> Result<Self> {
        Self::anchor(spec, THETA_REF_T)
    }

    /// Phase at `t` on this state's branch, without a continuity check.
    pub fn at(&self, spec: &GammaFactorSpec, t: f64) -> Result<Self> {
        let theta = self.branch_offset + (raw_theta(spec, t)? - raw_theta(spec, self.t_ref)?);
        Ok(Self { t, theta, ..*self })
    }
}

/// Advance `state` to `t`, rejecting steps where the phase moves by `π` or more.
pub fn theta_phase(spec: &GammaFactorSpec, t: f64, state: &ThetaState) -> Result<ThetaState> {
    let next = state.at(spec, t)?;
    let jump = next.theta - state.theta;
    if jump.abs() >= PI {
        return Err(Error::PhaseJump {
            from: state.t,
            to: t,
            jump,
        });
    }
    Ok(next)
}

/// Residual `2θ + arg Δ_F(1/2 + it)` reduced mod `2π`; zero for an exact branch.
pub fn theta_residual(spec: &GammaFactorSpec, state: &ThetaState) -> Result<f64> {
    let ld = ln_delta(spec, Complex64::new(0.5, state.t))?;
    Ok(wrap_phase(2.0 * state.theta + ld.im))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthRow {
    pub sigma: f64,
    pub t: Vec<f64>,
    /// `|Δ_F^{-1/2}(s) F(s)|`
    pub magnitude: Vec<f64>,
    /// magnitude / (Q₁^{1/2} t^{1/2+ε})
    pub ratio: Vec<f64>,
    pub max_ratio: f64,
    /// Least-squares slope of `ln magnitude` against `ln t`.
    pub loglog_slope: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrowthReport {
    pub epsilon: f64,
    pub q1: f64,
    pub rows: Vec<GrowthRow>,
    pub max_ratio: f64,
    pub ratio_limit: Option<f64>,
    /// `(σ, t, ratio)` entries above `ratio_limit`.
    pub violations: Vec<(f64, f64, f64)>,
}

pub(crate) fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    least_squares_line(&lx, &ly).0
}

/// `(slope, intercept)` of the least-squares line through `(x, y)`.
pub(crate) fn least_squares_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Tabulate `|Δ_F^{-1/2}(s) F(s)|` against the convexity scale
/// `Q₁^{1/2} t^{1/2+ε}` over a `(σ, t)` grid.
pub fn growth_diagnostic(
    lf: &LFunction,
    sigma_grid: &[f64],
    t_grid: &[f64],
    epsilon: f64,
    ratio_limit: Option<f64>,
) -> Result<GrowthReport> {
    let q1 = lf.invariants.q1;
    let policy = AfePolicy::default();
    let mut rows = Vec::with_capacity(sigma_grid.len());
    let mut violations = Vec::new();
    for &sigma in sigma_grid {
        let mut magnitude = Vec::with_capacity(t_grid.len());
        let mut ratio = Vec::with_capacity(t_grid.len());
        for &t in t_grid {
            let s = Complex64::new(sigma, t);
            let f = evaluate_f(lf, s, &policy)?.value;
            let scale = (-0.5 * ln_delta(&lf.gamma, s)?.re).exp();
            let m = scale * f.norm();
            let r = m / (q1.sqrt() * t.powf(0.5 + epsilon));
            if ratio_limit.is_some_and(|lim| r > lim) {
                violations.push((sigma, t, r));
            }
            magnitude.push(m);
            ratio.push(r);
        }
        let max_ratio = ratio.iter().cloned().fold(0.0, f64::max);
        let loglog_slope = if t_grid.len() >= 2 {
            loglog_slope(t_grid, &magnitude)
        } else {
            f64::NAN
        };
        rows.push(GrowthRow {
            sigma,
            t: t_grid.to_vec(),
            magnitude,
            ratio,
            max_ratio,
            loglog_slope,
        });
    }
    let max_ratio = rows.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    Ok(GrowthReport {
        epsilon,
        q1,
        rows,
        max_ratio,
        ratio_limit,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selberg::{compute_invariants, GammaFactor};
    use approx::assert_relative_eq;

    fn zeta_type() -> GammaFactorSpec {
        GammaFactorSpec::new(PI.powf(-0.5), vec![GammaFactor::real(0.5, 0.0)], 1.0.into()).unwrap()
    }

    fn dedekind_minus3() -> GammaFactorSpec {
        GammaFactorSpec::new(3f64.sqrt() / (2.0 * PI), vec![GammaFactor::real(1.0, 0.0)], 1.0.into())
            .unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gamma_factor_at_two_for_zeta() {
        let g = gamma_factor(&zeta_type(), c(2.0, 0.0)).unwrap().exp();
        assert_relative_eq!(g.re, 1.0 / PI, max_relative = 1e-14);
        assert_relative_eq!(g.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn gamma_factor_real_on_real_axis() {
        for spec in [zeta_type(), dedekind_minus3()] {
            for x in [0.3, 1.7, 5.0] {
                assert_eq!(gamma_factor(&spec, c(x, 0.0)).unwrap().im, 0.0);
            }
        }
    }

    #[test]
    fn gamma_factor_matches_stirling_on_critical_line() {
        let spec = dedekind_minus3();
        let s = c(0.5, 100.0);
        let exact = gamma_factor(&spec, s).unwrap();
        let stirling = s * spec.q_scale.ln() + stirling_gamma(0.5, 100.0).unwrap();
        assert!(((exact.re - stirling.re).exp() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn gamma_factor_pole_is_reported() {
        assert!(matches!(
            gamma_factor(&zeta_type(), c(-2.0, 0.0)),
            Err(Error::NearPole(_))
        ));
    }

    #[test]
    fn delta_at_half_is_one() {
        for spec in [zeta_type(), dedekind_minus3()] {
            let d = delta(&spec, c(0.5, 0.0)).unwrap();
            assert_relative_eq!(d.re, 1.0, epsilon = 1e-15);
            assert_relative_eq!(d.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn delta_has_unit_modulus_on_critical_line() {
        let d = delta(&dedekind_minus3(), c(0.5, 50.0)).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn delta_reflection_identity() {
        let spec = dedekind_minus3();
        for s in [c(0.2, 7.0), c(1.1, 33.0), c(-0.4, 120.0)] {
            let a = delta(&spec, s).unwrap();
            let b = delta(&spec, (1.0 - s).conj()).unwrap().conj();
            let p = a * b;
            assert!((p - 1.0).norm() < 1e-10, "{s}: {p}");
        }
    }

    #[test]
    fn zeta_delta_is_the_classical_chi() {
        // ζ(s) = Δ(s) ζ(1-s), so Δ(-1) = ζ(-1)/ζ(2) = -1/(2π²).
        let d = delta(&zeta_type(), c(-1.0, 0.0)).unwrap();
        assert_relative_eq!(d.re, -0.5 / (PI * PI), max_relative = 1e-13);
    }

    #[test]
    fn asymptotic_main_term_modulus_one_on_line() {
        let inv = compute_invariants(&dedekind_minus3()).unwrap();
        for t in [5.0, 77.0, 1234.5] {
            let v = delta_asymptotic(&inv, c(0.5, t)).unwrap();
            assert_relative_eq!(v.norm(), 1.0, epsilon = 1e-12);
        }
        assert!(matches!(
            delta_asymptotic(&inv, c(0.5, 1.0)),
            Err(Error::TooSmallT { .. })
        ));
    }

    #[test]
    fn asymptotic_matches_exact_with_order_one_over_t() {
        let spec = dedekind_minus3();
        let inv = compute_invariants(&spec).unwrap();
        let dev = |t: f64| {
            let s = c(0.5, t);
            let exact = delta(&spec, s).unwrap();
            ((exact - delta_asymptotic(&inv, s).unwrap()) / exact).norm()
        };
        assert!(dev(200.0) < 10.0 / 200.0);
        let a = dev(500.0) * 500.0;
        let b = dev(1000.0) * 1000.0;
        assert!(b / a < 2.0 && a / b < 2.0, "{a} {b}");
        assert!(dev(1000.0) < 2.0 / 1000.0);
    }

    #[test]
    fn inverse_square_root_expansion() {
        let spec = dedekind_minus3();
        let inv = compute_invariants(&spec).unwrap();
        let t = 400.0;
        let s = c(0.5, t);
        let approx = delta_inv_sqrt_asymptotic(&inv, s).unwrap();
        let exact = (-0.5 * ln_delta(&spec, s).unwrap()).exp();
        // Equal up to the global sign of the square root.
        let r = approx / exact;
        assert!((r.re.abs() - 1.0).abs() < 5.0 / t && r.im.abs() < 5.0 / t, "{r}");
        assert!(delta_inv_sqrt_asymptotic(&compute_invariants(&zeta_type()).unwrap(), s).is_err());
    }

    #[test]
    fn stirling_modulus_and_decay() {
        let v = stirling_gamma(0.5, 100.0).unwrap();
        assert_relative_eq!(v.re, 0.5 * LN_2PI - 50.0 * PI, max_relative = 1e-15);
        let rel = |sigma: f64, t: f64| {
            let exact = ln_gamma(c(sigma, t)).unwrap();
            (exact - stirling_gamma(sigma, t).unwrap()).exp() - 1.0
        };
        assert!(rel(1.0, 50.0).norm() < 1.0 / 50.0);
        assert!(rel(0.5, 400.0).norm() <= 0.5 * rel(0.5, 200.0).norm() * 1.01);
    }

    #[test]
    fn theta_anchor_and_defining_relation() {
        let spec = dedekind_minus3();
        let anchor = ThetaState::default_anchor(&spec).unwrap();
        assert_eq!(anchor.theta, anchor.branch_offset);
        assert_eq!(anchor.t, THETA_REF_T);
        for t in [2.0, 10.0, 57.3, 999.0] {
            let st = anchor.at(&spec, t).unwrap();
            assert!(theta_residual(&spec, &st).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn theta_monotone_and_continuous_beyond_ten() {
        let spec = dedekind_minus3();
        let mut st = ThetaState::default_anchor(&spec).unwrap();
        let mut t = 10.0;
        while t < 300.0 {
            t += 0.25;
            let next = theta_phase(&spec, t, &st).unwrap();
            assert!(next.theta > st.theta);
            st = next;
        }
        let far = theta_phase(&spec, 400.0, &st);
        assert!(matches!(far, Err(Error::PhaseJump { .. })));
    }

    #[test]
    fn classical_riemann_siegel_theta() {
        // θ(t) = t/2 ln(t/2π) - t/2 - π/8 + 1/(48t) + 7/(5760 t³) + ...
        let spec = zeta_type();
        let st = ThetaState::default_anchor(&spec).unwrap();
        for t in [20.0, 100.0] {
            let want = t / 2.0 * (t / (2.0 * PI)).ln() - t / 2.0 - PI / 8.0
                + 1.0 / (48.0 * t)
                + 7.0 / (5760.0 * t.powi(3));
            assert_relative_eq!(st.at(&spec, t).unwrap().theta, want, epsilon = 1e-8);
        }
    }
}
