//! The oscillatory integrals `J = ∫_T^{T'} t^α (t/(eβ))^{it} dt`.
//!
//! The phase `φ(t) = t ln(t/(eβ))` has `φ'(t) = ln(t/β)`, so `J` is governed
//! by where `β` sits relative to `[T, T']`: away from the interval the
//! integral is endpoint-dominated, inside it there is a stationary point at
//! `t = β` with main term `(2π)^{1/2} β^{α+1/2} e^{i(π/4-β)}`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Half-width of the bands around `T` and `T'` classified as boundary.
pub const BOUNDARY_BAND: f64 = 1.0;

/// Panel budget for one integral.
pub const MAX_PANELS: usize = 4_000_000;

const MIN_FREQUENCY: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscIntegralSpec {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "T_prime")]
    pub t_prime: f64,
}

impl OscIntegralSpec {
    pub fn new(alpha: f64, beta: f64, t: f64, t_prime: f64) -> Result<Self> {
        let spec = Self {
            alpha,
            beta,
            t,
            t_prime,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.alpha.is_finite()
            && self.alpha >= 0.0
            && self.beta.is_finite()
            && self.beta > 0.0
            && self.t.is_finite()
            && self.t > 0.0
            && self.t <= self.t_prime
            && self.t_prime <= 2.0 * self.t;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "need alpha >= 0, beta > 0 and 0 < T <= T' <= 2T, got {self:?}"
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    BetaBelowT,
    Stationary,
    #[serde(rename = "beta_above_tprime")]
    BetaAboveTPrime,
    Boundary,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::BetaBelowT => "beta_below_t",
            Regime::Stationary => "stationary",
            Regime::BetaAboveTPrime => "beta_above_tprime",
            Regime::Boundary => "boundary",
        }
    }
}

pub fn classify(spec: &OscIntegralSpec) -> Regime {
    let b = spec.beta;
    if (b - spec.t).abs() < BOUNDARY_BAND || (b - spec.t_prime).abs() < BOUNDARY_BAND {
        Regime::Boundary
    } else if b < spec.t {
        Regime::BetaBelowT
    } else if b > spec.t_prime {
        Regime::BetaAboveTPrime
    } else {
        Regime::Stationary
    }
}

fn integrand(spec: &OscIntegralSpec, t: f64) -> Complex64 {
    let phase = t * ((t / spec.beta).ln() - 1.0);
    Complex64::from_polar(t.powf(spec.alpha), phase)
}

/// What a panel on `[x, y]` can resolve at all: the phase is only known to
/// `ε |phase|` and the amplitude scales that error.
fn roundoff_floor(spec: &OscIntegralSpec, x: f64, y: f64) -> f64 {
    let phase = |t: f64| (t * ((t / spec.beta).ln() - 1.0)).abs();
    let amplitude = x.powf(spec.alpha).max(y.powf(spec.alpha));
    32.0 * f64::EPSILON * (1.0 + phase(x).max(phase(y))) * amplitude * (y - x)
}

/// Largest panel width starting at `t`: the phase may turn by at most `π`.
fn panel_width(spec: &OscIntegralSpec, t: f64) -> f64 {
    let w = |x: f64| PI / (x / spec.beta).ln().abs().max(MIN_FREQUENCY);
    let first = w(t);
    first.min(w(t + first))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadrature {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// `J` with estimated absolute error at most `tol`, on oscillation-capped
/// panels with a 20-point rule checked against a 10-point rule; panels that
/// miss their share of the tolerance are bisected. A panel's share never
/// drops below its roundoff floor, so very tight `tol` at large `T` degrades
/// to the best attainable accuracy instead of bisecting forever.
pub fn osc_quadrature(spec: &OscIntegralSpec, tol: f64) -> Result<Quadrature> {
    osc_quadrature_with_budget(spec, tol, MAX_PANELS)
}

pub fn osc_quadrature_with_budget(
    spec: &OscIntegralSpec,
    tol: f64,
    max_panels: usize,
) -> Result<Quadrature> {
    spec.validate()?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let length = spec.t_prime - spec.t;
    if length == 0.0 {
        return Ok(Quadrature {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            panels: 0,
        });
    }
    let hi = GaussLegendre::new(20);
    let lo = GaussLegendre::new(10);
    let mut value = Complex64::new(0.0, 0.0);
    let mut error = 0.0;
    let mut panels = 0usize;
    let mut stack: Vec<(f64, f64)> = Vec::new();
    let mut a = spec.t;
    while a < spec.t_prime {
        let b = (a + panel_width(spec, a)).min(spec.t_prime);
        stack.push((a, b));
        while let Some((x, y)) = stack.pop() {
            panels += 1;
            if panels > max_panels {
                return Err(Error::QuadratureBudget {
                    tol,
                    estimate: error,
                    panels,
                });
            }
            let f = |t: f64| integrand(spec, t);
            let v_hi: Complex64 = hi.integrate(x, y, f);
            let v_lo: Complex64 = lo.integrate(x, y, f);
            let e = (v_hi - v_lo).norm();
            let share = (tol * (y - x) / length).max(roundoff_floor(spec, x, y));
            if e <= share || (y - x) < 1e-9 * spec.t {
                value += v_hi;
                error += e;
            } else {
                let m = 0.5 * (x + y);
                stack.push((m, y));
                stack.push((x, m));
            }
        }
        a = b;
    }
    Ok(Quadrature {
        value,
        error_estimate: error,
        panels,
    })
}

/// `(2π)^{1/2} β^{α+1/2} e^{i(π/4-β)}`, for `T < β < T'`.
pub fn stationary_main_term(spec: &OscIntegralSpec) -> Result<Complex64> {
    if !(spec.t < spec.beta && spec.beta < spec.t_prime) {
        return Err(Error::InvalidArgument(format!(
            "stationary main term needs T < beta < T', got beta={} on [{}, {}]",
            spec.beta, spec.t, spec.t_prime
        )));
    }
    Ok(main_term_value(spec.alpha, spec.beta))
}

fn main_term_value(alpha: f64, beta: f64) -> Complex64 {
    Complex64::from_polar(
        (2.0 * PI).sqrt() * beta.powf(alpha + 0.5),
        PI / 4.0 - beta,
    )
}

/// The regime's bound without its constant:
/// `T^α/ln(T/β)`, `T^{α+2/5}` (for `|J - main|`), `T^α/ln(β/T')`, or the
/// universal `T^{α+1/2}` in the boundary bands.
pub fn bound_shape(spec: &OscIntegralSpec, regime: Regime) -> f64 {
    let ta = spec.t.powf(spec.alpha);
    match regime {
        Regime::BetaBelowT => ta / (spec.t / spec.beta).ln(),
        Regime::Stationary => spec.t.powf(spec.alpha + 0.4),
        Regime::BetaAboveTPrime => ta / (spec.beta / spec.t_prime).ln(),
        Regime::Boundary => universal_shape(spec),
    }
}

pub fn universal_shape(spec: &OscIntegralSpec) -> f64 {
    spec.t.powf(spec.alpha + 0.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscIntegralResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub regime: Regime,
    pub main_term: Option<Complex64>,
    /// Quantity the regime bound controls: `|J|`, or `|J - main|` when stationary.
    pub measured: f64,
    pub shape: f64,
    /// `shape` times the constant, when one was supplied.
    pub bound: Option<f64>,
}

pub fn evaluate(spec: &OscIntegralSpec, tol: f64, constant: Option<f64>) -> Result<OscIntegralResult> {
    let q = osc_quadrature(spec, tol)?;
    let regime = classify(spec);
    let main_term = match regime {
        Regime::Stationary => Some(stationary_main_term(spec)?),
        _ => None,
    };
    let measured = match main_term {
        Some(m) => (q.value - m).norm(),
        None => q.value.norm(),
    };
    let shape = bound_shape(spec, regime);
    Ok(OscIntegralResult {
        value: q.value,
        error_estimate: q.error_estimate,
        regime,
        main_term,
        measured,
        shape,
        bound: constant.map(|c| c * shape),
    })
}

/// Default sweep: for each `α`, each `T` slice and each regime, five values of
/// `T'/T` times ten placements of `β`.
pub fn default_grid(alphas: &[f64], t_slices: &[f64]) -> Vec<OscIntegralSpec> {
    let ratios = [1.1, 1.25, 1.5, 1.75, 2.0];
    let fractions = [0.01, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.8, 0.9];
    let mut out = Vec::new();
    for &alpha in alphas {
        for &t in t_slices {
            for r in ratios {
                let tp = t * r;
                for (j, f) in fractions.iter().enumerate() {
                    out.push(OscIntegralSpec { alpha, beta: t * f, t, t_prime: tp });
                    out.push(OscIntegralSpec { alpha, beta: tp / f, t, t_prime: tp });
                    let u = 0.1 + 0.8 * j as f64 / 9.0;
                    out.push(OscIntegralSpec { alpha, beta: t + u * (tp - t), t, t_prime: tp });
                }
                for offset in [-0.9, -0.5, 0.0, 0.5, 0.9] {
                    out.push(OscIntegralSpec { alpha, beta: t + offset, t, t_prime: tp });
                    out.push(OscIntegralSpec { alpha, beta: tp + offset, t, t_prime: tp });
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridRow {
    pub spec: OscIntegralSpec,
    pub abs_j: f64,
    pub measured: f64,
    pub shape: f64,
    pub ratio: f64,
    pub universal_ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegimeTable {
    pub regime: Regime,
    pub alpha: f64,
    /// Sup of `measured/shape` on the smallest `T` slice.
    pub fitted_constant: f64,
    /// `(T, sup ratio)` per slice.
    pub slices: Vec<(f64, f64)>,
    /// Every slice's sup is at most twice the fitted constant.
    pub holds: bool,
    /// Every slice's sup is within a factor two of the fitted constant.
    pub stable: bool,
    pub rows: Vec<GridRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma1Report {
    pub tol: f64,
    pub tables: Vec<RegimeTable>,
    /// Per `α`: the universal bound table over every grid point.
    pub universal: Vec<RegimeTable>,
    /// Per `α`: fitted constant above `T'` over the one below `T`.
    pub mirror_ratio: BTreeMap<String, f64>,
}

impl Lemma1Report {
    pub fn table(&self, regime: Regime, alpha: f64) -> Option<&RegimeTable> {
        self.tables
            .iter()
            .find(|t| t.regime == regime && t.alpha == alpha)
    }

    pub fn universal(&self, alpha: f64) -> Option<&RegimeTable> {
        self.universal.iter().find(|t| t.alpha == alpha)
    }
}

fn summarize(regime: Regime, alpha: f64, rows: Vec<GridRow>, pick: impl Fn(&GridRow) -> f64) -> RegimeTable {
    let mut by_t: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    for r in &rows {
        let e = by_t.entry(r.spec.t.to_bits()).or_insert((r.spec.t, 0.0));
        e.1 = e.1.max(pick(r));
    }
    let mut slices: Vec<(f64, f64)> = by_t.into_values().collect();
    slices.sort_by(|a, b| a.0.total_cmp(&b.0));
    let fitted = slices.first().map_or(f64::NAN, |s| s.1);
    let holds = slices.iter().all(|s| s.1 <= 2.0 * fitted);
    let stable = slices.iter().all(|s| s.1 <= 2.0 * fitted && s.1 >= 0.5 * fitted);
    RegimeTable {
        regime,
        alpha,
        fitted_constant: fitted,
        slices,
        holds,
        stable,
        rows,
    }
}

/// Sweep the grid, fit each regime's constant on the smallest `T` slice and
/// check it against the larger slices.
pub fn verify_lemma1(grid: &[OscIntegralSpec], tol: f64) -> Result<Lemma1Report> {
    let results: Vec<Result<(OscIntegralSpec, OscIntegralResult)>> = grid
        .par_iter()
        .map(|s| evaluate(s, tol, None).map(|r| (*s, r)))
        .collect();
    let mut rows: Vec<(Regime, GridRow)> = Vec::with_capacity(grid.len());
    for r in results {
        let (spec, res) = r?;
        let abs_j = res.value.norm();
        rows.push((
            res.regime,
            GridRow {
                spec,
                abs_j,
                measured: res.measured,
                shape: res.shape,
                ratio: res.measured / res.shape,
                universal_ratio: abs_j / universal_shape(&spec),
            },
        ));
    }
    let mut alphas: Vec<f64> = grid.iter().map(|s| s.alpha).collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup();

    let mut tables = Vec::new();
    let mut universal = Vec::new();
    let mut mirror_ratio = BTreeMap::new();
    for &alpha in &alphas {
        for regime in [Regime::BetaBelowT, Regime::Stationary, Regime::BetaAboveTPrime] {
            let sel: Vec<GridRow> = rows
                .iter()
                .filter(|(g, r)| *g == regime && r.spec.alpha == alpha)
                .map(|(_, r)| r.clone())
                .collect();
            if !sel.is_empty() {
                tables.push(summarize(regime, alpha, sel, |r| r.ratio));
            }
        }
        let all: Vec<GridRow> = rows
            .iter()
            .filter(|(_, r)| r.spec.alpha == alpha)
            .map(|(_, r)| r.clone())
            .collect();
        universal.push(summarize(Regime::Boundary, alpha, all, |r| r.universal_ratio));
        let find = |g: Regime| {
            tables
                .iter()
                .find(|t: &&RegimeTable| t.regime == g && t.alpha == alpha)
                .map(|t| t.fitted_constant)
        };
        if let (Some(b), Some(a)) = (find(Regime::BetaBelowT), find(Regime::BetaAboveTPrime)) {
            mirror_ratio.insert(format!("{alpha}"), a / b);
        }
    }
    Ok(Lemma1Report {
        tol,
        tables,
        universal,
        mirror_ratio,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationarySlope {
    pub alpha: f64,
    pub t: Vec<f64>,
    pub error: Vec<f64>,
    /// `error / T^{α+2/5}`
    pub scaled: Vec<f64>,
    pub slope: f64,
}

/// `|J - main|` at `β = 1.5 T`, `T' = 2T` over `ts`, with its log-log slope.
pub fn stationary_error_slope(alpha: f64, ts: &[f64], tol: f64) -> Result<StationarySlope> {
    let mut error = Vec::with_capacity(ts.len());
    for &t in ts {
        let spec = OscIntegralSpec::new(alpha, 1.5 * t, t, 2.0 * t)?;
        let r = evaluate(&spec, tol, None)?;
        error.push(r.measured);
    }
    let scaled = ts
        .iter()
        .zip(&error)
        .map(|(t, e)| e / t.powf(alpha + 0.4))
        .collect();
    let slope = crate::gamma_delta::loglog_slope(ts, &error);
    Ok(StationarySlope {
        alpha,
        t: ts.to_vec(),
        error,
        scaled,
        slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(alpha: f64, beta: f64, t: f64, tp: f64) -> OscIntegralSpec {
        OscIntegralSpec::new(alpha, beta, t, tp).unwrap()
    }

    #[test]
    fn validation() {
        assert!(OscIntegralSpec::new(0.5, 1.0, 10.0, 25.0).is_err());
        assert!(OscIntegralSpec::new(0.5, 1.0, 10.0, 9.0).is_err());
        assert!(OscIntegralSpec::new(-0.5, 1.0, 10.0, 15.0).is_err());
        assert!(OscIntegralSpec::new(0.5, 0.0, 10.0, 15.0).is_err());
        assert!(OscIntegralSpec::new(0.0, 1.0, 10.0, 10.0).is_ok());
    }

    #[test]
    fn empty_interval_is_zero() {
        let q = osc_quadrature(&spec(1.0, 3.0, 10.0, 10.0), 1e-10).unwrap();
        assert_eq!(q.value, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&spec(0.0, 5.0, 10.0, 20.0)), Regime::BetaBelowT);
        assert_eq!(classify(&spec(0.0, 15.0, 10.0, 20.0)), Regime::Stationary);
        assert_eq!(classify(&spec(0.0, 25.0, 10.0, 20.0)), Regime::BetaAboveTPrime);
        assert_eq!(classify(&spec(0.0, 10.5, 10.0, 20.0)), Regime::Boundary);
        assert_eq!(classify(&spec(0.0, 19.2, 10.0, 20.0)), Regime::Boundary);
    }

    #[test]
    fn matches_closed_form_for_linear_phase_limit() {
        // Against a fine composite rule with no oscillation control.
        let s = spec(0.5, 3.0, 10.0, 14.0);
        let q = osc_quadrature(&s, 1e-12).unwrap();
        let n = 200_000;
        let h = (s.t_prime - s.t) / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n {
            let x = s.t + (k as f64 + 0.5) * h;
            acc += integrand(&s, x) * h;
        }
        assert!((q.value - acc).norm() < 1e-6, "{} {}", q.value, acc);
    }

    #[test]
    fn main_term_properties() {
        let s = spec(0.5, 150.0, 100.0, 200.0);
        let m = stationary_main_term(&s).unwrap();
        assert_relative_eq!(m.norm(), (2.0 * PI).sqrt() * 150f64.powf(1.0), max_relative = 1e-14);
        let z = main_term_value(0.5, PI / 4.0);
        assert!(z.re > 0.0 && z.im.abs() < 1e-15 * z.re);
        assert!(stationary_main_term(&spec(0.5, 90.0, 100.0, 200.0)).is_err());
    }

    #[test]
    fn stationary_main_term_dominates() {
        let s = spec(0.5, 150.0, 100.0, 200.0);
        let r = evaluate(&s, 1e-8, None).unwrap();
        let m = r.main_term.unwrap();
        assert!(r.measured < 0.2 * m.norm());
    }

    #[test]
    fn budget_overflow_is_reported() {
        let s = spec(1.0, 1.0, 1e4, 2e4);
        assert!(matches!(
            osc_quadrature_with_budget(&s, 1e-9, 100),
            Err(Error::QuadratureBudget { .. })
        ));
    }
}
