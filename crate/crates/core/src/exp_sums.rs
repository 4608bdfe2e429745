//! Twisted exponential sums `Σ_{n≤x} a(n) e(nα)` and finite diagnostics for
//! the arithmetic hypotheses on the coefficients (prime mean values, local
//! factors bounded below, `Σ |a(n)|²/n` growth, orthogonality over primes).
//!
//! Every pass/fail verdict compares a statistic with a threshold read from
//! `data/thresholds.toml`; nothing here is tuned at run time.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::primes_up_to;
use crate::coefficients::{euler_factor, CoefficientSeries};
use crate::error::{Error, Result};
use crate::gamma_delta::least_squares_line;
use crate::lfunction::LFunction;

/// Powers of ten from `10²` to `10⁶`.
pub const DEFAULT_CHECKPOINTS: [usize; 5] = [100, 1_000, 10_000, 100_000, 1_000_000];

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, v: Complex64) {
        let (re, cre) = neumaier(self.sum.re, self.carry.re, v.re);
        let (im, cim) = neumaier(self.sum.im, self.carry.im, v.im);
        self.sum = Complex64::new(re, im);
        self.carry = Complex64::new(cre, cim);
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }
}

fn neumaier(sum: f64, carry: f64, v: f64) -> (f64, f64) {
    let t = sum + v;
    let c = if sum.abs() >= v.abs() {
        (sum - t) + v
    } else {
        (v - t) + sum
    };
    (t, carry + c)
}

/// `e(nα)` with the phase reduced mod 1 before scaling by 2π.
fn twist(n: usize, alpha: f64) -> Complex64 {
    let frac = (n as f64 * alpha).rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * frac)
}

/// The frequency `1/√q` of the twisted sum attached to `F`.
pub fn critical_alpha(lf: &LFunction) -> f64 {
    1.0 / lf.invariants.conductor.sqrt()
}

/// `S(x) = Σ_{n≤x} a(n) e(nα)`.
pub fn weyl_sum(series: &CoefficientSeries, alpha: f64, x: usize) -> Result<Complex64> {
    if x > 0 {
        series.ensure_covers(x)?;
    }
    let mut acc = CompensatedSum::new();
    for n in 1..=x {
        acc.add(series.get(n) * twist(n, alpha));
    }
    Ok(acc.value())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayProfile {
    pub alpha: f64,
    /// `(x, |S(x)|/x)`.
    pub checkpoints: Vec<(usize, f64)>,
}

impl DecayProfile {
    pub fn ratios(&self) -> Vec<f64> {
        self.checkpoints.iter().map(|c| c.1).collect()
    }

    /// Ratio strictly smaller at each successive checkpoint with `x >= from`.
    pub fn strictly_decreasing_from(&self, from: usize) -> bool {
        let tail: Vec<f64> = self
            .checkpoints
            .iter()
            .filter(|c| c.0 >= from)
            .map(|c| c.1)
            .collect();
        tail.windows(2).all(|w| w[1] < w[0])
    }

    /// Ratio at `x` if it is a checkpoint.
    pub fn ratio_at(&self, x: usize) -> Option<f64> {
        self.checkpoints.iter().find(|c| c.0 == x).map(|c| c.1)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,ratio\n");
        for (x, r) in &self.checkpoints {
            let _ = writeln!(out, "{x},{r:e}");
        }
        out
    }
}

/// `|S(x)|/x` at each checkpoint, in one pass up to the largest.
pub fn decay_profile(series: &CoefficientSeries, alpha: f64, checkpoints: &[usize]) -> Result<DecayProfile> {
    if checkpoints.windows(2).any(|w| w[1] <= w[0]) || checkpoints.first() == Some(&0) {
        return Err(Error::InvalidArgument(
            "checkpoints must be positive and strictly increasing".into(),
        ));
    }
    let Some(&last) = checkpoints.last() else {
        return Ok(DecayProfile { alpha, checkpoints: Vec::new() });
    };
    series.ensure_covers(last)?;
    let mut acc = CompensatedSum::new();
    let mut out = Vec::with_capacity(checkpoints.len());
    let mut next = checkpoints.iter().peekable();
    for n in 1..=last {
        acc.add(series.get(n) * twist(n, alpha));
        if next.peek() == Some(&&n) {
            out.push((n, acc.value().norm() / n as f64));
            next.next();
        }
    }
    Ok(DecayProfile { alpha, checkpoints: out })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionKind {
    Cond1,
    Cond2,
    Cond3,
    Cond4,
    MeanSquare,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub which: ConditionKind,
    pub statistic: BTreeMap<String, f64>,
    /// Per grid point `(x, value)`; for condition 2 `x` is `t`.
    pub series: Vec<(f64, f64)>,
    pub pass: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Thresholds {
    pub decay: DecayThresholds,
    pub condition1: BandThreshold,
    pub condition2: Condition2Threshold,
    pub condition3: Condition3Threshold,
    pub condition4: Condition4Threshold,
    pub mean_square: MeanSquareThreshold,
}

#[derive(Debug, Clone, Deserialize)]
pub struct DecayThresholds {
    pub from: usize,
    pub to: usize,
    pub max_ratio: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct BandThreshold {
    pub band: [f64; 2],
}

#[derive(Debug, Clone, Deserialize)]
pub struct Condition2Threshold {
    pub min_modulus: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Condition3Threshold {
    pub min_slope: f64,
    pub stability: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct Condition4Threshold {
    pub max_spread: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct MeanSquareThreshold {
    pub median_factor: f64,
}

pub fn thresholds() -> &'static Thresholds {
    static CELL: OnceLock<Thresholds> = OnceLock::new();
    CELL.get_or_init(|| {
        toml::from_str(include_str!("../data/thresholds.toml")).expect("bundled thresholds parse")
    })
}

fn check_grid(series: &CoefficientSeries, grid: &[usize]) -> Result<()> {
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("grid must be strictly increasing".into()));
    }
    match grid.last() {
        Some(&x) if x > 0 => series.ensure_covers(x),
        _ => Ok(()),
    }
}

/// Running sums of `term(n)` sampled at the grid points.
fn running_sums<F>(grid: &[usize], mut term: F) -> Vec<Complex64>
where
    F: FnMut(usize) -> Option<Complex64>,
{
    let mut acc = CompensatedSum::new();
    let mut out = Vec::with_capacity(grid.len());
    let mut n = 0;
    for &x in grid {
        while n < x {
            n += 1;
            if let Some(v) = term(n) {
                acc.add(v);
            }
        }
        out.push(acc.value());
    }
    out
}

fn prime_mask(limit: usize) -> Vec<bool> {
    let mut mask = vec![false; limit + 1];
    for p in primes_up_to(limit) {
        mask[p] = true;
    }
    mask
}

/// `Σ_{p≤x} |a(p)|² log p / x` over the grid.
pub fn condition1_sum(series: &CoefficientSeries, x_grid: &[usize]) -> Result<ConditionReport> {
    check_grid(series, x_grid)?;
    let limit = x_grid.last().copied().unwrap_or(0);
    let is_prime = prime_mask(limit);
    let sums = running_sums(x_grid, |n| {
        is_prime[n].then(|| Complex64::new(series.get(n).norm_sqr() * (n as f64).ln(), 0.0))
    });
    let points: Vec<(f64, f64)> = x_grid
        .iter()
        .zip(&sums)
        .map(|(&x, s)| (x as f64, if x == 0 { 0.0 } else { s.re / x as f64 }))
        .collect();
    let last = points.last().map_or(0.0, |p| p.1);
    let band = thresholds().condition1.band;
    let mut statistic = BTreeMap::new();
    statistic.insert("ratio_at_max_x".into(), last);
    Ok(ConditionReport {
        which: ConditionKind::Cond1,
        statistic,
        series: points,
        pass: !x_grid.is_empty() && (band[0]..=band[1]).contains(&last),
    })
}

/// Minimum of `|Σ_{m≤M} a(p^m) p^{-m(1/2+it)}|` over `p ≤ prime_cut` and the
/// `t` grid.
pub fn condition2_min(
    series: &CoefficientSeries,
    t_grid: &[f64],
    prime_cut: u64,
    order: u32,
) -> Result<ConditionReport> {
    let primes = primes_up_to(prime_cut as usize);
    let per_t: Vec<(f64, f64)> = t_grid
        .par_iter()
        .map(|&t| {
            let s = Complex64::new(0.5, t);
            let mut min = f64::INFINITY;
            for &p in &primes {
                min = min.min(euler_factor(series, p as u64, s, order)?.norm());
            }
            Ok((t, min))
        })
        .collect::<Result<_>>()?;
    let min = per_t.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let min = if per_t.is_empty() || primes.is_empty() { 1.0 } else { min };
    let mut statistic = BTreeMap::new();
    statistic.insert("min_modulus".into(), min);
    Ok(ConditionReport {
        which: ConditionKind::Cond2,
        statistic,
        series: per_t,
        pass: min > thresholds().condition2.min_modulus,
    })
}

/// Least-squares fit of `Σ_{n≤x} |a(n)|²/n ≈ A log x + B` over the grid.
pub fn condition3_fit(series: &CoefficientSeries, x_grid: &[usize]) -> Result<ConditionReport> {
    if x_grid.len() < 3 || x_grid[0] == 0 {
        return Err(Error::InvalidArgument(
            "condition 3 needs at least three positive grid points".into(),
        ));
    }
    check_grid(series, x_grid)?;
    let sums = running_sums(x_grid, |n| {
        Some(Complex64::new(series.get(n).norm_sqr() / n as f64, 0.0))
    });
    let lx: Vec<f64> = x_grid.iter().map(|&x| (x as f64).ln()).collect();
    let y: Vec<f64> = sums.iter().map(|s| s.re).collect();
    let (a, b) = least_squares_line(&lx, &y);
    let residual = lx
        .iter()
        .zip(&y)
        .map(|(l, v)| (v - a * l - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let mut statistic = BTreeMap::new();
    statistic.insert("A".into(), a);
    statistic.insert("B".into(), b);
    statistic.insert("residual".into(), residual);
    Ok(ConditionReport {
        which: ConditionKind::Cond3,
        statistic,
        series: x_grid.iter().map(|&x| x as f64).zip(y).collect(),
        pass: a > thresholds().condition3.min_slope,
    })
}

/// Fit condition 3 on two grids and compare the slopes.
pub fn condition3_stability(
    series: &CoefficientSeries,
    grid_a: &[usize],
    grid_b: &[usize],
) -> Result<ConditionReport> {
    let fa = condition3_fit(series, grid_a)?;
    let fb = condition3_fit(series, grid_b)?;
    let (a1, a2) = (fa.statistic["A"], fb.statistic["A"]);
    let drift = (a2 - a1).abs() / a1.abs().max(f64::MIN_POSITIVE);
    let mut statistic = BTreeMap::new();
    statistic.insert("A_first".into(), a1);
    statistic.insert("A_second".into(), a2);
    statistic.insert("relative_drift".into(), drift);
    let mut series_out = fa.series;
    series_out.extend(fb.series);
    Ok(ConditionReport {
        which: ConditionKind::Cond3,
        statistic,
        series: series_out,
        pass: fa.pass && fb.pass && drift <= thresholds().condition3.stability,
    })
}

/// Fit condition 3 on the grid without its last point and on the grid
/// without its first point.
pub fn condition3_shifted(series: &CoefficientSeries, x_grid: &[usize]) -> Result<ConditionReport> {
    if x_grid.len() < 4 {
        return Err(Error::InvalidArgument(
            "a shifted condition 3 fit needs at least four grid points".into(),
        ));
    }
    condition3_stability(series, &x_grid[..x_grid.len() - 1], &x_grid[1..])
}

/// `Σ_{n≤x} |a(n)|² / x` over the grid; passes when the value at the largest
/// `x` is within the frozen factor of the median.
pub fn mean_square_check(series: &CoefficientSeries, x_grid: &[usize]) -> Result<ConditionReport> {
    check_grid(series, x_grid)?;
    if x_grid.first() == Some(&0) {
        return Err(Error::InvalidArgument("grid points must be positive".into()));
    }
    let sums = running_sums(x_grid, |n| Some(Complex64::new(series.get(n).norm_sqr(), 0.0)));
    let values: Vec<f64> = x_grid.iter().zip(&sums).map(|(&x, s)| s.re / x as f64).collect();
    let mut sorted = values.clone();
    sorted.sort_by(f64::total_cmp);
    let median = match sorted.len() {
        0 => 0.0,
        n if n % 2 == 1 => sorted[n / 2],
        n => 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]),
    };
    let max = sorted.last().copied().unwrap_or(0.0);
    let last = values.last().copied().unwrap_or(0.0);
    let factor = thresholds().mean_square.median_factor;
    let mut statistic = BTreeMap::new();
    statistic.insert("max".into(), max);
    statistic.insert("median".into(), median);
    statistic.insert("last".into(), last);
    statistic.insert("last_over_median".into(), if median > 0.0 { last / median } else { 0.0 });
    Ok(ConditionReport {
        which: ConditionKind::MeanSquare,
        statistic,
        series: x_grid.iter().map(|&x| x as f64).zip(values).collect(),
        pass: !x_grid.is_empty() && last <= factor * median,
    })
}

/// Partial sums `Σ_{p≤x} a(p) conj(b(p)) / p`; passes when their spread
/// (largest pairwise distance) stays inside the frozen band.
pub fn selberg_orthogonality(
    series_a: &CoefficientSeries,
    series_b: &CoefficientSeries,
    x_grid: &[usize],
) -> Result<ConditionReport> {
    check_grid(series_a, x_grid)?;
    check_grid(series_b, x_grid)?;
    let limit = x_grid.last().copied().unwrap_or(0);
    let is_prime = prime_mask(limit);
    let sums = running_sums(x_grid, |n| {
        is_prime[n].then(|| series_a.get(n) * series_b.get(n).conj() / n as f64)
    });
    let mut spread: f64 = 0.0;
    for (i, a) in sums.iter().enumerate() {
        for b in &sums[i + 1..] {
            spread = spread.max((a - b).norm());
        }
    }
    let mut statistic = BTreeMap::new();
    statistic.insert("spread".into(), spread);
    if let Some(last) = sums.last() {
        statistic.insert("last_re".into(), last.re);
        statistic.insert("last_im".into(), last.im);
    }
    Ok(ConditionReport {
        which: ConditionKind::Cond4,
        statistic,
        series: x_grid.iter().zip(&sums).map(|(&x, s)| (x as f64, s.re)).collect(),
        pass: spread <= thresholds().condition4.max_spread,
    })
}
