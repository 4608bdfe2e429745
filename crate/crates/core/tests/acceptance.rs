//! End-to-end acceptance checks. Prints one PASS/FAIL line per check and
//! exits non-zero if any check fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use selberg_lab::exp_sums::{
    condition3_shifted, decay_profile, mean_square_check, selberg_orthogonality, thresholds,
};
use selberg_lab::gamma_delta::{delta, delta_asymptotic};
use selberg_lab::hardy::{hardy_integrals, sample_grid, scan_sign_changes, StepPolicy};
use selberg_lab::oscillatory::{default_grid, stationary_error_slope, verify_lemma1};
use selberg_lab::{Definition, LFunction};

const SHIPPED: [&str; 3] = ["zeta_chi3", "chi3_chi4", "zeta_sq"];
const OSC_TOL: f64 = 1e-6;

type Check = (&'static str, Option<u64>, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn sci(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.4e}")).collect::<Vec<_>>().join(", ")
}

fn shipped(name: &str) -> Definition {
    Definition::shipped(name).expect("bundled definition")
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let took = start.elapsed();
    out.detail = format!("{} [{:.1}s]", out.detail, took.as_secs_f64());
    if let Some(limit) = limit {
        if took > limit {
            out.pass = false;
            out.detail = format!("{} exceeds {}s", out.detail, limit.as_secs());
        }
    }
    out
}

fn modulus_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for name in SHIPPED {
        let lf = shipped(name).build().unwrap();
        for k in 0..1000 {
            let t = 2.0 + (1e4 - 2.0) * k as f64 / 999.0;
            let d = delta(&lf.gamma, Complex64::new(0.5, t)).unwrap();
            worst = worst.max((d.norm() - 1.0).abs());
        }
    }
    Outcome {
        pass: worst < 1e-10,
        detail: format!("max ||Δ(1/2+it)| - 1| = {worst:.2e} over 3 x 1000 points in [2, 1e4]"),
    }
}

fn asymptotic_expansion() -> Outcome {
    let lf = shipped("zeta_chi3").build().unwrap();
    let scaled: Vec<f64> = [125.0, 250.0, 500.0, 1000.0]
        .iter()
        .map(|&t| {
            let s = Complex64::new(0.5, t);
            let exact = delta(&lf.gamma, s).unwrap();
            let approx = delta_asymptotic(&lf.invariants, s).unwrap();
            t * (approx - exact).norm() / exact.norm()
        })
        .collect();
    let max = scaled.iter().copied().fold(0.0, f64::max);
    let min = scaled.iter().copied().fold(f64::INFINITY, f64::min);
    Outcome {
        pass: min > 0.0 && max <= 2.0 * min,
        detail: format!("t·rel.dev at t = 125..1000: [{}], max/min = {:.3}", sci(&scaled), max / min),
    }
}

fn realness() -> Outcome {
    let mut failures = 0;
    let mut worst: f64 = 0.0;
    for name in SHIPPED {
        let lf = shipped(name).build_for_height(500.0).unwrap();
        for s in sample_grid(&lf, 2.0, 500.0, 10_000).unwrap() {
            let scaled = s.imag_residual.abs() / (1.0 + s.z.abs());
            worst = worst.max(scaled);
            if scaled > 1e-6 {
                failures += 1;
            }
        }
    }
    Outcome {
        pass: failures == 0,
        detail: format!("max |Im|/(1+|Z|) = {worst:.2e}, {failures} violations over 3 x 10^4 points"),
    }
}

fn zero_oracle() -> Outcome {
    let lf = shipped("zeta_chi3").build_for_height(60.0).unwrap();
    let scan = scan_sign_changes(&lf, 0.5, 60.0, &StepPolicy::default()).unwrap();
    let got = scan.zeros();
    let mut want = common::Character::trivial().zeros(0.5, 60.0, 0.05);
    want.extend(common::Character::mod3().zeros(0.5, 60.0, 0.05));
    want.sort_by(f64::total_cmp);
    let max_dev = got
        .iter()
        .zip(&want)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Outcome {
        pass: got.len() == want.len() && max_dev < 1e-6,
        detail: format!(
            "{} sign changes vs {} oracle zeros, max location deviation {max_dev:.2e}",
            got.len(),
            want.len()
        ),
    }
}

fn stationary_phase() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for alpha in [0.0, 0.5, 1.0] {
        let s = stationary_error_slope(alpha, &[100.0, 400.0, 1600.0], OSC_TOL).unwrap();
        let c = s.scaled[0];
        let bounded = s.scaled.iter().all(|&v| v <= 2.0 * c);
        let predicted = alpha + 0.4;
        let slope_ok = (s.slope - predicted).abs() <= 0.1;
        pass &= bounded && slope_ok;
        parts.push(format!(
            "α={alpha}: C={c:.3} bounded={bounded} slope={:.3} (predicted {predicted:.1} ± 0.1)",
            s.slope
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn regime_bounds() -> Outcome {
    let grid = default_grid(&[0.0, 0.5, 1.0], &[100.0, 1000.0, 10_000.0]);
    let report = verify_lemma1(&grid, OSC_TOL).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for t in report.tables.iter().chain(&report.universal) {
        pass &= t.holds;
        let worst = t.slices.iter().map(|s| s.1 / t.fitted_constant).fold(0.0, f64::max);
        parts.push(format!("{}/α={} x{:.2}", t.regime.name(), t.alpha, worst));
    }
    let per_regime = report.tables[0].rows.len() / 3;
    Outcome {
        pass,
        detail: format!("{per_regime} points per regime and slice; worst slice/fit: {}", parts.join(", ")),
    }
}

fn exponential_sum_decay() -> Outcome {
    let lf = shipped("zeta_chi3").with_table_len(1_000_000).unwrap().build().unwrap();
    let alpha = 1.0 / 3f64.sqrt();
    let prof = decay_profile(&lf.series, alpha, &[1_000, 10_000, 100_000, 1_000_000]).unwrap();
    let limits = &thresholds().decay;
    let first = prof.ratio_at(limits.from).unwrap();
    let last = prof.ratio_at(limits.to).unwrap();
    Outcome {
        pass: prof.strictly_decreasing_from(limits.from) && last < limits.max_ratio * first,
        detail: format!("|S(x)|/x at 1e3..1e6: [{}]", sci(&prof.ratios())),
    }
}

fn hardy_experiment() -> Outcome {
    let def = shipped("zeta_chi3");
    let lf = def.build_for_height(800.0).unwrap();
    let mut rows = Vec::new();
    for t in [50.0, 100.0, 200.0, 400.0] {
        let r = hardy_integrals(&lf, t).unwrap();
        rows.push((t, r.i.abs() / t, r.i_abs / t, r.residual_failures));
    }
    let decreasing = rows.windows(2).all(|w| w[1].1 < w[0].1);
    let floor = rows.iter().all(|r| r.2 > 0.5 * rows[0].2);
    let clean = rows.iter().all(|r| r.3 == 0);
    let table: Vec<String> = rows
        .iter()
        .map(|r| format!("T={}: |I|/T={:.5} I_abs/T={:.4}", r.0, r.1, r.2))
        .collect();
    Outcome {
        pass: decreasing && floor && clean,
        detail: format!(
            "N={}; {}; |I|/T decreasing={decreasing}, I_abs/T floor={floor}",
            lf.series.len(),
            table.join(", ")
        ),
    }
}

fn negative_control() -> Outcome {
    let grid = [1_000, 10_000, 100_000, 1_000_000];
    let mut verdicts = Vec::new();
    for name in SHIPPED {
        let lf = shipped(name).with_table_len(1_000_000).unwrap().build().unwrap();
        let r = mean_square_check(&lf.series, &grid).unwrap();
        verdicts.push((name, r.pass, r.statistic["last_over_median"]));
    }
    let pass = verdicts[0].1 && verdicts[1].1 && !verdicts[2].1;
    let detail = verdicts
        .iter()
        .map(|(n, p, r)| format!("{n}: last/median={r:.3} pass={p}"))
        .collect::<Vec<_>>()
        .join(", ");
    Outcome { pass, detail }
}

fn conditions_diagnostics() -> Outcome {
    let grid = [1_000, 10_000, 100_000, 1_000_000];
    let mut pass = true;
    let mut parts = Vec::new();
    for name in ["zeta_chi3", "chi3_chi4"] {
        let lf = shipped(name).with_table_len(1_000_000).unwrap().build().unwrap();
        let r = condition3_shifted(&lf.series, &grid).unwrap();
        pass &= r.pass;
        parts.push(format!(
            "{name}: A={:.3}/{:.3} drift={:.1}%",
            r.statistic["A_first"],
            r.statistic["A_second"],
            100.0 * r.statistic["relative_drift"]
        ));
    }
    let chi3 = LFunction::dirichlet_l(3, 0, 1_000_000).unwrap().series;
    let chi4 = LFunction::dirichlet_l(4, 0, 1_000_000).unwrap().series;
    let ones = LFunction::zeta(1_000_000).unwrap().series;
    let distinct = selberg_orthogonality(&chi3, &chi4, &grid).unwrap();
    let same = selberg_orthogonality(&ones, &ones, &grid).unwrap();
    pass &= distinct.pass && !same.pass;
    parts.push(format!(
        "(χ3,χ4) spread={:.2e} pass={}; (1,1) spread={:.3} pass={}",
        distinct.statistic["spread"], distinct.pass, same.statistic["spread"], same.pass
    ));
    Outcome { pass, detail: parts.join("; ") }
}

fn main() -> ExitCode {
    let checks: [Check; 10] = [
        ("modulus identity", Some(10), modulus_identity),
        ("asymptotic expansion of Δ", None, asymptotic_expansion),
        ("realness of Z", None, realness),
        ("zero locations vs degree-one oracle", Some(60), zero_oracle),
        ("stationary-phase main term", None, stationary_phase),
        ("oscillatory regime bounds", None, regime_bounds),
        ("twisted sum decay", Some(30), exponential_sum_decay),
        ("Hardy integrals", Some(300), hardy_experiment),
        ("mean-square negative control", None, negative_control),
        ("coefficient conditions", None, conditions_diagnostics),
    ];
    let mut failed = 0;
    for (k, (label, limit, check)) in checks.iter().enumerate() {
        let out = timed(limit.map(Duration::from_secs), check);
        let tag = if out.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {label}: {}", k + 1, out.detail);
        if !out.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
