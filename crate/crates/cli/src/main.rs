use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use selberg_lab::exp_sums::{self, DEFAULT_CHECKPOINTS};
use selberg_lab::hardy::{self, StepPolicy};
use selberg_lab::oscillatory;
use selberg_lab::{Definition, Error};

const TOOL_VERSION: &str = concat!("selberg-lab ", env!("CARGO_PKG_VERSION"));

/// Default `x` grid for the coefficient diagnostics.
const CONDITION_GRID: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];
const INTEGRAL_HEIGHTS: [f64; 4] = [50.0, 100.0, 200.0, 400.0];
const LEMMA1_SLICES: [f64; 3] = [100.0, 1_000.0, 10_000.0];
const LEMMA1_ALPHAS: [f64; 3] = [0.0, 0.5, 1.0];
const SLOPE_HEIGHTS: [f64; 3] = [100.0, 400.0, 1600.0];

#[derive(Parser, Debug)]
#[command(name = "selberg-lab", version, about = "Experiments on degree-two L-functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// L-function definition file, or the name of a bundled definition
    /// (zeta_chi3, chi3_chi4, zeta_sq).
    #[arg(long, global = true)]
    config: Option<String>,

    #[arg(long, global = true)]
    from: Option<f64>,

    #[arg(long, global = true)]
    to: Option<f64>,

    /// Point count (z-eval) or comma-separated list (integrals: T values;
    /// lemma1: T slices; expsum: checkpoints; conditions: x grid).
    #[arg(long, global = true)]
    grid: Option<String>,

    /// Quadrature tolerance (lemma1) or zero refinement width (scan).
    #[arg(long, global = true)]
    tol: Option<f64>,

    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Output directory. Without it the JSON report goes to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Degree, conductor and root-number data.
    Invariants,
    /// Z, F and theta on an equally spaced grid.
    ZEval,
    /// Sign changes of Z and their refined locations.
    Scan,
    /// Integrals of Z and |Z| over [T, 2T].
    Integrals,
    /// Oscillatory-integral regime tables.
    Lemma1,
    /// Decay of the twisted coefficient sum.
    Expsum,
    /// Coefficient diagnostics.
    Conditions,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Invariants => "invariants",
            Command::ZEval => "z-eval",
            Command::Scan => "scan",
            Command::Integrals => "integrals",
            Command::Lemma1 => "lemma1",
            Command::Expsum => "expsum",
            Command::Conditions => "conditions",
        }
    }
}

enum Failure {
    Config(String),
    Numerical(String),
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Resource(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Config(m) | Failure::Numerical(m) | Failure::Resource(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::ResidualViolation { .. }
            | Error::PhaseJump { .. }
            | Error::NearPole(_)
            | Error::TooSmallT { .. } => Failure::Numerical(msg),
            Error::QuadratureBudget { .. } | Error::TableTooShort { .. } => Failure::Resource(msg),
            _ => Failure::Config(msg),
        }
    }
}

#[derive(Serialize)]
struct ResolvedConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    definition_source: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    definition: Option<Definition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    from: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    to: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    workers: Option<usize>,
}

/// Everything a command produces; nothing touches the disk until the whole
/// run has succeeded.
struct Artifacts {
    results: Value,
    csv: Option<String>,
    /// Set when results were produced but some samples broke tolerance.
    tolerance_breach: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Failure::Config("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    if let Some(tol) = cli.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure::Config(format!("--tol must be positive, got {tol}")));
        }
    }
    let definition = match &cli.config {
        Some(src) => Some(load_definition(src)?),
        None => None,
    };
    if let Some(out) = &cli.out {
        check_writable(out)?;
    }
    let needs_definition = !matches!(cli.command, Command::Lemma1);
    if needs_definition && definition.is_none() {
        return Err(Failure::Config(format!(
            "{} needs --config <definition>",
            cli.command.name()
        )));
    }

    let mut config = ResolvedConfig {
        command: cli.command.name(),
        definition_source: cli.config.clone(),
        definition: definition.clone(),
        from: None,
        to: None,
        grid: None,
        tol: None,
        workers: cli.workers,
    };

    let artifacts = match cli.command {
        Command::Invariants => {
            reject(cli, &["from", "to", "grid", "tol"])?;
            let lf = definition.as_ref().expect("checked").build()?;
            Artifacts {
                results: to_value(&lf)?,
                csv: None,
                tolerance_breach: None,
            }
        }
        Command::ZEval => {
            reject(cli, &["tol"])?;
            let (from, to) = range(cli)?;
            let n = match &cli.grid {
                Some(g) => g
                    .trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::Config(format!("--grid for z-eval is a point count, got {g:?}")))?,
                None => 200,
            };
            config.from = Some(from);
            config.to = Some(to);
            config.grid = Some(json!(n));
            z_eval(definition.as_ref().expect("checked"), from, to, n)?
        }
        Command::Scan => {
            reject(cli, &["grid"])?;
            let (from, to) = range(cli)?;
            config.from = Some(from);
            config.to = Some(to);
            let mut step = StepPolicy::default();
            if let Some(tol) = cli.tol {
                step.refine_width = tol;
            }
            config.tol = Some(step.refine_width);
            scan(definition.as_ref().expect("checked"), from, to, &step)?
        }
        Command::Integrals => {
            reject(cli, &["from", "to", "tol"])?;
            let heights = match &cli.grid {
                Some(g) => parse_list::<f64>(g)?,
                None => INTEGRAL_HEIGHTS.to_vec(),
            };
            if heights.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(Failure::Config("integral heights must be positive".into()));
            }
            config.grid = Some(json!(heights));
            integrals(definition.as_ref().expect("checked"), &heights)?
        }
        Command::Lemma1 => {
            reject(cli, &["from", "to", "config"])?;
            let slices = match &cli.grid {
                Some(g) => parse_list::<f64>(g)?,
                None => LEMMA1_SLICES.to_vec(),
            };
            if slices.is_empty() || slices.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
                return Err(Failure::Config("lemma1 slices must be positive".into()));
            }
            let tol = cli.tol.unwrap_or(1e-6);
            config.grid = Some(json!(slices));
            config.tol = Some(tol);
            lemma1(&slices, tol)?
        }
        Command::Expsum => {
            reject(cli, &["from", "to", "tol"])?;
            let checkpoints = match &cli.grid {
                Some(g) => parse_list::<usize>(g)?,
                None => DEFAULT_CHECKPOINTS.to_vec(),
            };
            increasing(&checkpoints)?;
            config.grid = Some(json!(checkpoints));
            expsum(definition.as_ref().expect("checked"), &checkpoints)?
        }
        Command::Conditions => {
            reject(cli, &["from", "to", "tol"])?;
            let grid = match &cli.grid {
                Some(g) => parse_list::<usize>(g)?,
                None => CONDITION_GRID.to_vec(),
            };
            increasing(&grid)?;
            if grid.len() < 4 {
                return Err(Failure::Config("conditions needs at least four grid points".into()));
            }
            config.grid = Some(json!(grid));
            conditions(definition.as_ref().expect("checked"), &grid)?
        }
    };

    let envelope = json!({
        "tool_version": TOOL_VERSION,
        "config": to_value(&config)?,
        "results": artifacts.results,
    });
    let text = serde_json::to_string_pretty(&envelope).map_err(|e| Failure::Config(e.to_string()))? + "\n";
    match &cli.out {
        Some(dir) => {
            let stem = cli.command.name().replace('-', "_");
            write_atomic(&dir.join(format!("{stem}.json")), &text)?;
            if let Some(csv) = &artifacts.csv {
                write_atomic(&dir.join(format!("{stem}.csv")), csv)?;
            }
        }
        None => print!("{text}"),
    }
    match artifacts.tolerance_breach {
        Some(msg) => Err(Failure::Numerical(msg)),
        None => Ok(()),
    }
}

fn load_definition(src: &str) -> Result<Definition, Failure> {
    let path = Path::new(src);
    if !path.exists() {
        if let Some(def) = Definition::shipped(src) {
            return Ok(def);
        }
    }
    let def = Definition::load(path)?;
    // Surface bad data now, before any work is done.
    def.build()?;
    Ok(def)
}

fn check_writable(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Config(format!("cannot create {}: {e}", dir.display())))?;
    let meta = fs::metadata(dir).map_err(|e| Failure::Config(e.to_string()))?;
    if meta.permissions().readonly() {
        return Err(Failure::Config(format!("{} is not writable", dir.display())));
    }
    Ok(())
}

fn write_atomic(path: &Path, text: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("partial");
    fs::write(&tmp, text)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| Failure::Resource(format!("writing {}: {e}", path.display())))
}

fn reject(cli: &Cli, flags: &[&str]) -> Result<(), Failure> {
    for &flag in flags {
        let given = match flag {
            "from" => cli.from.is_some(),
            "to" => cli.to.is_some(),
            "grid" => cli.grid.is_some(),
            "tol" => cli.tol.is_some(),
            "config" => cli.config.is_some(),
            _ => false,
        };
        if given {
            return Err(Failure::Config(format!(
                "--{flag} does not apply to {}",
                cli.command.name()
            )));
        }
    }
    Ok(())
}

fn range(cli: &Cli) -> Result<(f64, f64), Failure> {
    let (Some(from), Some(to)) = (cli.from, cli.to) else {
        return Err(Failure::Config(format!("{} needs --from and --to", cli.command.name())));
    };
    if !(from.is_finite() && to.is_finite() && from > 0.0 && from < to) {
        return Err(Failure::Config(format!(
            "need 0 < --from < --to, got [{from}, {to}]"
        )));
    }
    Ok((from, to))
}

fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>, Failure> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<T>()
                .ok()
                .or_else(|| s.parse::<f64>().ok().and_then(|v| v.to_string().parse().ok()))
                .ok_or_else(|| Failure::Config(format!("cannot parse grid entry {s:?}")))
        })
        .collect()
}

fn increasing(grid: &[usize]) -> Result<(), Failure> {
    if grid.is_empty() || grid[0] == 0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Config("grid must be positive and strictly increasing".into()));
    }
    Ok(())
}

fn to_value<T: Serialize>(v: &T) -> Result<Value, Failure> {
    serde_json::to_value(v).map_err(|e| Failure::Config(e.to_string()))
}

fn z_eval(def: &Definition, from: f64, to: f64, n: usize) -> Result<Artifacts, Failure> {
    let lf = def.build_for_height(to)?;
    let samples = hardy::sample_grid(&lf, from, to, n)?;
    let mut csv = String::from("t,Z,Re(F),Im(F),theta,cutoff,imag_residual\n");
    for s in &samples {
        let _ = writeln!(
            csv,
            "{},{:e},{:e},{:e},{},{},{:e}",
            s.t, s.z, s.f_value.re, s.f_value.im, s.theta, s.cutoff, s.imag_residual
        );
    }
    let breaches = samples.iter().filter(|s| !s.residual_ok()).count();
    Ok(Artifacts {
        results: json!({ "samples": samples, "residual_failures": breaches }),
        csv: Some(csv),
        tolerance_breach: (breaches > 0)
            .then(|| format!("{breaches} samples exceed the imaginary-residual tolerance")),
    })
}

fn scan(def: &Definition, from: f64, to: f64, step: &StepPolicy) -> Result<Artifacts, Failure> {
    let lf = def.build_for_height(to)?;
    let report = hardy::scan_sign_changes(&lf, from, to, step)?;
    let mut csv = String::from("t_left,t_right,zero,width\n");
    for c in &report.changes {
        let _ = writeln!(
            csv,
            "{},{},{},{:e}",
            c.t_left, c.t_right, c.refined_zero, c.refinement_width
        );
    }
    let breaches = report.residual_failures.len();
    Ok(Artifacts {
        results: json!({
            "count": report.changes.len(),
            "changes": report.changes,
            "samples": report.samples.len(),
            "valleys": report.valleys,
            "max_imag_residual": report.max_imag_residual,
            "residual_failures": report.residual_failures,
        }),
        csv: Some(csv),
        tolerance_breach: (breaches > 0)
            .then(|| format!("{breaches} samples exceed the imaginary-residual tolerance")),
    })
}

fn integrals(def: &Definition, heights: &[f64]) -> Result<Artifacts, Failure> {
    let top = heights.iter().copied().fold(0.0, f64::max);
    let lf = def.build_for_height(2.0 * top)?;
    let mut reports = Vec::with_capacity(heights.len());
    let mut csv = String::from("T,I,I_abs,error_estimate,zeros\n");
    for &t in heights {
        let r = hardy::hardy_integrals(&lf, t)?;
        let _ = writeln!(csv, "{},{},{},{:e},{}", r.t, r.i, r.i_abs, r.quadrature_error_estimate, r.zeros);
        reports.push(r);
    }
    let breaches: usize = reports.iter().map(|r| r.residual_failures).sum();
    Ok(Artifacts {
        results: to_value(&reports)?,
        csv: Some(csv),
        tolerance_breach: (breaches > 0)
            .then(|| format!("{breaches} samples exceed the imaginary-residual tolerance")),
    })
}

fn lemma1(slices: &[f64], tol: f64) -> Result<Artifacts, Failure> {
    let grid = oscillatory::default_grid(&LEMMA1_ALPHAS, slices);
    let report = oscillatory::verify_lemma1(&grid, tol)?;
    let slopes = LEMMA1_ALPHAS
        .iter()
        .map(|&a| oscillatory::stationary_error_slope(a, &SLOPE_HEIGHTS, tol))
        .collect::<Result<Vec<_>, _>>()?;
    let mut csv = String::from("regime,alpha,T,beta,T_prime,abs_J,measured,shape,ratio\n");
    for table in &report.tables {
        for r in &table.rows {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{:e},{:e},{:e},{:e}",
                table.regime.name(),
                r.spec.alpha,
                r.spec.t,
                r.spec.beta,
                r.spec.t_prime,
                r.abs_j,
                r.measured,
                r.shape,
                r.ratio
            );
        }
    }
    Ok(Artifacts {
        results: json!({ "regimes": report, "stationary_slopes": slopes }),
        csv: Some(csv),
        tolerance_breach: None,
    })
}


fn expsum(def: &Definition, checkpoints: &[usize]) -> Result<Artifacts, Failure> {
    let last = *checkpoints.last().expect("non-empty");
    let lf = def.clone().with_table_len(last.max(def.table_len()))?.build()?;
    let alpha = exp_sums::critical_alpha(&lf);
    let profile = exp_sums::decay_profile(&lf.series, alpha, checkpoints)?;
    let limits = &exp_sums::thresholds().decay;
    let decreasing = profile.strictly_decreasing_from(limits.from);
    let halved = match (profile.ratio_at(limits.from), profile.ratio_at(limits.to)) {
        (Some(a), Some(b)) => Some(b < limits.max_ratio * a),
        _ => None,
    };
    Ok(Artifacts {
        csv: Some(profile.to_csv()),
        results: json!({
            "profile": profile,
            "decreasing_per_decade": decreasing,
            "final_below_threshold": halved,
        }),
        tolerance_breach: None,
    })
}

fn conditions(def: &Definition, grid: &[usize]) -> Result<Artifacts, Failure> {
    let last = *grid.last().expect("non-empty");
    let lf = def.clone().with_table_len(last.max(def.table_len()))?.build()?;
    let t_grid: Vec<f64> = (0..=400).map(|k| 0.25 * k as f64).collect();
    let mut reports = vec![
        exp_sums::condition1_sum(&lf.series, grid)?,
        exp_sums::condition2_min(&lf.series, &t_grid, 97, 2)?,
        exp_sums::condition3_shifted(&lf.series, grid)?,
        exp_sums::mean_square_check(&lf.series, grid)?,
    ];
    if let Some((a, b)) = def.factor_series(last)? {
        reports.push(exp_sums::selberg_orthogonality(&a, &b, grid)?);
    }
    Ok(Artifacts {
        results: to_value(&reports)?,
        csv: None,
        tolerance_breach: None,
    })
}
