//! Command-line front end.

pub mod config;
pub mod report;
pub mod suites;

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Error;
use crate::inversion::{
    generalized_invert_at, invert_at, IndefiniteIntegralSequence, Inversion, TransformationSequence,
};
use crate::numerics::HVector;
use crate::plancherel::{box_inversion_check, truncation_study, BoxDomain, TruncationStep};
use crate::rkhs::{build_span_basis, transform, FeatureMap};
use crate::spaces::{
    pw_kernel, sobolev_kernel, tensor_kernel, KernelFn, PwFeatureMap, PwSpec, SobolevFeatureMap, SobolevSpace,
};

pub use config::RunConfig;
pub use report::{CheckRecord, Environment, Report};
pub use suites::{run_suite, Suite};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "rkhs-invert", version, about = "Kernels, transforms and inversion checks for feature-map RKHSs")]
pub struct Cli {
    /// JSON config; flags override its fields.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// Sobolev interval as `lo,hi`.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub interval: Option<Vec<f64>>,
    /// Anchor point where elements vanish.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Weight: `const` or `affine`.
    #[arg(long, global = true)]
    pub rho: Option<String>,
    /// Band limit.
    #[arg(long, global = true)]
    pub a: Option<f64>,
    /// Box dimension, 1 to 3.
    #[arg(long, global = true)]
    pub dims: Option<usize>,
    /// Frequency truncation radius.
    #[arg(long, global = true)]
    pub radius: Option<f64>,
    /// Quadrature panels on the interval.
    #[arg(long, global = true)]
    pub panels: Option<usize>,
    /// Gauss–Legendre nodes per panel.
    #[arg(long, global = true)]
    pub nodes_per_panel: Option<usize>,
    /// Comma-separated span basis points.
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub basis_points: Option<Vec<f64>>,
    /// Number of inversion probes.
    #[arg(long, global = true)]
    pub probes: Option<usize>,
    /// Seed for random coefficients and points.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write to a file instead of stdout.
    #[arg(long, short, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate a kernel on a probe grid.
    Kernel {
        #[arg(long, value_enum, default_value_t = Family::Pw)]
        family: Family,
        /// Probe points per axis.
        #[arg(long, default_value_t = 5)]
        grid_probe: usize,
    },
    /// Evaluate the transform of a function at probe points.
    Transform {
        #[arg(long, value_enum, default_value_t = Family::Pw)]
        family: Family,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 9)]
        grid_probe: usize,
    },
    /// Recover a function, or its image under a sequence, from its transform.
    Invert {
        #[arg(long, value_enum, default_value_t = SequenceKind::Indefinite)]
        sequence: SequenceKind,
        #[command(flatten)]
        source: Source,
    },
    /// Run a verification suite and emit a JSON report.
    Verify {
        #[arg(long)]
        suite: Option<String>,
    },
    /// Truncation study and finite-difference probes, without pass/fail.
    Report,
}

#[derive(Debug, Args)]
pub struct Source {
    /// Built-in function: const, cos, sin, exp, gaussian or span.
    #[arg(long = "function", short = 'f', conflicts_with = "input")]
    pub function: Option<String>,
    /// CSV samples with header `t,re,im`.
    #[arg(long, value_name = "PATH")]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Pw,
    Sobolev,
    Tensor,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SequenceKind {
    #[value(name = "self")]
    Identity,
    Indefinite,
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

pub fn run(cli: Cli) -> CliResult<i32> {
    let cfg = resolve_config(cli.config.as_deref(), &cli.overrides)?;
    match cli.command {
        Command::Kernel { family, grid_probe } => {
            let rows = kernel_table(&cfg, family, grid_probe)?;
            write_csv(cfg.output.as_deref(), &["x", "y", "re", "im"], rows)?;
            Ok(EXIT_PASS)
        }
        Command::Transform { family, source, grid_probe } => {
            let rows = transform_table(&cfg, family, &source, grid_probe)?;
            write_csv(cfg.output.as_deref(), &["x", "re", "im"], rows)?;
            Ok(EXIT_PASS)
        }
        Command::Invert { sequence, source } => {
            let rows = invert_table(&cfg, sequence, &source)?;
            write_csv(cfg.output.as_deref(), &["t", "recovered", "reference", "abs_err"], rows)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { suite } => {
            let name = suite.or_else(|| cfg.suite.clone()).unwrap_or_else(|| "all".into());
            let suite: Suite = name.parse().map_err(|e: Error| CliError::Config(e.to_string()))?;
            let report = Report::new(suite.name(), run_suite(suite, &cfg)?);
            write_json(cfg.output.as_deref(), &report)?;
            Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Report => {
            write_json(cfg.output.as_deref(), &study(&cfg)?)?;
            Ok(EXIT_PASS)
        }
    }
}

pub fn resolve_config(path: Option<&Path>, o: &Overrides) -> CliResult<RunConfig> {
    let mut cfg = match path {
        Some(p) => RunConfig::load(p).map_err(|e| CliError::Config(e.to_string()))?,
        None => RunConfig::default(),
    };
    if let Some(iv) = &o.interval {
        cfg.interval = <[f64; 2]>::try_from(iv.as_slice())
            .map_err(|_| CliError::Config(format!("--interval takes lo,hi; got {} values", iv.len())))?;
    }
    macro_rules! set {
        ($($field:ident),*) => { $( if let Some(v) = &o.$field { cfg.$field = v.clone(); } )* };
    }
    set!(c, rho, a, dims, panels, nodes_per_panel, probes, seed);
    if o.radius.is_some() {
        cfg.radius = o.radius;
    }
    if o.basis_points.is_some() {
        cfg.basis_points = o.basis_points.clone();
    }
    if o.output.is_some() {
        cfg.output = o.output.clone();
    }
    cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
    Ok(cfg)
}

/// `n` interior points `lo + (hi − lo)(j + 1)/(n + 1)`.
pub fn probe_points(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| lo + (hi - lo) * (j + 1) as f64 / (n + 1) as f64).collect()
}

const PW_PROBE_RANGE: (f64, f64) = (-3.0, 3.0);

fn num(x: f64) -> String {
    let m = x.abs();
    if m == 0.0 || (1e-4..1e15).contains(&m) || !m.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

fn kernel_table(cfg: &RunConfig, family: Family, n: usize) -> CliResult<Vec<Vec<String>>> {
    let pw = PwSpec::new(cfg.a)?;
    let sob = cfg.sobolev_spec()?;
    let pw_pts = probe_points(PW_PROBE_RANGE.0, PW_PROBE_RANGE.1, n);
    let [lo, hi] = cfg.interval;
    let sob_pts = probe_points(lo, hi, n);
    let k_pw = |x: &f64, y: &f64| pw_kernel(&pw, Complex64::new(*x, 0.0), Complex64::new(*y, 0.0));
    let mut rows = Vec::with_capacity(n * n);
    match family {
        Family::Pw => {
            for x in &pw_pts {
                for y in &pw_pts {
                    let k = k_pw(x, y);
                    rows.push(vec![num(*x), num(*y), num(k.re), num(k.im)]);
                }
            }
        }
        Family::Sobolev => {
            for &x in &sob_pts {
                for &y in &sob_pts {
                    rows.push(vec![num(x), num(y), num(sobolev_kernel(&sob, x, y)?), num(0.0)]);
                }
            }
        }
        Family::Tensor => {
            let pts: Vec<[f64; 2]> = pw_pts.iter().zip(&sob_pts).map(|(&p, &q)| [p, q]).collect();
            let k_sob = |x: &f64, y: &f64| Complex64::new(sobolev_kernel(&sob, *x, *y).unwrap_or(f64::NAN), 0.0);
            let kernels: [KernelFn<f64>; 2] = [&k_pw, &k_sob];
            for x in &pts {
                for y in &pts {
                    let k = tensor_kernel(&kernels, x, y)?;
                    let tuple = |p: &[f64; 2]| format!("{};{}", p[0], p[1]);
                    rows.push(vec![tuple(x), tuple(y), num(k.re), num(k.im)]);
                }
            }
        }
    }
    Ok(rows)
}

type ComplexFn = fn(f64) -> Complex64;

/// Built-in test functions with, where known, `∫_0^t f`.
struct Builtin {
    f: ComplexFn,
    integral: Option<ComplexFn>,
    derivative: Option<ComplexFn>,
}

fn builtin(name: &str) -> CliResult<Builtin> {
    Ok(match name {
        "const" => Builtin { f: |_| 1.0.into(), integral: Some(|t| t.into()), derivative: Some(|_| 0.0.into()) },
        "cos" => Builtin {
            f: |t| t.cos().into(),
            integral: Some(|t| t.sin().into()),
            derivative: Some(|t| (-t.sin()).into()),
        },
        "sin" => Builtin {
            f: |t| t.sin().into(),
            integral: Some(|t| (1.0 - t.cos()).into()),
            derivative: Some(|t| t.cos().into()),
        },
        "exp" => Builtin {
            f: |t| t.exp().into(),
            integral: Some(|t| (t.exp() - 1.0).into()),
            derivative: Some(|t| t.exp().into()),
        },
        "gaussian" => Builtin {
            f: |t| (-t * t).exp().into(),
            integral: None,
            derivative: Some(|t| (-2.0 * t * (-t * t).exp()).into()),
        },
        other => {
            return Err(CliError::Config(format!(
                "unknown function '{other}'; built-ins: const, cos, sin, exp, gaussian, span"
            )))
        }
    })
}

/// Samples `t,re,im` read from CSV, sorted by `t`.
pub struct Samples(Vec<(f64, Complex64)>);

impl Samples {
    pub fn read(path: &Path) -> CliResult<Self> {
        #[derive(serde::Deserialize)]
        struct Row {
            t: f64,
            re: f64,
            im: f64,
        }
        let mut reader = csv::Reader::from_path(path)?;
        let mut rows = reader
            .deserialize::<Row>()
            .map(|r| r.map(|r| (r.t, Complex64::new(r.re, r.im))))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::Config(format!("malformed CSV {}: {e}", path.display())))?;
        if rows.len() < 2 || rows.iter().any(|(t, v)| !(t.is_finite() && v.re.is_finite() && v.im.is_finite())) {
            return Err(CliError::Config(format!("{} needs at least two finite rows", path.display())));
        }
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self(rows))
    }

    /// Piecewise-linear interpolation inside the sampled range.
    pub fn at(&self, t: f64) -> CliResult<Complex64> {
        let s = &self.0;
        let (first, last) = (s[0].0, s[s.len() - 1].0);
        if !(first..=last).contains(&t) {
            return Err(CliError::Config(format!("samples cover [{first}, {last}] but {t} is needed")));
        }
        let i = s.partition_point(|(x, _)| *x <= t).clamp(1, s.len() - 1);
        let ((x0, y0), (x1, y1)) = (s[i - 1], s[i]);
        if x1 == x0 {
            return Ok(y1);
        }
        Ok(y0 + (y1 - y0) * ((t - x0) / (x1 - x0)))
    }
}

fn sample_on(space: &std::sync::Arc<crate::numerics::GridSpace>, samples: &Samples) -> CliResult<HVector> {
    let values = space.axis(0).nodes().iter().map(|&t| samples.at(t)).collect::<CliResult<Vec<_>>>()?;
    Ok(HVector::new(space.clone(), values)?)
}

fn transform_table(cfg: &RunConfig, family: Family, source: &Source, n: usize) -> CliResult<Vec<Vec<String>>> {
    let load = |space: &std::sync::Arc<crate::numerics::GridSpace>| -> CliResult<HVector> {
        match (&source.input, source.function.as_deref()) {
            (Some(path), _) => sample_on(space, &Samples::read(path)?),
            (None, name) => Ok(HVector::from_fn_1d(space.clone(), builtin(name.unwrap_or("gaussian"))?.f)),
        }
    };
    let row = |x: f64, v: Complex64| vec![num(x), num(v.re), num(v.im)];
    match family {
        Family::Pw => {
            let map = PwFeatureMap::new(PwSpec::new(cfg.a)?, cfg.panels, cfg.nodes_per_panel, &[])?;
            let f = load(map.space())?;
            let image = transform(&f, &map)?;
            probe_points(PW_PROBE_RANGE.0, PW_PROBE_RANGE.1, n)
                .into_iter()
                .map(|x| Ok(row(x, image.evaluate(&x)?)))
                .collect()
        }
        Family::Sobolev => {
            let map = SobolevFeatureMap::new(cfg.sobolev_spec()?, cfg.panels, cfg.nodes_per_panel, &[])?;
            let f = load(map.space())?;
            let image = transform(&f, &map)?;
            let [lo, hi] = cfg.interval;
            probe_points(lo, hi, n).into_iter().map(|x| Ok(row(x, image.evaluate(&x)?))).collect()
        }
        Family::Tensor => Err(CliError::Config("transform supports the pw and sobolev families".into())),
    }
}

fn coefficients(cfg: &RunConfig, n: usize) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn warn_coarse(inversions: &[Inversion]) {
    let coarse: Vec<f64> = inversions.iter().filter(|i| i.coarse).map(|i| i.residual).collect();
    if !coarse.is_empty() {
        let worst = coarse.iter().fold(0.0f64, |m, &r| m.max(r));
        eprintln!(
            "warning: {} of {} probe sections are coarsely resolved by the basis (max residual {worst:.3e})",
            coarse.len(),
            inversions.len()
        );
    }
}

fn invert_table(cfg: &RunConfig, kind: SequenceKind, source: &Source) -> CliResult<Vec<Vec<String>>> {
    let mut rows = Vec::new();
    let mut seen = Vec::new();
    let mut push = |t: f64, inv: Inversion, reference: Complex64| {
        seen.push(inv);
        rows.push(vec![num(t), num(inv.value.re), num(reference.re), num((inv.value - reference).norm())]);
    };
    match kind {
        SequenceKind::Identity => {
            let spec = cfg.sobolev_spec()?;
            let [lo, hi] = cfg.interval;
            let probes = probe_points(lo, hi, cfg.probes);
            let points = cfg.basis_points.clone().unwrap_or_else(|| probe_points(lo, hi, 15));
            let breaks: Vec<f64> = points.iter().chain(&probes).copied().collect();
            let h = SobolevSpace::new(spec.clone(), cfg.panels, cfg.nodes_per_panel, &breaks)?;
            let basis = build_span_basis(&h, &points)?;
            let c = spec.c();
            let (f, reference): (HVector, Box<dyn Fn(f64) -> CliResult<Complex64>>) =
                match (&source.input, source.function.as_deref().unwrap_or("span")) {
                    (Some(path), _) => {
                        let samples = Samples::read(path)?;
                        let base = samples.at(c)?;
                        let values: Vec<Complex64> =
                            h.space().axis(0).nodes().iter().map(|&t| samples.at(t)).collect::<CliResult<_>>()?;
                        let derivative = h.space().axis(0).differentiate(&values)?;
                        let g = HVector::new(h.space().clone(), derivative)?;
                        (g, Box::new(move |t| Ok(samples.at(t)? - base)))
                    }
                    (None, "span") => {
                        let coeffs = coefficients(cfg, points.len());
                        let g = basis.combine(&coeffs)?;
                        let pts = points.clone();
                        let spec = spec.clone();
                        let reference = move |t: f64| -> CliResult<Complex64> {
                            let mut acc = Complex64::new(0.0, 0.0);
                            for (a, &x) in coeffs.iter().zip(&pts) {
                                acc += a * sobolev_kernel(&spec, x, t)?;
                            }
                            Ok(acc)
                        };
                        (g, Box::new(reference))
                    }
                    (None, name) => {
                        let b = builtin(name)?;
                        let derivative = b.derivative.expect("every built-in has a derivative");
                        let g = h.from_derivative(derivative);
                        let f = b.f;
                        (g, Box::new(move |t| Ok(f(t) - f(c))))
                    }
                };
            let image = transform(&f, &h)?;
            for t in probes {
                push(t, invert_at(&image, &t, &h, &basis)?, reference(t)?);
            }
        }
        SequenceKind::Indefinite => {
            let pw = PwSpec::new(cfg.a)?;
            let probes = probe_points(-cfg.a, cfg.a, cfg.probes);
            let radius = cfg.radius.unwrap_or(200.0);
            let seq = IndefiniteIntegralSequence::new(pw, radius, cfg.nodes_per_panel, &probes)?;
            let map = seq.map();
            let points = cfg.basis_points.clone().unwrap_or_else(|| {
                let r = radius.floor() as i64;
                (-r..=r).map(|k| k as f64).collect()
            });
            let basis = build_span_basis(map, &points)?;
            let space = map.space().clone();
            let (f, closed): (HVector, Option<ComplexFn>) =
                match (&source.input, source.function.as_deref().unwrap_or("const")) {
                    (Some(path), _) => (sample_on(&space, &Samples::read(path)?)?, None),
                    (None, "span") => (basis.combine(&coefficients(cfg, points.len()))?, None),
                    (None, name) => {
                        let b = builtin(name)?;
                        (HVector::from_fn_1d(space.clone(), b.f), b.integral)
                    }
                };
            let image = transform(&f, map)?;
            for t in probes {
                let reference = match closed {
                    Some(integral) => integral(t),
                    None => {
                        let w = space.axis(0).partial_weights(0.0, t)?;
                        crate::numerics::complex_sum(f.values().iter().zip(&w).map(|(v, w)| v * w))
                    }
                };
                push(t, generalized_invert_at(&seq, &image, &t, &basis)?, reference);
            }
        }
    }
    warn_coarse(&seen);
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct FiniteDifference {
    t: f64,
    lhs_derivative: f64,
    rhs_derivative: f64,
    f: f64,
}

#[derive(Debug, Serialize)]
struct StudyReport {
    truncation: Vec<TruncationRow>,
    finite_differences: Vec<FiniteDifference>,
    radius: f64,
    environment: Environment,
}

#[derive(Debug, Serialize)]
struct TruncationRow {
    a: f64,
    max_abs_err: f64,
}

impl From<TruncationStep> for TruncationRow {
    fn from(s: TruncationStep) -> Self {
        Self { a: s.a, max_abs_err: s.max_abs_err }
    }
}

fn study(cfg: &RunConfig) -> CliResult<StudyReport> {
    let npp = cfg.nodes_per_panel;
    let gauss = |t: f64| Complex64::new((-t * t / 2.0).exp(), 0.0);
    let probes = probe_points(-3.0, 3.0, 13);
    let truncation = truncation_study(gauss, gauss, &[2.0, 4.0, 8.0], &probes, npp)?;

    let radius = cfg.radius.unwrap_or(200.0);
    let a = 2.0;
    let h = 1e-3;
    let domain = BoxDomain::for_radius(a, 1, radius, npp, &[])?;
    let f = domain.sample(|t| Complex64::new(t[0].cos(), 0.0));
    let finite_differences = probe_points(0.0, a, 7)
        .into_iter()
        .map(|t| {
            let plus = box_inversion_check(&f, &domain, radius, npp, &[t + h])?;
            let minus = box_inversion_check(&f, &domain, radius, npp, &[t - h])?;
            Ok(FiniteDifference {
                t,
                lhs_derivative: (plus.lhs.re - minus.lhs.re) / (2.0 * h),
                rhs_derivative: (plus.rhs.re - minus.rhs.re) / (2.0 * h),
                f: t.cos(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(StudyReport {
        truncation: truncation.into_iter().map(Into::into).collect(),
        finite_differences,
        radius,
        environment: Environment::now(),
    })
}

fn sink(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_csv(path: Option<&Path>, header: &[&str], rows: Vec<Vec<String>>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(sink(path)?);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> CliResult<()> {
    let mut out = sink(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}
