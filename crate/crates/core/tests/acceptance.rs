//! Acceptance criteria, one pass/fail line each. Exits nonzero on any failure.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rkhs_invert::inversion::{
    fourier_coeff_invert, generalized_invert_at, invert_at, CoefficientSequence, Cons, IndefiniteIntegralSequence,
};
use rkhs_invert::numerics::{ExtReal, HVector, Interval, Weight};
use rkhs_invert::plancherel::{box_inversion_check, mutual_inverse_check, plancherel_norm_check, BoxDomain};
use rkhs_invert::rkhs::{build_span_basis, contraction_check, kernel_eval, transform, FeatureMap};
use rkhs_invert::spaces::{
    pw_kernel, sinc_identity_check, sobolev_kernel, tensor_feature, tensor_kernel, KernelFn, PwFeatureMap, PwSpec,
    SobolevFeatureMap, SobolevSpace, SobolevSpec,
};

type CheckResult = Result<Vec<Check>, String>;

/// A test function and its integral from 0.
type Antiderivative = (&'static str, fn(f64) -> f64, fn(f64) -> f64);

/// Number, title, body and runtime budget.
type Criterion = (u8, &'static str, fn() -> CheckResult, Duration);

struct Check {
    name: String,
    measured: f64,
    tolerance: f64,
}

impl Check {
    fn le(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self { name: name.into(), measured, tolerance }
    }

    fn pass(&self) -> bool {
        self.measured <= self.tolerance
    }
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn spec(lo: f64, hi: f64, anchor: f64, weight: Weight) -> SobolevSpec {
    SobolevSpec::new(Interval::finite(lo, hi), ExtReal::from(anchor), weight).unwrap()
}

/// Closed-form Sobolev kernel: `∫ dt/ρ` over `(c, med(x, y, c))`.
fn sobolev_oracle(anchor: f64, affine: bool, x: f64, y: f64) -> f64 {
    let mut v = [x, y, anchor];
    v.sort_by(f64::total_cmp);
    let m = v[1];
    let (lo, hi) = (anchor.min(m), anchor.max(m));
    if affine {
        ((1.0 + hi) / (1.0 + lo)).ln()
    } else {
        hi - lo
    }
}

fn max(iter: impl IntoIterator<Item = f64>) -> f64 {
    iter.into_iter().fold(0.0, f64::max)
}

type Smooth = (fn(f64) -> f64, fn(f64) -> f64);

/// Test functions vanishing at 0, with derivatives.
const SMOOTH: [Smooth; 3] = [
    (|t| (2.0 * t).sin(), |t| 2.0 * (2.0 * t).cos()),
    (|t| t * t.exp(), |t| (1.0 + t) * t.exp()),
    (|t| 1.0 - (3.0 * t).cos(), |t| 3.0 * (3.0 * t).sin()),
];

fn criterion_1() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let cases = [
        ("rho=1 on (0,1)", spec(0.0, 1.0, 0.0, Weight::unit())),
        ("rho=1+t on (0,1)", spec(0.0, 1.0, 0.0, Weight::one_plus_t())),
        ("rho=1 on (-1,1)", spec(-1.0, 1.0, 0.0, Weight::unit())),
        ("rho=1+t on (-1,1)", spec(-1.0, 1.0, 0.0, Weight::one_plus_t())),
    ];
    let mut checks = Vec::new();
    for (label, s) in cases {
        let (lo, hi) = s.interval().bounds().unwrap();
        let ys: Vec<f64> = (0..20).map(|_| rng.gen_range(lo..hi)).collect();
        let h = SobolevSpace::new(s, 16, 16, &ys).map_err(|e| e.to_string())?;
        let mut worst: f64 = 0.0;
        for (f, df) in SMOOTH {
            let g = h.from_derivative(|t| c(df(t)));
            for &y in &ys {
                let value = h.evaluate(&g, y).map_err(|e| e.to_string())?;
                worst = worst.max((value - c(f(y))).norm());
            }
        }
        checks.push(Check::le(format!("|<f,k_y> - f(y)| {label}"), worst, 1e-6));
    }
    Ok(checks)
}

fn criterion_2() -> CheckResult {
    let cases = [
        ("rho=1, c=0", spec(0.0, 1.0, 0.0, Weight::unit())),
        ("rho=1+t, c=0", spec(0.0, 1.0, 0.0, Weight::one_plus_t())),
        ("rho=1, c=0.5", spec(0.0, 1.0, 0.5, Weight::unit())),
        ("rho=1+t, c=0.5", spec(0.0, 1.0, 0.5, Weight::one_plus_t())),
    ];
    let f = |t: f64| Complex64::new((3.0 * t).cos() + t * t, (-t).exp());
    let mut checks = Vec::new();
    for (label, s) in cases {
        let phi = SobolevFeatureMap::new(s.clone(), 32, 16, &[]).map_err(|e| e.to_string())?;
        let h = SobolevSpace::on_space(s, phi.space().clone()).map_err(|e| e.to_string())?;
        let fv = HVector::from_fn_1d(phi.space().clone(), f);
        let f_hat = phi.indefinite_transform(&fv).map_err(|e| e.to_string())?;
        let values = f_hat.at_nodes().map_err(|e| e.to_string())?;
        let norm_hat = h.norm_sq_from_values(&values).map_err(|e| e.to_string())?.sqrt();
        let norm = fv.norm();
        checks.push(Check::le(format!("isometry rel err {label}"), (norm_hat - norm).abs() / norm, 1e-8));
    }
    Ok(checks)
}

fn criterion_3() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = spec(0.0, 1.0, 0.0, Weight::one_plus_t());
    let points: Vec<f64> = (1..=12).map(|k| k as f64 / 13.0).collect();
    let phi = SobolevFeatureMap::new(s, 16, 16, &points).map_err(|e| e.to_string())?;
    let basis = build_span_basis(&phi, &points).map_err(|e| e.to_string())?;
    let mut worst_slack = f64::INFINITY;
    for _ in 0..100 {
        let coeffs: [f64; 6] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let f = HVector::from_fn_1d(phi.space().clone(), |t| {
            c(coeffs.iter().enumerate().map(|(k, a)| a * (PI * k as f64 * t).cos()).sum())
        });
        let r = contraction_check(&f, &phi, &basis).map_err(|e| e.to_string())?;
        worst_slack = worst_slack.min(r.slack);
    }
    let mut worst_eq: f64 = 0.0;
    for _ in 0..20 {
        let coeffs: Vec<Complex64> =
            points.iter().map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let f = basis.combine(&coeffs).map_err(|e| e.to_string())?;
        let r = contraction_check(&f, &phi, &basis).map_err(|e| e.to_string())?;
        worst_eq = worst_eq.max(r.slack.abs());
    }
    Ok(vec![Check::le("-min slack (random f)", -worst_slack, 1e-8), Check::le("|slack| span members", worst_eq, 1e-6)])
}

fn criterion_4() -> CheckResult {
    let mut checks = Vec::new();
    for (label, affine) in [("rho=1", false), ("rho=1+t", true)] {
        let w = if affine { Weight::one_plus_t() } else { Weight::unit() };
        let s = spec(0.0, 1.0, 0.0, w);
        let lattice: Vec<f64> = (1..=10).map(|k| k as f64 / 11.0).collect();
        let phi = SobolevFeatureMap::new(s.clone(), 16, 16, &lattice).map_err(|e| e.to_string())?;
        let mut worst_closed: f64 = 0.0;
        let mut worst_gram: f64 = 0.0;
        for &x in &lattice {
            for &y in &lattice {
                let oracle = sobolev_oracle(0.0, affine, x, y);
                let k = sobolev_kernel(&s, x, y).map_err(|e| e.to_string())?;
                let q = kernel_eval(&phi, &x, &y).map_err(|e| e.to_string())?;
                worst_closed = worst_closed.max((k - oracle).abs());
                worst_gram = worst_gram.max((q - c(oracle)).norm());
            }
        }
        checks.push(Check::le(format!("sobolev kernel vs closed form, {label}"), worst_closed, 1e-10));
        checks.push(Check::le(format!("sobolev feature Gram vs closed form, {label}"), worst_gram, 1e-10));
    }

    let pw = PwSpec::new(1.0).unwrap();
    let map = PwFeatureMap::for_frequencies(pw, 5.0, 16, &[]).map_err(|e| e.to_string())?;
    let probes: Vec<f64> = (0..10).map(|k| -5.0 + k as f64 * 10.0 / 9.0).collect();
    let dirichlet = |x: f64, y: f64| if x == y { 1.0 / PI } else { (x - y).sin() / (PI * (x - y)) };
    let mut worst_pw: f64 = 0.0;
    for &x in &probes {
        for &y in &probes {
            let q = kernel_eval(&map, &x, &y).map_err(|e| e.to_string())?;
            worst_pw = worst_pw.max((q - c(dirichlet(x, y))).norm());
        }
    }
    checks.push(Check::le("pw feature Gram vs closed form", worst_pw, 1e-10));

    let s = spec(0.0, 1.0, 0.0, Weight::one_plus_t());
    let k_pw = |x: &f64, y: &f64| pw_kernel(&pw, c(*x), c(*y));
    let k_sob = |x: &f64, y: &f64| c(sobolev_oracle(0.0, true, *x, *y));
    let kernels: [KernelFn<f64>; 2] = [&k_pw, &k_sob];
    let mut worst_tensor: f64 = 0.0;
    for (x, y) in [([0.3, 0.2], [1.1, 0.7]), ([2.0, 0.9], [-1.0, 0.4]), ([0.0, 0.5], [0.0, 0.5])] {
        let product = tensor_kernel(&kernels, &x, &y).map_err(|e| e.to_string())?;
        let reference = dirichlet(x[0], y[0]) * sobolev_kernel(&s, x[1], y[1]).map_err(|e| e.to_string())?;
        worst_tensor = worst_tensor.max((product.re - reference).abs() / reference.abs());
    }
    let m1 = PwFeatureMap::for_frequencies(pw, 3.0, 16, &[]).map_err(|e| e.to_string())?;
    let product = tensor_feature(vec![m1.clone(), m1]).map_err(|e| e.to_string())?;
    let mut worst_quad: f64 = 0.0;
    for (x, y) in [([1.0, PI], [0.0, 0.0]), ([0.5, -1.5], [1.5, 2.5])] {
        let q = kernel_eval(&product, &x.to_vec(), &y.to_vec()).map_err(|e| e.to_string())?;
        worst_quad = worst_quad.max((q - c(dirichlet(x[0], y[0]) * dirichlet(x[1], y[1]))).norm());
    }
    checks.push(Check::le("tensor kernel factorization (relative)", worst_tensor, 1e-12));
    checks.push(Check::le("tensor feature Gram vs product of closed forms", worst_quad, 1e-10));
    Ok(checks)
}

fn criterion_5() -> CheckResult {
    let radius = 1e4;
    let lattice: Vec<f64> = (0..5).map(|k| -1.6 + 0.8 * k as f64).collect();
    let mut checks = Vec::new();
    for a in [1.0, 2.0] {
        let mut worst: f64 = 0.0;
        for &x in &lattice {
            for &y in &lattice {
                let r = sinc_identity_check(a, x, y, radius).map_err(|e| e.to_string())?;
                let oracle = if x == y { PI * a } else { PI * (a * (y - x)).sin() / (y - x) };
                worst = worst.max((r.lhs - oracle).abs());
            }
        }
        checks.push(Check::le(format!("5x5 lattice, a={a}"), worst, 4.0 / radius + 1e-6));
    }
    let r = sinc_identity_check(1.0, 0.0, 0.0, radius).map_err(|e| e.to_string())?;
    checks.push(Check::le("(0,0) reproduces pi", (r.lhs - PI).abs(), 3e-3));
    Ok(checks)
}

fn criterion_6() -> CheckResult {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let points: Vec<f64> = (0..15).map(|_| rng.gen_range(-0.95..0.95)).collect();
    let probes: Vec<f64> = (1..=50).map(|j| -1.0 + 2.0 * j as f64 / 51.0).collect();
    let breaks: Vec<f64> = points.iter().chain(&probes).copied().collect();
    let h = SobolevSpace::new(spec(-1.0, 1.0, 0.0, Weight::unit()), 16, 16, &breaks).map_err(|e| e.to_string())?;
    let basis = build_span_basis(&h, &points).map_err(|e| e.to_string())?;
    let coeffs: Vec<Complex64> =
        points.iter().map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let f = basis.combine(&coeffs).map_err(|e| e.to_string())?;
    let image = transform(&f, &h).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    let mut worst_schwarz = f64::NEG_INFINITY;
    for &t in &probes {
        let inv = invert_at(&image, &t, &h, &basis).map_err(|e| e.to_string())?;
        let oracle: Complex64 = coeffs.iter().zip(&points).map(|(a, &x)| a * sobolev_oracle(0.0, false, x, t)).sum();
        worst = worst.max((inv.value - oracle).norm());
        worst_schwarz = worst_schwarz.max(inv.value.norm() - inv.bound);
    }
    Ok(vec![
        Check::le("round trip max error, 50 probes", worst, 1e-5),
        Check::le("Schwarz bound excess", worst_schwarz, 1e-6),
    ])
}

fn criterion_7() -> CheckResult {
    let radius = 200.0;
    let probes = [0.25, 0.5, 1.0];
    let pw = PwSpec::new(1.0).unwrap();
    let seq = IndefiniteIntegralSequence::new(pw, radius, 16, &probes).map_err(|e| e.to_string())?;
    use rkhs_invert::inversion::TransformationSequence;
    let map = seq.map();
    let points: Vec<f64> = (-200..=200).map(f64::from).collect();
    let basis = build_span_basis(map, &points).map_err(|e| e.to_string())?;
    let cases: [Antiderivative; 2] = [("f=1", |_| 1.0, |t| t), ("f=cos", f64::cos, f64::sin)];
    let mut checks = Vec::new();
    for (label, f, antiderivative) in cases {
        let fv = HVector::from_fn_1d(map.space().clone(), |t| c(f(t)));
        let image = transform(&fv, map).map_err(|e| e.to_string())?;
        let worst = max(probes.iter().map(|&t| {
            let inv = generalized_invert_at(&seq, &image, &t, &basis).unwrap();
            (inv.value - c(antiderivative(t))).norm()
        }));
        checks.push(Check::le(format!("{label}, t in {{0.25, 0.5, 1}}"), worst, 1e-4));
    }
    Ok(checks)
}

fn criterion_8() -> CheckResult {
    let count = 16;
    let pw = PwSpec::new(1.0).unwrap();
    let map = PwFeatureMap::for_frequencies(pw, 8.0 * PI + 1.0, 16, &[]).map_err(|e| e.to_string())?;
    let cons = Cons::exponentials(map.space().clone(), count).map_err(|e| e.to_string())?;
    let points: Vec<f64> = (1..=count).map(|n| cons.frequency(n).unwrap()).collect();
    let basis = build_span_basis(&map, &points).map_err(|e| e.to_string())?;
    let seq = CoefficientSequence::new(map.clone(), cons.clone()).map_err(|e| e.to_string())?;
    let f = HVector::from_fn_1d(map.space().clone(), |t| Complex64::new((-t * t).exp() * (1.0 + t), t.sin()));
    let image = transform(&f, &map).map_err(|e| e.to_string())?;
    let scale = 1.0 / 2f64.sqrt();
    let mut worst: f64 = 0.0;
    let mut recovered = Vec::new();
    for n in 1..=count {
        let v = fourier_coeff_invert(&seq, &image, n, &basis).map_err(|e| e.to_string())?.value;
        // direct coefficient by independent quadrature against e^{iπ m t}/√2
        let m = if n % 2 == 0 { (n / 2) as f64 } else { -((n / 2) as f64) };
        let g = HVector::from_fn_1d(map.space().clone(), |t| Complex64::new(0.0, PI * m * t).exp() * scale);
        let direct = rkhs_invert::numerics::inner_weighted(&f, &g).map_err(|e| e.to_string())?;
        worst = worst.max((v - direct).norm());
        recovered.push(v);
    }
    let errs: Vec<f64> =
        (0..=count).map(|n| f.sub(&cons.synthesize(&recovered[..n]).unwrap()).unwrap().norm()).collect();
    let worst_increase = max(errs.windows(2).map(|w| w[1] - w[0]));
    Ok(vec![
        Check::le("coefficients vs direct, n <= 16", worst, 1e-6),
        Check::le("reconstruction error increase", worst_increase, 1e-12),
    ])
}

fn criterion_9() -> CheckResult {
    let mut checks = Vec::new();
    let npp = 16;
    let gauss = |t: &[f64]| c(t.iter().map(|x| (-x * x).exp()).product());

    let d1 = BoxDomain::for_radius(6.0, 1, 200.0, npp, &[]).map_err(|e| e.to_string())?;
    let g1 = d1.sample(gauss);
    let r = plancherel_norm_check(&g1, &d1, 200.0, npp).map_err(|e| e.to_string())?;
    let exact = (PI / 2.0).sqrt();
    checks.push(Check::le("Gaussian norm rel err, radius 200", (r.norm_sq_freq - exact).abs() / exact, 5e-3));

    let probes: Vec<Vec<f64>> = (0..11).map(|k| vec![-5.0 + k as f64]).collect();
    let m = mutual_inverse_check(&g1, gauss, &d1, 200.0, npp, &probes).map_err(|e| e.to_string())?;
    checks.push(Check::le("mutual inverse N=1", m.max_abs_err, 5e-3));

    let d2 = BoxDomain::for_radius(4.0, 2, 16.0, npp, &[]).map_err(|e| e.to_string())?;
    let g2 = d2.sample(gauss);
    let probes2: Vec<Vec<f64>> =
        [-3.0, -1.0, 0.0, 1.5, 3.2].iter().flat_map(|&x| [-2.5, 0.0, 2.0].map(|y| vec![x, y])).collect();
    let m2 = mutual_inverse_check(&g2, gauss, &d2, 16.0, npp, &probes2).map_err(|e| e.to_string())?;
    checks.push(Check::le("mutual inverse N=2", m2.max_abs_err, 1e-2));

    let b1 = BoxDomain::for_radius(1.0, 1, 200.0, npp, &[]).map_err(|e| e.to_string())?;
    let one = b1.sample(|_| c(1.0));
    let r1 = box_inversion_check(&one, &b1, 200.0, npp, &[0.5]).map_err(|e| e.to_string())?;
    checks.push(Check::le("box inversion N=1, f=1, t=0.5", (r1.rhs - c(0.5)).norm(), 5e-3));
    let b1c = BoxDomain::for_radius(2.0, 1, 200.0, npp, &[]).map_err(|e| e.to_string())?;
    let cosine = b1c.sample(|t| c(t[0].cos()));
    let r1c = box_inversion_check(&cosine, &b1c, 200.0, npp, &[1.0]).map_err(|e| e.to_string())?;
    checks.push(Check::le("box inversion N=1, f=cos, t=1", (r1c.rhs - c(1f64.sin())).norm(), 5e-3));

    let b2 = BoxDomain::for_radius(1.0, 2, 64.0, npp, &[]).map_err(|e| e.to_string())?;
    let one2 = b2.sample(|_| c(1.0));
    let r2 = box_inversion_check(&one2, &b2, 64.0, npp, &[0.5, 0.25]).map_err(|e| e.to_string())?;
    checks.push(Check::le("box inversion N=2, f=1, t=(0.5,0.25)", (r2.rhs - c(0.125)).norm(), 2e-2));
    Ok(checks)
}

fn criterion_10() -> CheckResult {
    let run = || -> Result<String, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_rkhs-invert"))
            .args(["verify", "--suite", "all", "--seed", "42"])
            .output()
            .map_err(|e| e.to_string())?;
        let mut json: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("bad JSON: {e}"))?;
        json["environment"]["timestamp"] = serde_json::Value::Null;
        Ok(json.to_string())
    };
    let (first, second) = (run()?, run()?);
    Ok(vec![Check::le("differing output bytes", if first == second { 0.0 } else { 1.0 }, 0.0)])
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (1, "reproducing property", criterion_1, Duration::from_secs(5)),
        (2, "isometry of the indefinite transform", criterion_2, Duration::from_secs(1)),
        (3, "contraction and equality case", criterion_3, Duration::from_secs(10)),
        (4, "kernel identities", criterion_4, Duration::from_secs(5)),
        (5, "sinc product integral", criterion_5, Duration::from_secs(60)),
        (6, "inversion round trip", criterion_6, Duration::from_secs(10)),
        (7, "generalized inversion", criterion_7, Duration::from_secs(30)),
        (8, "orthonormal system coefficients", criterion_8, Duration::from_secs(10)),
        (9, "Plancherel at desk scale", criterion_9, Duration::from_secs(300)),
        (10, "determinism", criterion_10, Duration::from_secs(600)),
    ];
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failures = 0;
    for (id, title, run, budget) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        match result {
            Ok(checks) => {
                let ok = checks.iter().all(Check::pass) && elapsed <= budget;
                failures += usize::from(!ok);
                println!(
                    "criterion {id:>2} {}: {title} ({:.2} s, budget {} s)",
                    if ok { "PASS" } else { "FAIL" },
                    elapsed.as_secs_f64(),
                    budget.as_secs()
                );
                for ch in &checks {
                    println!(
                        "    [{}] {}: {:.3e} (tolerance {:.1e})",
                        if ch.pass() { "ok" } else { "x" },
                        ch.name,
                        ch.measured,
                        ch.tolerance
                    );
                }
            }
            Err(e) => {
                failures += 1;
                println!("criterion {id:>2} FAIL: {title}: {e}");
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
