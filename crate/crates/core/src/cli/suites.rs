//! Verification suites behind `verify`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::RunConfig;
use super::report::CheckRecord;
use crate::error::{Error, Result};
use crate::inversion::{
    fourier_coeff_invert, generalized_invert_at, invert_at, isometry_defect, restriction_isometry_check,
    CoefficientSequence, Cons, IdentitySequence, IndefiniteIntegralSequence, TransformationSequence,
};
use crate::numerics::{ExtReal, HVector, Interval, Weight};
use crate::plancherel::{
    box_inversion_check, conj_fourier_truncated, fourier_on, fourier_truncated, mutual_inverse_check,
    plancherel_norm_check, BoxDomain, FreqGrid,
};
use crate::rkhs::{build_span_basis, contraction_check, kernel_eval, transform, FeatureMap};
use crate::spaces::{
    pw_kernel, sinc_identity_check, sobolev_kernel, tensor_feature, tensor_kernel, KernelFn, PwFeatureMap, PwSpec,
    SobolevFeatureMap, SobolevSpace, SobolevSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Reproducing,
    Isometry,
    Contraction,
    Inversion,
    GeneralizedInversion,
    Cons,
    Sinc,
    Restriction,
    PlancherelNorm,
    MutualInverse,
    BoxInversion,
    Tensor,
    All,
}

impl Suite {
    pub const EACH: [Suite; 12] = [
        Suite::Reproducing,
        Suite::Isometry,
        Suite::Contraction,
        Suite::Inversion,
        Suite::GeneralizedInversion,
        Suite::Cons,
        Suite::Sinc,
        Suite::Restriction,
        Suite::PlancherelNorm,
        Suite::MutualInverse,
        Suite::BoxInversion,
        Suite::Tensor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reproducing => "reproducing",
            Suite::Isometry => "isometry",
            Suite::Contraction => "contraction",
            Suite::Inversion => "inversion",
            Suite::GeneralizedInversion => "generalized-inversion",
            Suite::Cons => "cons",
            Suite::Sinc => "sinc",
            Suite::Restriction => "restriction",
            Suite::PlancherelNorm => "plancherel-norm",
            Suite::MutualInverse => "mutual-inverse",
            Suite::BoxInversion => "box-inversion",
            Suite::Tensor => "tensor",
            Suite::All => "all",
        }
    }

    pub fn valid_names() -> String {
        Self::EACH.iter().map(|s| s.name()).chain(["all"]).collect::<Vec<_>>().join(", ")
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::EACH.into_iter().chain([Suite::All]).find(|suite| suite.name() == s).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown suite '{s}'; valid suites: {}", Suite::valid_names()))
        })
    }
}

/// Runs one suite, or every suite with check names prefixed by suite name.
pub fn run_suite(suite: Suite, cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                for mut check in run_suite(s, cfg)? {
                    check.name = format!("{s}/{}", check.name);
                    all.push(check);
                }
            }
            Ok(all)
        }
        Suite::Reproducing => reproducing(cfg),
        Suite::Isometry => isometry(cfg),
        Suite::Contraction => contraction(cfg),
        Suite::Inversion => inversion(cfg),
        Suite::GeneralizedInversion => generalized_inversion(cfg),
        Suite::Cons => cons(cfg),
        Suite::Sinc => sinc(cfg),
        Suite::Restriction => restriction(cfg),
        Suite::PlancherelNorm => plancherel_norm(cfg),
        Suite::MutualInverse => mutual_inverse(cfg),
        Suite::BoxInversion => box_inversion(cfg),
        Suite::Tensor => tensor(cfg),
    }
}

fn rng(cfg: &RunConfig, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(cfg.seed);
    r.set_stream(stream);
    r
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn spec(lo: f64, hi: f64, anchor: f64, weight: Weight) -> Result<SobolevSpec> {
    SobolevSpec::new(Interval::finite(lo, hi), ExtReal::from(anchor), weight)
}

fn random_complex(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

fn max(iter: impl IntoIterator<Item = f64>) -> f64 {
    iter.into_iter().fold(0.0, f64::max)
}

type Smooth = (&'static str, fn(f64) -> f64, fn(f64) -> f64);

/// A test function and its integral from 0.
type Antiderivative = (&'static str, fn(f64) -> f64, fn(f64) -> f64);

/// Smooth functions vanishing at 0, with their derivatives.
const SMOOTH: [Smooth; 3] = [
    ("sin(2t)", |t| (2.0 * t).sin(), |t| 2.0 * (2.0 * t).cos()),
    ("t e^t", |t| t * t.exp(), |t| (1.0 + t) * t.exp()),
    ("1-cos(3t)", |t| 1.0 - (3.0 * t).cos(), |t| 3.0 * (3.0 * t).sin()),
];

fn sobolev_cases() -> Result<Vec<(&'static str, SobolevSpec)>> {
    Ok(vec![
        ("rho=1 on (0,1)", spec(0.0, 1.0, 0.0, Weight::unit())?),
        ("rho=1+t on (0,1)", spec(0.0, 1.0, 0.0, Weight::one_plus_t())?),
        ("rho=1 on (-1,1)", spec(-1.0, 1.0, 0.0, Weight::unit())?),
        ("rho=1+t on (-1,1)", spec(-1.0, 1.0, 0.0, Weight::one_plus_t())?),
    ])
}

fn reproducing(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut rng = rng(cfg, 1);
    let mut checks = Vec::new();
    for (label, s) in sobolev_cases()? {
        let (lo, hi) = s.interval().bounds()?;
        let ys: Vec<f64> = (0..20).map(|_| rng.gen_range(lo..hi)).collect();
        let h = SobolevSpace::new(s, cfg.panels, cfg.nodes_per_panel, &ys)?;
        for (name, f, df) in SMOOTH {
            let g = h.from_derivative(|t| c(df(t)));
            let errs = ys.iter().map(|&y| Ok((h.evaluate(&g, y)? - c(f(y))).norm())).collect::<Result<Vec<_>>>()?;
            checks.push(CheckRecord::at_most(format!("{label}, f={name}"), max(errs), 1e-6));
        }
    }
    Ok(checks)
}

fn isometry(_cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let cases = [
        ("rho=1, c=0", spec(0.0, 1.0, 0.0, Weight::unit())?),
        ("rho=1+t, c=0", spec(0.0, 1.0, 0.0, Weight::one_plus_t())?),
        ("rho=1, c=0.5", spec(0.0, 1.0, 0.5, Weight::unit())?),
        ("rho=1+t, c=0.5", spec(0.0, 1.0, 0.5, Weight::one_plus_t())?),
    ];
    let f = |t: f64| Complex64::new((3.0 * t).cos() + t * t, (-t).exp());
    let mut checks = Vec::new();
    for (label, s) in cases {
        let phi = SobolevFeatureMap::new(s.clone(), 32, 16, &[])?;
        let h = SobolevSpace::on_space(s, phi.space().clone())?;
        let fv = HVector::from_fn_1d(phi.space().clone(), f);
        let values = phi.indefinite_transform(&fv)?.at_nodes()?;
        let norm_hat = h.norm_sq_from_values(&values)?.sqrt();
        let norm = fv.norm();
        checks.push(CheckRecord::at_most(
            format!("relative norm error, {label}"),
            (norm_hat - norm).abs() / norm,
            1e-8,
        ));
    }
    Ok(checks)
}

fn contraction(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut rng = rng(cfg, 3);
    let s = spec(0.0, 1.0, 0.0, Weight::one_plus_t())?;
    let points: Vec<f64> = (1..=12).map(|k| k as f64 / 13.0).collect();
    let phi = SobolevFeatureMap::new(s, cfg.panels, cfg.nodes_per_panel, &points)?;
    let basis = build_span_basis(&phi, &points)?;
    let mut min_slack = f64::INFINITY;
    for _ in 0..100 {
        let a: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let f = HVector::from_fn_1d(phi.space().clone(), |t| {
            c(a.iter().enumerate().map(|(k, ak)| ak * (PI * k as f64 * t).cos()).sum())
        });
        min_slack = min_slack.min(contraction_check(&f, &phi, &basis)?.slack);
    }
    let mut eq: f64 = 0.0;
    for _ in 0..20 {
        let f = basis.combine(&random_complex(&mut rng, points.len()))?;
        eq = eq.max(contraction_check(&f, &phi, &basis)?.slack.abs());
    }
    Ok(vec![
        CheckRecord::at_most("negated minimum slack over 100 random f", -min_slack, 1e-8),
        CheckRecord::at_most("equality defect for span members", eq, 1e-6),
    ])
}

fn inversion(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut rng = rng(cfg, 6);
    let points: Vec<f64> = match &cfg.basis_points {
        Some(p) => p.clone(),
        None => (0..15).map(|_| rng.gen_range(-0.95..0.95)).collect(),
    };
    let n = cfg.probes.max(1);
    let probes: Vec<f64> = (1..=n).map(|j| -1.0 + 2.0 * j as f64 / (n + 1) as f64).collect();
    let breaks: Vec<f64> = points.iter().chain(&probes).copied().collect();
    let s = spec(-1.0, 1.0, 0.0, Weight::unit())?;
    let h = SobolevSpace::new(s.clone(), cfg.panels, cfg.nodes_per_panel, &breaks)?;
    let basis = build_span_basis(&h, &points)?;
    let coeffs = random_complex(&mut rng, points.len());
    let f = basis.combine(&coeffs)?;
    let image = transform(&f, &h)?;
    let mut round_trip: f64 = 0.0;
    let mut schwarz = f64::NEG_INFINITY;
    for &t in &probes {
        let inv = invert_at(&image, &t, &h, &basis)?;
        let reference =
            coeffs.iter().zip(&points).map(|(a, &x)| Ok(a * sobolev_kernel(&s, x, t)?)).sum::<Result<Complex64>>()?;
        round_trip = round_trip.max((inv.value - reference).norm());
        schwarz = schwarz.max(inv.value.norm() - inv.bound);
    }
    Ok(vec![
        CheckRecord::at_most(format!("round trip max error over {n} probes"), round_trip, 1e-5),
        CheckRecord::at_most("Schwarz bound excess", schwarz.max(0.0), 1e-6),
    ])
}

fn generalized_inversion(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut rng = rng(cfg, 7);
    let radius = cfg.radius.unwrap_or(200.0);
    let probes = [0.25, 0.5, 1.0];
    let pw = PwSpec::new(cfg.a)?;
    let seq = IndefiniteIntegralSequence::new(pw, radius, cfg.nodes_per_panel, &probes)?;
    let map = seq.map();
    let r = radius.floor() as i64;
    let points: Vec<f64> = (-r..=r).map(|k| k as f64).collect();
    let basis = build_span_basis(map, &points)?;
    let cases: [Antiderivative; 2] = [("f=1", |_| 1.0, |t| t), ("f=cos", f64::cos, f64::sin)];
    let mut checks = Vec::new();
    for (label, f, antiderivative) in cases {
        let fv = HVector::from_fn_1d(map.space().clone(), |t| c(f(t)));
        let image = transform(&fv, map)?;
        for t in probes {
            let inv = generalized_invert_at(&seq, &image, &t, &basis)?;
            checks.push(
                CheckRecord::near(format!("{label}, t={t}"), inv.value.re, antiderivative(t), 1e-4)
                    .with_note(format!("imaginary part {:.3e}", inv.value.im)),
            );
        }
    }

    let defect = (0..20)
        .map(|_| {
            let (a, b) = (random_complex(&mut rng, 4), random_complex(&mut rng, 4));
            let f =
                HVector::from_fn_1d(map.space().clone(), |t| a[0] + a[1] * t + a[2] * t.sin() + a[3] * (2.0 * t).cos());
            let g = HVector::from_fn_1d(map.space().clone(), |t| b[0] * t * t + b[1] * t.exp() + b[2] + b[3] * t);
            isometry_defect(&seq, &f, &g)
        })
        .collect::<Result<Vec<_>>>()?;
    checks.push(CheckRecord::at_most("indefinite-integral isometry contract, 20 pairs", max(defect), 1e-8));

    let pts = [-0.6, -0.1, 0.4, 0.8];
    let ts = [-0.3, 0.25, 0.6];
    let breaks: Vec<f64> = pts.iter().chain(&ts).copied().collect();
    let h = SobolevSpace::new(spec(-1.0, 1.0, 0.0, Weight::unit())?, 8, 16, &breaks)?;
    let hb = build_span_basis(&h, &pts)?;
    let id = IdentitySequence::new(h.clone());
    let f = hb.combine(&random_complex(&mut rng, pts.len()))?;
    let image = transform(&f, &h)?;
    let diffs = ts
        .iter()
        .map(|t| Ok((invert_at(&image, t, &h, &hb)?.value - generalized_invert_at(&id, &image, t, &hb)?.value).norm()))
        .collect::<Result<Vec<_>>>()?;
    checks.push(CheckRecord::at_most("identity sequence vs direct inversion", max(diffs), 1e-10));
    let id_defect = (0..20)
        .map(|_| {
            let f = hb.combine(&random_complex(&mut rng, pts.len()))?;
            let g = hb.combine(&random_complex(&mut rng, pts.len()))?;
            isometry_defect(&id, &f, &g)
        })
        .collect::<Result<Vec<_>>>()?;
    checks.push(CheckRecord::at_most("identity isometry contract, 20 pairs", max(id_defect), 1e-8));

    // The box-inversion right-hand side against the sequence, for a span member.
    let small = [-2.0, -1.0, 0.0, 1.0, 2.0];
    let small_basis = build_span_basis(map, &small)?;
    let coeffs = random_complex(&mut rng, small.len());
    let member = small_basis.combine(&coeffs)?;
    let image = transform(&member, map)?;
    let via_sequence = generalized_invert_at(&seq, &image, &0.5, &small_basis)?.value;
    let domain = BoxDomain::for_radius(cfg.a, 1, radius, cfg.nodes_per_panel, &[])?;
    let s2pi = (2.0 * PI).sqrt();
    let sampled = domain
        .sample(|t| coeffs.iter().zip(&small).map(|(a, &x)| a * Complex64::new(0.0, t[0] * x).exp() / s2pi).sum());
    let box_rhs = box_inversion_check(&sampled, &domain, radius, cfg.nodes_per_panel, &[0.5])?.rhs;
    checks.push(CheckRecord::at_most(
        "box-inversion rhs vs sequence inversion, t=0.5",
        (box_rhs - via_sequence).norm(),
        1e-3,
    ));
    Ok(checks)
}

fn cons(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let count = 16;
    let pw = PwSpec::new(cfg.a)?;
    let max_freq = PI * (count / 2) as f64 / cfg.a;
    let map = PwFeatureMap::for_frequencies(pw, max_freq + 1.0, cfg.nodes_per_panel, &[])?;
    let system = Cons::exponentials(map.space().clone(), count)?;
    let points = (1..=count).map(|n| system.frequency(n)).collect::<Result<Vec<_>>>()?;
    let basis = build_span_basis(&map, &points)?;
    let seq = CoefficientSequence::new(map.clone(), system.clone())?;
    let f = HVector::from_fn_1d(map.space().clone(), |t| Complex64::new((-t * t).exp() * (1.0 + t), t.sin()));
    let image = transform(&f, &map)?;
    let direct = system.coefficients(&f)?;
    let recovered =
        (1..=count).map(|n| Ok(fourier_coeff_invert(&seq, &image, n, &basis)?.value)).collect::<Result<Vec<_>>>()?;
    let coeff_err = max(recovered.iter().zip(&direct).map(|(a, b)| (a - b).norm()));
    let errs =
        (0..=count).map(|n| Ok(f.sub(&system.synthesize(&recovered[..n])?)?.norm())).collect::<Result<Vec<_>>>()?;
    let increase = max(errs.windows(2).map(|w| w[1] - w[0]));

    let g1 = system.get(1)?.clone();
    let image1 = transform(&g1, &map)?;
    let unit =
        (1..=count).map(|n| Ok(fourier_coeff_invert(&seq, &image1, n, &basis)?.value)).collect::<Result<Vec<_>>>()?;
    let delta_err = max(unit.iter().enumerate().map(|(i, v)| (v - c(if i == 0 { 1.0 } else { 0.0 })).norm()));
    Ok(vec![
        CheckRecord::at_most("orthonormality defect", system.orthonormality_defect()?, 1e-10),
        CheckRecord::at_most("coefficients vs direct inner products, n <= 16", coeff_err, 1e-6),
        CheckRecord::at_most("reconstruction error increase in N", increase, 1e-12),
        CheckRecord::at_most("coefficients of g_1 vs delta", delta_err, 1e-8),
    ])
}

fn sinc(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let radius = cfg.radius.unwrap_or(1e4);
    let lattice: Vec<f64> = (0..5).map(|k| -1.6 + 0.8 * k as f64).collect();
    let mut checks = Vec::new();
    for a in [1.0, 2.0] {
        let mut worst: f64 = 0.0;
        for &x in &lattice {
            for &y in &lattice {
                worst = worst.max(sinc_identity_check(a, x, y, radius)?.abs_err);
            }
        }
        checks.push(CheckRecord::at_most(format!("5x5 lattice in (-2,2)^2, a={a}"), worst, 4.0 / radius + 1e-6));
    }
    let r = sinc_identity_check(1.0, 0.0, 0.0, radius)?;
    checks.push(CheckRecord::near("a=1, x=y=0 reproduces pi", r.lhs, PI, 3e-3));
    Ok(checks)
}

fn restriction(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let radius = cfg.radius.unwrap_or(1e4);
    let pw = PwSpec::new(cfg.a)?;
    let r = restriction_isometry_check(&pw, &[0.0, PI, 1.0, -2.0], radius)?;
    let zero = restriction_isometry_check(&pw, &[0.0], radius)?;
    Ok(vec![
        CheckRecord::at_most("kernel restriction inner products", r.kernel_max_err, 3e-3),
        CheckRecord::at_most("span norms vs L2 norms", r.norm_max_err, 3e-3),
        CheckRecord::at_most("norm of K(.,0)", zero.norm_max_err, 3e-3),
    ])
}

fn plancherel_norm(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let radius = cfg.radius.unwrap_or(200.0);
    let npp = cfg.nodes_per_panel;
    let gauss = |t: &[f64]| c(t.iter().map(|x| (-x * x).exp()).product());
    let mut checks = Vec::new();

    let d1 = BoxDomain::for_radius(6.0, 1, radius, npp, &[])?;
    let r = plancherel_norm_check(&d1.sample(gauss), &d1, radius, npp)?;
    let exact = (PI / 2.0).sqrt();
    let note = format!("radius {radius}, recommended minimum {}", 50.0 * 6.0);
    checks.push(CheckRecord::at_most("Gaussian on (-6,6): rel_err", r.rel_err, 5e-3).with_note(note));
    checks.push(CheckRecord::near(
        "Gaussian on (-6,6): frequency-side squared norm",
        r.norm_sq_freq,
        exact,
        5e-3 * exact,
    ));
    checks.push(CheckRecord::near("Gaussian on (-6,6): time-side squared norm", r.norm_sq_time, exact, 1e-12));

    let a = cfg.a;
    let s2pi = (2.0 * PI).sqrt();
    let phi0 = |_: &[f64]| c(1.0 / s2pi);
    let mut prev = f64::INFINITY;
    let mut increase: f64 = 0.0;
    for k in 0..4 {
        let rk = radius / 8.0 * f64::from(1 << k);
        let d = BoxDomain::for_radius(a, 1, rk, npp, &[])?;
        let rep = plancherel_norm_check(&d.sample(phi0), &d, rk, npp)?;
        if k == 3 {
            checks.push(CheckRecord::near("phi(0): time-side squared norm", rep.norm_sq_time, a / PI, 3e-3));
            checks.push(CheckRecord::near("phi(0): frequency-side squared norm", rep.norm_sq_freq, a / PI, 3e-3));
        }
        increase = increase.max(rep.rel_err - prev);
        prev = rep.rel_err;
    }
    checks.push(CheckRecord::at_most("phi(0): rel_err increase as radius doubles", increase, 0.0));

    let d2 = BoxDomain::for_radius(4.0, 2, 16.0, npp, &[])?;
    let r2 = plancherel_norm_check(&d2.sample(gauss), &d2, 16.0, npp)?;
    checks.push(
        CheckRecord::near(
            "Gaussian product on (-4,4)^2: frequency-side squared norm",
            r2.norm_sq_freq,
            PI / 2.0,
            5e-3 * PI / 2.0,
        )
        .with_note("radius 16; the node cap rules out 200 in two dimensions"),
    );
    Ok(checks)
}

fn mutual_inverse(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let radius = cfg.radius.unwrap_or(200.0);
    let npp = cfg.nodes_per_panel;
    let gauss = |t: &[f64]| c(t.iter().map(|x| (-x * x).exp()).product());
    let mut checks = Vec::new();

    let d1 = BoxDomain::for_radius(6.0, 1, radius, npp, &[])?;
    let probes: Vec<Vec<f64>> = (0..11).map(|k| vec![-5.0 + k as f64]).collect();
    let m = mutual_inverse_check(&d1.sample(gauss), gauss, &d1, radius, npp, &probes)?;
    checks.push(CheckRecord::at_most("Gaussian, N=1", m.max_abs_err, 5e-3));

    let a = cfg.a;
    let g2 = move |t: &[f64]| Complex64::new(0.0, PI * t[0] / a).exp() / (2.0 * a).sqrt();
    let da = BoxDomain::for_radius(a, 1, radius, npp, &[])?;
    let interior: Vec<Vec<f64>> = (0..9).map(|k| vec![a * (-0.8 + 0.2 * k as f64)]).collect();
    let m = mutual_inverse_check(&da.sample(g2), g2, &da, radius, npp, &interior)?;
    checks.push(CheckRecord::at_most("second orthonormal exponential, interior probes", m.max_abs_err, 2e-2));

    let d2 = BoxDomain::for_radius(4.0, 2, 16.0, npp, &[])?;
    let probes2: Vec<Vec<f64>> =
        [-3.0, -1.0, 0.0, 1.5, 3.2].iter().flat_map(|&x| [-2.5, 0.0, 2.0].map(|y| vec![x, y])).collect();
    let m2 = mutual_inverse_check(&d2.sample(gauss), gauss, &d2, 16.0, npp, &probes2)?;
    checks.push(CheckRecord::at_most("Gaussian product, N=2", m2.max_abs_err, 1e-2).with_note("radius 16"));

    let freq = FreqGrid::new(20.0, 1, 2.0, npp)?;
    let g =
        HVector::from_fn(freq.space().clone(), |x| Complex64::new((-x[0] * x[0]).exp(), x[0] / (1.0 + x[0] * x[0])));
    let direct = conj_fourier_truncated(&g, &freq)?;
    let via = fourier_on(&g.conj());
    let sym = [0.0, 0.3, -0.8, 2.5]
        .iter()
        .map(|&t| Ok((direct.eval(&[t])? - via.eval(&[t])?.conj()).norm()))
        .collect::<Result<Vec<_>>>()?;
    checks.push(CheckRecord::at_most("F* g = conj F conj g", max(sym), 1e-12));
    Ok(checks)
}

fn box_inversion(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let radius = cfg.radius.unwrap_or(200.0);
    let npp = cfg.nodes_per_panel;
    let mut checks = Vec::new();
    let one = |_: &[f64]| c(1.0);

    let b1 = BoxDomain::for_radius(1.0, 1, radius, npp, &[])?;
    let r = box_inversion_check(&b1.sample(one), &b1, radius, npp, &[0.5])?;
    checks.push(CheckRecord::near("N=1, f=1, t=0.5: lhs", r.lhs.re, 0.5, 1e-12));
    checks.push(CheckRecord::at_most("N=1, f=1, t=0.5: abs_err", r.abs_err, 5e-3));

    let b2 = BoxDomain::for_radius(2.0, 1, radius, npp, &[])?;
    let r = box_inversion_check(&b2.sample(|t| c(t[0].cos())), &b2, radius, npp, &[1.0])?;
    checks.push(CheckRecord::near("N=1, f=cos, t=1: lhs", r.lhs.re, 1f64.sin(), 1e-12));
    checks.push(CheckRecord::at_most("N=1, f=cos, t=1: abs_err", r.abs_err, 5e-3));

    let coarse = 64.0;
    let b3 = BoxDomain::for_radius(1.0, 2, coarse, npp, &[])?;
    let r = box_inversion_check(&b3.sample(one), &b3, coarse, npp, &[0.5, 0.25])?;
    checks.push(CheckRecord::near("N=2, f=1, t=(0.5,0.25): lhs", r.lhs.re, 0.125, 1e-12));
    checks.push(
        CheckRecord::at_most("N=2, f=1, t=(0.5,0.25): abs_err", r.abs_err, 2e-2).with_note(format!("radius {coarse}")),
    );
    Ok(checks)
}

fn tensor(cfg: &RunConfig) -> Result<Vec<CheckRecord>> {
    let mut rng = rng(cfg, 12);
    let pw = PwSpec::new(cfg.a)?;
    let sob = spec(0.0, 1.0, 0.0, Weight::one_plus_t())?;
    let k_pw = |x: &f64, y: &f64| pw_kernel(&pw, c(*x), c(*y));
    let k_sob = |x: &f64, y: &f64| c(sobolev_kernel(&sob, *x, *y).unwrap_or(f64::NAN));
    let kernels: [KernelFn<f64>; 2] = [&k_pw, &k_sob];
    let mut factor_err: f64 = 0.0;
    for _ in 0..25 {
        let x = [rng.gen_range(-3.0..3.0), rng.gen_range(0.05..0.95)];
        let y = [rng.gen_range(-3.0..3.0), rng.gen_range(0.05..0.95)];
        let product = tensor_kernel(&kernels, &x, &y)?;
        let reference = k_pw(&x[0], &y[0]) * k_sob(&x[1], &y[1]);
        factor_err = factor_err.max((product - reference).norm() / reference.norm().max(f64::MIN_POSITIVE));
    }

    let m1 = PwFeatureMap::for_frequencies(pw, 3.0, cfg.nodes_per_panel, &[])?;
    let m2 = PwFeatureMap::for_frequencies(PwSpec::new(2.0 * cfg.a)?, 3.0, cfg.nodes_per_panel, &[])?;
    let product = tensor_feature(vec![m1.clone(), m1.clone()])?;
    let mut gram_err: f64 = 0.0;
    for _ in 0..10 {
        let x = vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let y = vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
        let q = kernel_eval(&product, &x, &y)?;
        gram_err = gram_err.max((q - k_pw(&x[0], &y[0]) * k_pw(&x[1], &y[1])).norm());
    }

    let mixed = tensor_feature(vec![m1.clone(), m2.clone()])?;
    let f1 = HVector::from_fn_1d(m1.space().clone(), |t| Complex64::new(1.0 + t, 0.5 * t * t));
    let f2 = HVector::from_fn_1d(m2.space().clone(), |t| c((-t * t).exp()));
    let f = HVector::tensor_on(mixed.space().clone(), &[&f1, &f2])?;
    let (image, i1, i2) = (transform(&f, &mixed)?, transform(&f1, &m1)?, transform(&f2, &m2)?);
    let transform_err = (0..25)
        .map(|_| {
            let x = vec![rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)];
            Ok((image.evaluate(&x)? - i1.evaluate(&x[0])? * i2.evaluate(&x[1])?).norm())
        })
        .collect::<Result<Vec<_>>>()?;

    let d2 = BoxDomain::for_radius(1.0, 2, 5.0, cfg.nodes_per_panel, &[])?;
    let d1 = BoxDomain::for_radius(1.0, 1, 5.0, cfg.nodes_per_panel, &[])?;
    let h1 = |t: f64| Complex64::new(t.cos(), t);
    let h2 = |t: f64| c(1.0 - t * t);
    let tensor_samples = d2.sample(|t| h1(t[0]) * h2(t[1]));
    let (ft, ft1, ft2) = (
        fourier_truncated(&tensor_samples, &d2)?,
        fourier_truncated(&d1.sample(|t| h1(t[0])), &d1)?,
        fourier_truncated(&d1.sample(|t| h2(t[0])), &d1)?,
    );
    let fourier_err = (0..25)
        .map(|_| {
            let x = [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)];
            Ok((ft.eval(&x)? - ft1.eval(&x[..1])? * ft2.eval(&x[1..])?).norm())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(vec![
        CheckRecord::at_most("tensor kernel vs product of factor kernels (relative)", factor_err, 1e-12),
        CheckRecord::at_most("tensor feature Gram vs product of closed forms", gram_err, 1e-10),
        CheckRecord::at_most("transform of simple tensor vs product of transforms", max(transform_err), 1e-10),
        CheckRecord::at_most("N=2 Fourier of simple tensor vs product, 25 probes", max(fourier_err), 1e-10),
    ])
}
