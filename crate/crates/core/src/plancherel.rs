//! Truncated Fourier and conjugate-Fourier transforms on boxes `I_a^N`,
//! evaluated by direct quadrature, and the checks built on them.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{
    build_grid_with_breaks, complex_sum, oscillatory_panels, truncate_line, ComplexSum, GridSpace, HVector, Interval,
    QuadGrid, Weight, MAX_GRID_NODES,
};
use crate::spaces::paley_wiener::SERIES_THRESHOLD;

pub const MAX_DIMS: usize = 3;

/// Frequency radius per unit of `a·N` below which truncation error is not
/// expected to be small.
pub const RECOMMENDED_RADIUS_FACTOR: f64 = 50.0;

fn check_dims(dims: usize) -> Result<()> {
    if dims == 0 || dims > MAX_DIMS {
        return Err(Error::InvalidParameter(format!("dimension must be in 1..={MAX_DIMS}, got {dims}")));
    }
    Ok(())
}

fn cube(grid: QuadGrid, dims: usize) -> Result<Arc<GridSpace>> {
    let axis = Arc::new(grid);
    GridSpace::from_axes(vec![axis; dims])
}

/// The box `(-a, a)^N` with identical composite rules on every axis.
#[derive(Debug, Clone)]
pub struct BoxDomain {
    a: f64,
    space: Arc<GridSpace>,
}

impl BoxDomain {
    pub fn new(a: f64, dims: usize, panels: usize, nodes_per_panel: usize, breaks: &[f64]) -> Result<Self> {
        check_dims(dims)?;
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("box half-width must be positive, got {a}")));
        }
        let grid = build_grid_with_breaks(&Interval::finite(-a, a), panels, nodes_per_panel, &Weight::unit(), breaks)?;
        Ok(Self { a, space: cube(grid, dims)? })
    }

    /// Resolves `e^{-itx}` for `|x| ≤ radius`, at least four panels per axis.
    pub fn for_radius(a: f64, dims: usize, radius: f64, nodes_per_panel: usize, breaks: &[f64]) -> Result<Self> {
        let panels = oscillatory_panels(2.0 * a, radius, nodes_per_panel).max(4);
        Self::new(a, dims, panels, nodes_per_panel, breaks)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn dims(&self) -> usize {
        self.space.dims()
    }

    pub fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> Complex64) -> HVector {
        HVector::from_fn(self.space.clone(), f)
    }
}

/// Truncation `(-radius, radius)^N` of frequency space.
#[derive(Debug, Clone)]
pub struct FreqGrid {
    radius: f64,
    space: Arc<GridSpace>,
}

impl FreqGrid {
    /// Resolves integrands oscillating at up to `omega` in each frequency variable.
    pub fn new(radius: f64, dims: usize, omega: f64, nodes_per_panel: usize) -> Result<Self> {
        check_dims(dims)?;
        let interval = truncate_line(radius)?;
        let panels = oscillatory_panels(2.0 * radius, omega.max(1.0), nodes_per_panel).max(4);
        let grid = build_grid_with_breaks(&interval, panels, nodes_per_panel, &Weight::unit(), &[0.0])?;
        Ok(Self { radius, space: cube(grid, dims)? })
    }

    /// Products of two transforms of box-supported functions oscillate at up to `2a`.
    pub fn for_box(domain: &BoxDomain, radius: f64, nodes_per_panel: usize) -> Result<Self> {
        Self::new(radius, domain.dims(), 2.0 * domain.a, nodes_per_panel)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dims(&self) -> usize {
        self.space.dims()
    }

    pub fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }
}

/// Contracts axis `axis` of a row-major tensor against
/// `w_j ρ_j e^{i·sign·t_j·x_m}`, producing one output slot per `x_m`.
fn mode_product(
    values: &[Complex64],
    shape: &[usize],
    axis: usize,
    grid: &QuadGrid,
    xs: &[f64],
    sign: f64,
) -> Vec<Complex64> {
    let n = shape[axis];
    let post: usize = shape[axis + 1..].iter().product();
    let m = xs.len();
    let nodes = grid.nodes();
    let wr: Vec<f64> = grid.weights().iter().zip(grid.rho()).map(|(w, r)| w * r).collect();
    let pre: usize = shape[..axis].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); pre * m * post];
    out.par_chunks_mut(post).enumerate().for_each(|(slot, chunk)| {
        let (p, i) = (slot / m, slot % m);
        let x = xs[i];
        let mut acc = vec![ComplexSum::new(); post];
        for j in 0..n {
            let coef = Complex64::from_polar(wr[j], sign * nodes[j] * x);
            let row = &values[(p * n + j) * post..(p * n + j + 1) * post];
            for (a, v) in acc.iter_mut().zip(row) {
                a.add(coef * v);
            }
        }
        for (o, a) in chunk.iter_mut().zip(&acc) {
            *o = a.value();
        }
    });
    out
}

/// `(2π)^{-N/2} Σ_nodes g(t) e^{i·sign·t·x} w(t)` at the tensor grid `∏ xs_k`.
fn separable_transform(g: &HVector, sign: f64, xs: &[&[f64]]) -> Result<Vec<Complex64>> {
    let space = g.space();
    if xs.len() != space.dims() {
        return Err(Error::ArityMismatch { expected: space.dims(), got: xs.len() });
    }
    let out_len = xs.iter().try_fold(1usize, |acc, x| acc.checked_mul(x.len()));
    match out_len {
        Some(n) if n <= MAX_GRID_NODES => {}
        Some(n) => return Err(Error::GridTooLarge { nodes: n, cap: MAX_GRID_NODES }),
        None => return Err(Error::GridTooLarge { nodes: usize::MAX, cap: MAX_GRID_NODES }),
    }
    let mut shape = space.shape().to_vec();
    let mut values = g.values().to_vec();
    for k in 0..space.dims() {
        values = mode_product(&values, &shape, k, space.axis(k), xs[k], sign);
        shape[k] = xs[k].len();
    }
    let norm = (2.0 * PI).powf(-(space.dims() as f64) / 2.0);
    values.iter_mut().for_each(|v| *v *= norm);
    Ok(values)
}

/// A quadrature Fourier-type transform of sampled data, evaluable anywhere.
#[derive(Debug, Clone)]
pub struct FourierImage {
    g: HVector,
    sign: f64,
}

impl FourierImage {
    pub fn dims(&self) -> usize {
        self.g.space().dims()
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        let xs: Vec<[f64; 1]> = x.iter().map(|&v| [v]).collect();
        let refs: Vec<&[f64]> = xs.iter().map(|v| v.as_slice()).collect();
        Ok(separable_transform(&self.g, self.sign, &refs)?[0])
    }

    /// Values at every node of `target`, in its row-major order.
    pub fn on(&self, target: &Arc<GridSpace>) -> Result<HVector> {
        let axes: Vec<&[f64]> = target.axes().iter().map(|g| g.nodes()).collect();
        HVector::new(target.clone(), separable_transform(&self.g, self.sign, &axes)?)
    }
}

/// `F(fχ)(x) = (2π)^{-N/2} ∫_{box} f(t) e^{-it·x} dt` for samples on any grid space.
pub fn fourier_on(f: &HVector) -> FourierImage {
    FourierImage { g: f.clone(), sign: -1.0 }
}

/// `F*g(t) = (2π)^{-N/2} ∫ g(x) e^{it·x} dx` for samples on any grid space.
pub fn conj_fourier_on(g: &HVector) -> FourierImage {
    FourierImage { g: g.clone(), sign: 1.0 }
}

pub fn fourier_truncated(f: &HVector, domain: &BoxDomain) -> Result<FourierImage> {
    if !f.space().same_as(domain.space()) {
        return Err(Error::GridMismatch);
    }
    Ok(fourier_on(f))
}

pub fn conj_fourier_truncated(g: &HVector, freq: &FreqGrid) -> Result<FourierImage> {
    if !g.space().same_as(freq.space()) {
        return Err(Error::GridMismatch);
    }
    Ok(conj_fourier_on(g))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlancherelReport {
    /// `∫_{box} |f|²`.
    pub norm_sq_time: f64,
    /// `∫_{freq box} |F(fχ)|²`.
    pub norm_sq_freq: f64,
    pub rel_err: f64,
    pub radius: f64,
    /// `radius ≥ 50·a·N`.
    pub radius_recommended: bool,
}

pub fn plancherel_norm_check(
    f: &HVector,
    domain: &BoxDomain,
    radius: f64,
    nodes_per_panel: usize,
) -> Result<PlancherelReport> {
    let freq = FreqGrid::for_box(domain, radius, nodes_per_panel)?;
    let image = fourier_truncated(f, domain)?.on(freq.space())?;
    let norm_sq_time = f.norm_sq();
    let norm_sq_freq = image.norm_sq();
    Ok(PlancherelReport {
        norm_sq_time,
        norm_sq_freq,
        rel_err: (norm_sq_freq - norm_sq_time).abs() / norm_sq_time,
        radius,
        radius_recommended: radius >= RECOMMENDED_RADIUS_FACTOR * domain.a * domain.dims() as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutualInverseReport {
    pub max_abs_err: f64,
    pub probes: usize,
    pub radius: f64,
}

/// `max |F*F(fχ)(t) − f(t)|` over probes at least `0.1·a` inside the box.
pub fn mutual_inverse_check(
    f: &HVector,
    exact: impl Fn(&[f64]) -> Complex64,
    domain: &BoxDomain,
    radius: f64,
    nodes_per_panel: usize,
    probes: &[Vec<f64>],
) -> Result<MutualInverseReport> {
    let margin = 0.1 * domain.a;
    for t in probes {
        if t.len() != domain.dims() {
            return Err(Error::ArityMismatch { expected: domain.dims(), got: t.len() });
        }
        if t.iter().any(|&tj| tj.abs() > domain.a - margin) {
            return Err(Error::OutsideDomain(format!("probe {t:?} is within 0.1·a of the boundary")));
        }
    }
    let freq = FreqGrid::for_box(domain, radius, nodes_per_panel)?;
    let image = fourier_truncated(f, domain)?.on(freq.space())?;
    let back = conj_fourier_truncated(&image, &freq)?;
    let errs = probes.iter().map(|t| Ok((back.eval(t)? - exact(t)).norm())).collect::<Result<Vec<f64>>>()?;
    Ok(MutualInverseReport { max_abs_err: errs.into_iter().fold(0.0, f64::max), probes: probes.len(), radius })
}

/// `∫_{(0,t)} e^{isx} ds = (e^{itx} − 1)/(ix)`, by series near `x = 0`.
pub fn box_factor(t: f64, x: f64) -> Complex64 {
    if x.abs() < SERIES_THRESHOLD {
        let z = Complex64::new(0.0, t * x);
        t * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0)
    } else {
        (Complex64::new(0.0, t * x).exp() - 1.0) / Complex64::new(0.0, x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxInversionReport {
    /// `∫_{I(t)} f`.
    pub lhs: Complex64,
    /// `(2π)^{-N/2} ∫ F(fχ)(x) ∏ (e^{it_j x_j} − 1)/(i x_j) dx`.
    pub rhs: Complex64,
    pub abs_err: f64,
    pub radius: f64,
}

/// The indefinite integral over `I(t) = ∏(0, t_j)` recovered from the
/// truncated Fourier transform.
pub fn box_inversion_check(
    f: &HVector,
    domain: &BoxDomain,
    radius: f64,
    nodes_per_panel: usize,
    t: &[f64],
) -> Result<BoxInversionReport> {
    let dims = domain.dims();
    if t.len() != dims {
        return Err(Error::ArityMismatch { expected: dims, got: t.len() });
    }
    if dims > 2 {
        return Err(Error::InvalidParameter("box inversion is limited to N ≤ 2".into()));
    }
    if t.iter().any(|&tj| !(tj > 0.0 && tj < domain.a)) {
        return Err(Error::OutsideDomain(format!("t = {t:?} not in (0, {})^{dims}", domain.a)));
    }
    if !f.space().same_as(domain.space()) {
        return Err(Error::GridMismatch);
    }
    let space = domain.space();
    let partial = (0..dims).map(|k| space.axis(k).partial_weights(0.0, t[k])).collect::<Result<Vec<_>>>()?;
    let lhs = complex_sum(f.values().iter().enumerate().map(|(idx, v)| {
        let mut w = 1.0;
        let mut rem = idx;
        for k in (0..dims).rev() {
            let n = space.shape()[k];
            w *= partial[k][rem % n];
            rem /= n;
        }
        v * w
    }));

    let freq = FreqGrid::for_box(domain, radius, nodes_per_panel)?;
    let image = fourier_truncated(f, domain)?.on(freq.space())?;
    let fs = freq.space();
    let factors: Vec<Vec<Complex64>> =
        (0..dims).map(|k| fs.axis(k).nodes().iter().map(|&x| box_factor(t[k], x)).collect()).collect();
    let norm = (2.0 * PI).powf(-(dims as f64) / 2.0);
    let rhs = norm
        * complex_sum(image.values().iter().zip(fs.measure()).enumerate().map(|(idx, (v, m))| {
            let mut h = Complex64::new(1.0, 0.0);
            let mut rem = idx;
            for k in (0..dims).rev() {
                let n = fs.shape()[k];
                h *= factors[k][rem % n];
                rem /= n;
            }
            v * h * m
        }));
    Ok(BoxInversionReport { lhs, rhs, abs_err: (lhs - rhs).norm(), radius })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncationStep {
    pub a: f64,
    pub max_abs_err: f64,
}

/// `max_x |F(fχ_{I_a})(x) − F(f)(x)|` over `probes`, for each half-width in `widths`.
pub fn truncation_study(
    f: impl Fn(f64) -> Complex64,
    exact: impl Fn(f64) -> Complex64,
    widths: &[f64],
    probes: &[f64],
    nodes_per_panel: usize,
) -> Result<Vec<TruncationStep>> {
    let max_x = probes.iter().fold(1.0_f64, |m, x| m.max(x.abs()));
    widths
        .iter()
        .map(|&a| {
            let domain = BoxDomain::for_radius(a, 1, max_x, nodes_per_panel, &[])?;
            let samples = domain.sample(|t| f(t[0]));
            let image = fourier_truncated(&samples, &domain)?;
            let errs =
                probes.iter().map(|&x| Ok((image.eval(&[x])? - exact(x)).norm())).collect::<Result<Vec<f64>>>()?;
            Ok(TruncationStep { a, max_abs_err: errs.into_iter().fold(0.0, f64::max) })
        })
        .collect()
}
