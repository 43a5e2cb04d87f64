//! Inverse transforms: recovering `f(t)` (or `(Sf)(t)`) from `f̂` through
//! the operator-range inner product against the transformed kernel section.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{complex_sum, inner_weighted, ExtReal, GridSpace, HVector, Weight};
use crate::rkhs::{opr_inner, project_span, FeatureMap, SpanBasis, TransformImage};
use crate::spaces::paley_wiener::{line_grid, line_norm_sq, pw_kernel, sinc_factor, PwFeatureMap, PwSpec};
use crate::spaces::sobolev::{SobolevSpace, SobolevSpec};

/// Relative projection residual of a kernel section above which the span
/// basis is flagged as too coarse for that probe.
pub const COARSE_RESIDUAL: f64 = 1e-3;

/// A Hilbert space of functions on `T` with computable kernel sections.
pub trait EvaluableRkhs {
    type Point: Clone + fmt::Debug;
    type Element;

    fn kernel(&self, s: &Self::Point, t: &Self::Point) -> Result<Complex64>;

    /// `k_t`, with `u(t) = ⟨u, k_t⟩`.
    fn section(&self, t: &Self::Point) -> Result<Self::Element>;

    fn inner(&self, u: &Self::Element, v: &Self::Element) -> Result<Complex64>;

    fn evaluate(&self, u: &Self::Element, t: &Self::Point) -> Result<Complex64> {
        self.inner(u, &self.section(t)?)
    }
}

impl EvaluableRkhs for SobolevSpace {
    type Point = f64;
    type Element = HVector;

    fn kernel(&self, s: &f64, t: &f64) -> Result<Complex64> {
        SobolevSpace::kernel(self, *s, *t).map(|k| Complex64::new(k, 0.0))
    }

    fn section(&self, t: &f64) -> Result<HVector> {
        SobolevSpace::section(self, *t)
    }

    fn inner(&self, u: &HVector, v: &HVector) -> Result<Complex64> {
        inner_weighted(u, v)
    }
}

/// `ℓ²` truncated to indices `1..=count`, with `k_n = δ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceSpace {
    count: usize,
}

impl SequenceSpace {
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("sequence space needs at least one index".into()));
        }
        Ok(Self { count })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    fn check(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.count {
            return Err(Error::IndexOutOfRange { index: n, count: self.count });
        }
        Ok(())
    }
}

impl EvaluableRkhs for SequenceSpace {
    type Point = usize;
    type Element = Vec<Complex64>;

    fn kernel(&self, s: &usize, t: &usize) -> Result<Complex64> {
        self.check(*s)?;
        self.check(*t)?;
        Ok(Complex64::new(if s == t { 1.0 } else { 0.0 }, 0.0))
    }

    fn section(&self, t: &usize) -> Result<Vec<Complex64>> {
        self.check(*t)?;
        let mut e = vec![Complex64::new(0.0, 0.0); self.count];
        e[t - 1] = Complex64::new(1.0, 0.0);
        Ok(e)
    }

    fn inner(&self, u: &Vec<Complex64>, v: &Vec<Complex64>) -> Result<Complex64> {
        if u.len() != self.count || v.len() != self.count {
            return Err(Error::GridMismatch);
        }
        Ok(complex_sum(u.iter().zip(v).map(|(a, b)| a * b.conj())))
    }
}

/// `E →φ H →S W` with `S` an isometry into an RKHS `W` on `T`.
pub trait TransformationSequence {
    type Map: FeatureMap;
    type Target: EvaluableRkhs;

    fn map(&self) -> &Self::Map;

    fn target(&self) -> &Self::Target;

    fn apply(&self, f: &HVector) -> Result<<Self::Target as EvaluableRkhs>::Element>;

    /// `S* w_t`, the section of `W` pulled back into `H`.
    fn pullback_section(&self, t: &<Self::Target as EvaluableRkhs>::Point) -> Result<HVector>;
}

/// `|⟨Sf, Sg⟩_W − ⟨f, g⟩_H|`.
pub fn isometry_defect<S: TransformationSequence>(seq: &S, f: &HVector, g: &HVector) -> Result<f64> {
    let w = seq.target().inner(&seq.apply(f)?, &seq.apply(g)?)?;
    Ok((w - inner_weighted(f, g)?).norm())
}

/// `S = id` on a space that is its own feature map.
#[derive(Debug, Clone)]
pub struct IdentitySequence {
    space: SobolevSpace,
}

impl IdentitySequence {
    pub fn new(space: SobolevSpace) -> Self {
        Self { space }
    }
}

impl TransformationSequence for IdentitySequence {
    type Map = SobolevSpace;
    type Target = SobolevSpace;

    fn map(&self) -> &SobolevSpace {
        &self.space
    }

    fn target(&self) -> &SobolevSpace {
        &self.space
    }

    fn apply(&self, f: &HVector) -> Result<HVector> {
        Ok(f.clone())
    }

    fn pullback_section(&self, t: &f64) -> Result<HVector> {
        self.space.section(*t)
    }
}

/// `L²(I_a) → H_{0,1}(I_a)`, `f ↦ ∫_0^t f`, seen through the Paley–Wiener
/// feature map.
///
/// Elements of the target are stored by their derivatives, so `S` acts as
/// the identity on samples and `S* w_t = ±χ_{(0,t)}`. Probe points `t`
/// should be panel edges of the shared grid.
#[derive(Debug, Clone)]
pub struct IndefiniteIntegralSequence {
    map: PwFeatureMap,
    target: SobolevSpace,
}

impl IndefiniteIntegralSequence {
    /// Grid resolving frequencies up to `max_abs_x`, with breaks at 0 and `probes`.
    pub fn new(spec: PwSpec, max_abs_x: f64, nodes_per_panel: usize, probes: &[f64]) -> Result<Self> {
        let mut breaks = vec![0.0];
        breaks.extend_from_slice(probes);
        let map = PwFeatureMap::for_frequencies(spec, max_abs_x, nodes_per_panel, &breaks)?;
        Self::from_map(map)
    }

    pub fn from_map(map: PwFeatureMap) -> Result<Self> {
        let spec = SobolevSpec::new(map.spec().interval(), ExtReal::from(0.0), Weight::unit())?;
        let target = SobolevSpace::on_space(spec, map.space().clone())?;
        Ok(Self { map, target })
    }
}

impl TransformationSequence for IndefiniteIntegralSequence {
    type Map = PwFeatureMap;
    type Target = SobolevSpace;

    fn map(&self) -> &PwFeatureMap {
        &self.map
    }

    fn target(&self) -> &SobolevSpace {
        &self.target
    }

    fn apply(&self, f: &HVector) -> Result<HVector> {
        if !f.space().same_as(self.map.space()) {
            return Err(Error::GridMismatch);
        }
        Ok(f.clone())
    }

    fn pullback_section(&self, t: &f64) -> Result<HVector> {
        self.target.section(*t)
    }
}

/// Finite orthonormal system `g_1..g_count` on a one-dimensional grid space.
#[derive(Debug, Clone)]
pub struct Cons {
    space: std::sync::Arc<GridSpace>,
    functions: Vec<HVector>,
}

impl Cons {
    /// `g_k(t) = e^{iπ m t/a}/√(2a)` on `(-a, a)`, with `m = 0, 1, -1, 2, -2, …`.
    pub fn exponentials(space: std::sync::Arc<GridSpace>, count: usize) -> Result<Self> {
        if space.dims() != 1 {
            return Err(Error::InvalidParameter("exponential system needs a one-dimensional grid".into()));
        }
        if count == 0 {
            return Err(Error::InvalidParameter("empty orthonormal system".into()));
        }
        let (lo, hi) = space.axis(0).interval().bounds()?;
        if (lo + hi).abs() > 1e-12 * (hi - lo) {
            return Err(Error::InvalidParameter("exponential system needs a symmetric interval".into()));
        }
        let a = hi;
        let scale = 1.0 / (2.0 * a).sqrt();
        let functions = (1..=count)
            .map(|k| {
                let freq = PI * zigzag(k) as f64 / a;
                HVector::from_fn_1d(space.clone(), |t| Complex64::new(0.0, freq * t).exp() * scale)
            })
            .collect();
        Ok(Self { space, functions })
    }

    pub fn count(&self) -> usize {
        self.functions.len()
    }

    /// `g_n`, 1-based.
    pub fn get(&self, n: usize) -> Result<&HVector> {
        n.checked_sub(1)
            .and_then(|i| self.functions.get(i))
            .ok_or(Error::IndexOutOfRange { index: n, count: self.count() })
    }

    pub fn space(&self) -> &std::sync::Arc<GridSpace> {
        &self.space
    }

    /// Angular frequency of `g_n`.
    pub fn frequency(&self, n: usize) -> Result<f64> {
        self.get(n)?;
        let (_, a) = self.space.axis(0).interval().bounds()?;
        Ok(PI * zigzag(n) as f64 / a)
    }

    /// `max_{m,n} |⟨g_m, g_n⟩ − δ_mn|`.
    pub fn orthonormality_defect(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (m, gm) in self.functions.iter().enumerate() {
            for (n, gn) in self.functions.iter().enumerate() {
                let delta = if m == n { 1.0 } else { 0.0 };
                worst = worst.max((inner_weighted(gm, gn)? - delta).norm());
            }
        }
        Ok(worst)
    }

    /// `(⟨f, g_n⟩)_n`.
    pub fn coefficients(&self, f: &HVector) -> Result<Vec<Complex64>> {
        self.functions.iter().map(|g| inner_weighted(f, g)).collect()
    }

    /// `Σ_{n≤N} a_n g_n`.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<HVector> {
        if coefficients.len() > self.count() {
            return Err(Error::IndexOutOfRange { index: coefficients.len(), count: self.count() });
        }
        let refs: Vec<&HVector> = self.functions[..coefficients.len()].iter().collect();
        HVector::linear_combination(self.space.clone(), coefficients, &refs)
    }
}

/// 1 → 0, 2 → 1, 3 → −1, 4 → 2, …
fn zigzag(k: usize) -> i64 {
    let half = (k / 2) as i64;
    if k.is_multiple_of(2) {
        half
    } else {
        -half
    }
}

/// `f ↦ (⟨f, g_n⟩)_n ∈ ℓ²`, seen through a feature map on the same grid.
#[derive(Debug, Clone)]
pub struct CoefficientSequence<M> {
    map: M,
    cons: Cons,
    target: SequenceSpace,
}

impl<M: FeatureMap> CoefficientSequence<M> {
    pub fn new(map: M, cons: Cons) -> Result<Self> {
        if !cons.space().same_as(map.space()) {
            return Err(Error::GridMismatch);
        }
        let target = SequenceSpace::new(cons.count())?;
        Ok(Self { map, cons, target })
    }

    pub fn cons(&self) -> &Cons {
        &self.cons
    }
}

impl<M: FeatureMap> TransformationSequence for CoefficientSequence<M> {
    type Map = M;
    type Target = SequenceSpace;

    fn map(&self) -> &M {
        &self.map
    }

    fn target(&self) -> &SequenceSpace {
        &self.target
    }

    fn apply(&self, f: &HVector) -> Result<Vec<Complex64>> {
        self.cons.coefficients(f)
    }

    fn pullback_section(&self, n: &usize) -> Result<HVector> {
        self.cons.get(*n).cloned()
    }
}

/// Result of one inverse evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion {
    pub value: Complex64,
    /// `‖s − Ps‖/‖s‖` for the section `s` expanded on the basis.
    pub residual: f64,
    /// `residual > COARSE_RESIDUAL`.
    pub coarse: bool,
    /// `‖k̂_t‖_Ĥ · ‖f‖_H`, the Schwarz bound on `|value|`.
    pub bound: f64,
}

fn invert_with_section<M: FeatureMap>(
    image: &TransformImage<'_, M>,
    section: &HVector,
    basis: &SpanBasis<M::Point>,
) -> Result<Inversion> {
    let d = project_span(section, basis)?;
    let projected = basis.combine(&d)?;
    let norm = section.norm();
    let residual = if norm > 0.0 { section.sub(&projected)?.norm() / norm } else { 0.0 };
    let f_hat = TransformImage::from_span(image.map(), basis, image.coefficients_on(basis)?)?;
    let k_hat = TransformImage::from_span(image.map(), basis, d)?;
    let value = opr_inner(&f_hat, &k_hat)?;
    let k_norm = opr_inner(&k_hat, &k_hat)?.re.max(0.0).sqrt();
    let bound = k_norm * image.source()?.norm();
    Ok(Inversion { value, residual, coarse: residual > COARSE_RESIDUAL, bound })
}

/// `f(t) = ⟨f̂, k̂_t⟩_Ĥ`, with `k̂_t` the transform of `k_t ∈ H` on `basis`.
pub fn invert_at<M, R>(
    image: &TransformImage<'_, M>,
    t: &R::Point,
    h: &R,
    basis: &SpanBasis<M::Point>,
) -> Result<Inversion>
where
    M: FeatureMap,
    R: EvaluableRkhs<Element = HVector>,
{
    invert_with_section(image, &h.section(t)?, basis)
}

/// `(Sf)(t) = ⟨f̂, (S*w_t)^⟩_Ĥ`.
pub fn generalized_invert_at<S: TransformationSequence>(
    seq: &S,
    image: &TransformImage<'_, S::Map>,
    t: &<S::Target as EvaluableRkhs>::Point,
    basis: &SpanBasis<<S::Map as FeatureMap>::Point>,
) -> Result<Inversion> {
    invert_with_section(image, &seq.pullback_section(t)?, basis)
}

/// `f̂_n = ⟨f, g_n⟩` recovered from `f̂` through the `ℓ²` sequence.
pub fn fourier_coeff_invert<M: FeatureMap>(
    seq: &CoefficientSequence<M>,
    image: &TransformImage<'_, M>,
    n: usize,
    basis: &SpanBasis<M::Point>,
) -> Result<Inversion> {
    seq.target.check(n)?;
    generalized_invert_at(seq, image, &n, basis)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RestrictionReport {
    /// `max |⟨K(·,y), K(·,x)⟩_{L²(-R,R)} − K(x,y)|` over probe pairs.
    pub kernel_max_err: f64,
    /// `max |‖f‖²_PW − ∫|f|²|` over the test span combinations.
    pub norm_max_err: f64,
    pub pairs: usize,
}

/// Restriction of `PW(a)` to `ℝ` as an isometry into `L²(ℝ)`, truncated to `(-radius, radius)`.
pub fn restriction_isometry_check(pw: &PwSpec, probes: &[f64], radius: f64) -> Result<RestrictionReport> {
    if probes.is_empty() {
        return Err(Error::EmptyPointList);
    }
    let a = pw.a();
    let grid = line_grid(radius, 2.0 * a, probes)?;
    let section = |x: f64| move |t: f64| sinc_factor(a, t - x) / PI;
    let k = |x: f64, y: f64| pw_kernel(pw, x.into(), y.into()).re;

    let mut kernel_max_err: f64 = 0.0;
    for &x in probes {
        for &y in probes {
            let (kx, ky) = (section(x), section(y));
            let l2 = grid.integrate(|t| ky(t) * kx(t));
            kernel_max_err = kernel_max_err.max((l2 - k(x, y)).abs());
        }
    }

    // Single sections, then the alternating-sign sum of all of them.
    let m = probes.len();
    let mut combos: Vec<Vec<f64>> = (0..m).map(|i| (0..m).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    combos.push((0..m).map(|j| if j % 2 == 0 { 1.0 } else { -1.0 }).collect());
    let mut norm_max_err: f64 = 0.0;
    for c in &combos {
        let gram_norm: f64 = crate::numerics::compensated_sum(
            (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).map(|(i, j)| c[i] * c[j] * k(probes[j], probes[i])),
        );
        let l2 = line_norm_sq(&grid, |t| {
            Complex64::new(c.iter().zip(probes).map(|(ci, &x)| ci * section(x)(t)).sum::<f64>(), 0.0)
        });
        norm_max_err = norm_max_err.max((gram_norm - l2).abs());
    }
    Ok(RestrictionReport { kernel_max_err, norm_max_err, pairs: m * m })
}
