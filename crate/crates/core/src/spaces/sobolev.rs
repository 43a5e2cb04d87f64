//! First-order Sobolev-type spaces `H_{c,ρ}(I)`.
//!
//! Functions vanish at `c` and carry the norm `∫ |f'|² ρ dt`. Two feature
//! maps live here: [`SobolevFeatureMap`] sends `x` to `χ_{(c,x)}/ρ ∈ L²_ρ(I)`
//! (its transform is the indefinite integral from `c`), and
//! [`SobolevSpace`] represents `H_{c,ρ}(I)` itself through derivatives, with
//! kernel sections as features.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    build_grid, build_grid_with_breaks, compensated_sum, inner_weighted, med3, ExtReal, GridSpace, HVector, Interval,
    Weight,
};
use crate::rkhs::{Domain, FeatureMap};

/// Resolution of the fixed rule behind [`sobolev_kernel`].
const KERNEL_PANELS: usize = 16;
const KERNEL_NODES: usize = 16;

pub const DEFAULT_PANELS: usize = 16;
pub const DEFAULT_NODES_PER_PANEL: usize = 16;

/// Interval `I`, anchor `c ∈ [a, b]` and weight `ρ` of `H_{c,ρ}(I)`.
#[derive(Debug, Clone)]
pub struct SobolevSpec {
    interval: Interval,
    c: f64,
    weight: Weight,
}

impl SobolevSpec {
    pub fn new(interval: Interval, c: ExtReal, weight: Weight) -> Result<Self> {
        if interval.is_empty() {
            return Err(Error::InvalidParameter("Sobolev interval must be nonempty".into()));
        }
        if !(interval.lo() <= c && c <= interval.hi()) {
            return Err(Error::OutsideDomain(format!("anchor {c} not in closure of {interval}")));
        }
        let c = match c {
            ExtReal::Finite(c) => c,
            _ if weight.is_constant() => {
                return Err(Error::InvalidParameter("rho constant requires a finite anchor c".into()))
            }
            _ => return Err(Error::RequiresTruncatedInterval),
        };
        Ok(Self { interval, c, weight })
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    /// Membership in `I ∪ {c}`.
    pub fn admits(&self, x: f64) -> bool {
        x == self.c || self.interval.contains(x)
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if self.admits(x) {
            Ok(())
        } else {
            Err(Error::OutsideDomain(format!("{x} not in {} ∪ {{{}}}", self.interval, self.c)))
        }
    }

    /// `∫_lo^hi dt/ρ` on a fixed composite rule, `lo ≤ hi`.
    fn inverse_weight_integral(&self, lo: f64, hi: f64) -> Result<f64> {
        if lo == hi {
            return Ok(0.0);
        }
        let grid = build_grid(&Interval::finite(lo, hi), KERNEL_PANELS, KERNEL_NODES, &self.weight)?;
        Ok(compensated_sum(grid.weights().iter().zip(grid.rho()).map(|(w, r)| w / r)))
    }
}

/// `k(x, y) = ∫_{(c, med(x, y, c))} dt/ρ`.
pub fn sobolev_kernel(spec: &SobolevSpec, x: f64, y: f64) -> Result<f64> {
    spec.check_point(x)?;
    spec.check_point(y)?;
    let m = med3(ExtReal::from(x), ExtReal::from(y), ExtReal::from(spec.c)).to_f64();
    let c = spec.c;
    spec.inverse_weight_integral(c.min(m), c.max(m))
}

fn sobolev_grid(spec: &SobolevSpec, panels: usize, nodes_per_panel: usize, breaks: &[f64]) -> Result<Arc<GridSpace>> {
    let mut all_breaks = Vec::with_capacity(breaks.len() + 1);
    all_breaks.push(spec.c);
    all_breaks.extend_from_slice(breaks);
    let grid = build_grid_with_breaks(&spec.interval, panels, nodes_per_panel, &spec.weight, &all_breaks)?;
    // 1/ρ must be integrable on (c, x) for every x in I; only checkable at
    // grid resolution, singular behaviour finer than the grid goes unseen.
    let inv: f64 = compensated_sum(grid.weights().iter().zip(grid.rho()).map(|(w, r)| w / r));
    if !inv.is_finite() {
        return Err(Error::InvalidParameter("1/rho is not integrable on the grid".into()));
    }
    Ok(GridSpace::line(grid))
}

fn indicator_samples(spec: &SobolevSpec, space: &GridSpace, x: f64, sign: f64) -> Vec<Complex64> {
    let (lo, hi) = (spec.c.min(x), spec.c.max(x));
    let grid = space.axis(0);
    grid.nodes()
        .iter()
        .zip(grid.rho())
        .map(|(&t, &r)| if t > lo && t < hi { Complex64::new(sign / r, 0.0) } else { Complex64::new(0.0, 0.0) })
        .collect()
}

/// `x ↦ χ_{(c,x)}/ρ ∈ L²_ρ(I)`, on a grid with panel breaks at `c` and at
/// the supplied points. Features at other points carry an O(h) error from
/// the unresolved jump.
#[derive(Debug, Clone)]
pub struct SobolevFeatureMap {
    spec: SobolevSpec,
    space: Arc<GridSpace>,
}

impl SobolevFeatureMap {
    pub fn new(spec: SobolevSpec, panels: usize, nodes_per_panel: usize, breaks: &[f64]) -> Result<Self> {
        let space = sobolev_grid(&spec, panels, nodes_per_panel, breaks)?;
        Ok(Self { spec, space })
    }

    pub fn spec(&self) -> &SobolevSpec {
        &self.spec
    }

    /// `f̂(x) = ∫_{(c,x)} f dt`, i.e. `±∫_c^x f dt` with the minus sign for `x < c`.
    pub fn indefinite_transform<'a>(&'a self, f: &'a HVector) -> Result<IndefiniteIntegral<'a>> {
        if !f.space().same_as(&self.space) {
            return Err(Error::GridMismatch);
        }
        Ok(IndefiniteIntegral { spec: &self.spec, f })
    }
}

impl FeatureMap for SobolevFeatureMap {
    type Point = f64;

    fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    fn domain(&self) -> Domain {
        Domain::Interval(self.spec.interval)
    }

    fn feature(&self, x: &f64) -> Result<HVector> {
        self.spec.check_point(*x)?;
        HVector::new(self.space.clone(), indicator_samples(&self.spec, &self.space, *x, 1.0))
    }
}

/// `χ_{(c,x)}/ρ` on a default-resolution grid with breaks at `c` and `x`.
pub fn sobolev_feature(spec: &SobolevSpec, x: f64) -> Result<HVector> {
    let map = SobolevFeatureMap::new(spec.clone(), DEFAULT_PANELS, DEFAULT_NODES_PER_PANEL, &[x])?;
    map.feature(&x)
}

/// `indefinite_transform` as a free function.
pub fn indefinite_transform<'a>(map: &'a SobolevFeatureMap, f: &'a HVector) -> Result<IndefiniteIntegral<'a>> {
    map.indefinite_transform(f)
}

/// The transform `x ↦ ∫_{(c,x)} f dt` of a sampled `f`.
#[derive(Debug, Clone, Copy)]
pub struct IndefiniteIntegral<'a> {
    spec: &'a SobolevSpec,
    f: &'a HVector,
}

impl IndefiniteIntegral<'_> {
    pub fn eval(&self, x: f64) -> Result<Complex64> {
        if !(self.spec.admits(x) || self.spec.interval.closure_contains(x)) {
            return Err(Error::OutsideDomain(format!("{x} not in closure of {}", self.spec.interval)));
        }
        let c = self.spec.c;
        let grid = self.f.space().axis(0);
        let u = grid.partial_weights(c.min(x), c.max(x))?;
        Ok(crate::numerics::complex_sum(u.iter().zip(self.f.values()).map(|(u, v)| v * *u)))
    }

    /// `f̂` at every node of the grid.
    pub fn at_nodes(&self) -> Result<Vec<Complex64>> {
        self.f.space().axis(0).nodes().iter().map(|&t| self.eval(t)).collect()
    }
}

/// `H_{c,ρ}(I)` represented through derivatives: an element `g` is stored
/// as the samples of `g'`, so `⟨g, h⟩ = ∫ g' h̄' ρ dt` is `inner_weighted`.
/// Features are the kernel sections `k_x`, making this map its own
/// transform (`f̂ = f`).
#[derive(Debug, Clone)]
pub struct SobolevSpace {
    spec: SobolevSpec,
    space: Arc<GridSpace>,
}

impl SobolevSpace {
    pub fn new(spec: SobolevSpec, panels: usize, nodes_per_panel: usize, breaks: &[f64]) -> Result<Self> {
        let space = sobolev_grid(&spec, panels, nodes_per_panel, breaks)?;
        Ok(Self { spec, space })
    }

    /// Shares an existing one-dimensional grid space; `c` must be a panel edge.
    pub fn on_space(spec: SobolevSpec, space: Arc<GridSpace>) -> Result<Self> {
        if space.dims() != 1 {
            return Err(Error::InvalidParameter("Sobolev space needs a one-dimensional grid".into()));
        }
        let grid = space.axis(0);
        if grid.interval() != spec.interval() {
            return Err(Error::GridMismatch);
        }
        let (a, b) = spec.interval.bounds()?;
        if spec.c != a && spec.c != b && !grid.has_edge(spec.c) {
            return Err(Error::InvalidParameter(format!("anchor {} must be a panel edge", spec.c)));
        }
        if grid.nodes().iter().zip(grid.rho()).any(|(&t, &r)| r != spec.weight.eval(t)) {
            return Err(Error::InvalidParameter("grid weight differs from the space weight".into()));
        }
        Ok(Self { spec, space })
    }

    pub fn spec(&self) -> &SobolevSpec {
        &self.spec
    }

    /// Kernel section `k_t`, stored as its derivative `±χ_{(c,t)}/ρ`.
    pub fn section(&self, t: f64) -> Result<HVector> {
        if !(self.spec.admits(t) || self.spec.interval.closure_contains(t)) {
            return Err(Error::OutsideDomain(format!("{t} not in closure of {}", self.spec.interval)));
        }
        let sign = if t < self.spec.c { -1.0 } else { 1.0 };
        HVector::new(self.space.clone(), indicator_samples(&self.spec, &self.space, t, sign))
    }

    /// The element with derivative `g'`.
    pub fn from_derivative(&self, derivative: impl Fn(f64) -> Complex64) -> HVector {
        HVector::from_fn_1d(self.space.clone(), derivative)
    }

    /// Point evaluation `g(t) = ⟨g, k_t⟩`.
    pub fn evaluate(&self, g: &HVector, t: f64) -> Result<Complex64> {
        inner_weighted(g, &self.section(t)?)
    }

    pub fn kernel(&self, x: f64, y: f64) -> Result<f64> {
        sobolev_kernel(&self.spec, x, y)
    }

    /// `∫ |g'|² ρ dt` for a function known by its values at the nodes,
    /// differentiating the per-panel interpolant.
    pub fn norm_sq_from_values(&self, values: &[Complex64]) -> Result<f64> {
        let grid = self.space.axis(0);
        let d = grid.differentiate(values)?;
        Ok(compensated_sum(d.iter().zip(self.space.measure()).map(|(d, m)| d.norm_sqr() * m)))
    }
}

impl FeatureMap for SobolevSpace {
    type Point = f64;

    fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    fn domain(&self) -> Domain {
        Domain::Interval(self.spec.interval)
    }

    fn feature(&self, x: &f64) -> Result<HVector> {
        self.spec.check_point(*x)?;
        self.section(*x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rkhs::kernel_eval;
    use approx::assert_abs_diff_eq;

    fn spec(lo: f64, hi: f64, c: f64, weight: Weight) -> SobolevSpec {
        SobolevSpec::new(Interval::finite(lo, hi), ExtReal::from(c), weight).unwrap()
    }

    #[test]
    fn kernel_examples() {
        let s = spec(-1.0, 1.0, 0.0, Weight::unit());
        assert_abs_diff_eq!(sobolev_kernel(&s, 0.5, 0.8).unwrap(), 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(sobolev_kernel(&s, -0.5, 0.8).unwrap(), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(sobolev_kernel(&s, -0.5, -0.8).unwrap(), 0.5, epsilon = 1e-14);
        let s = spec(0.0, 1.0, 0.0, Weight::one_plus_t());
        // ∫_0^0.5 dt/(1+t) = ln 1.5
        assert_abs_diff_eq!(sobolev_kernel(&s, 0.5, 0.8).unwrap(), 1.5f64.ln(), epsilon = 1e-14);
    }

    #[test]
    fn kernel_rejects_points_outside() {
        let s = spec(0.0, 1.0, 0.0, Weight::unit());
        assert!(matches!(sobolev_kernel(&s, 1.5, 0.2), Err(Error::OutsideDomain(_))));
        // c = 0 is an endpoint, yet admissible
        assert_abs_diff_eq!(sobolev_kernel(&s, 0.0, 0.2).unwrap(), 0.0);
    }

    #[test]
    fn constant_weight_needs_finite_anchor() {
        let i = crate::numerics::make_interval(ExtReal::Finite(0.0), ExtReal::PosInf);
        assert!(SobolevSpec::new(i, ExtReal::PosInf, Weight::unit()).is_err());
        assert!(SobolevSpec::new(i, ExtReal::Finite(0.0), Weight::unit()).is_ok());
        assert!(SobolevSpec::new(Interval::finite(0.0, 1.0), ExtReal::Finite(2.0), Weight::unit()).is_err());
    }

    #[test]
    fn feature_gram_matches_kernel() {
        let s = spec(-1.0, 1.0, 0.0, Weight::unit());
        let phi = sobolev_feature(&s, 0.4).unwrap();
        // ‖φ(x)‖² = |x| for ρ ≡ 1, c = 0
        assert_abs_diff_eq!(phi.norm_sq(), 0.4, epsilon = 1e-14);
        assert!(sobolev_feature(&s, 0.0).unwrap().values().iter().all(|v| v.norm() == 0.0));

        let pts = [-0.7, -0.2, 0.3, 0.9];
        let s = spec(-1.0, 1.0, 0.0, Weight::custom("2+t", |t| 2.0 + t));
        let map = SobolevFeatureMap::new(s.clone(), 8, 16, &pts).unwrap();
        for &x in &pts {
            for &y in &pts {
                let quad = kernel_eval(&map, &x, &y).unwrap();
                assert_abs_diff_eq!(quad.re, sobolev_kernel(&s, x, y).unwrap(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_transform_of_polynomials() {
        let s = spec(0.0, 1.0, 0.0, Weight::unit());
        let map = SobolevFeatureMap::new(s, 4, 8, &[]).unwrap();
        let one = HVector::from_fn_1d(map.space().clone(), |_| Complex64::new(1.0, 0.0));
        let t = HVector::from_fn_1d(map.space().clone(), |t| Complex64::new(t, 0.0));
        let i1 = map.indefinite_transform(&one).unwrap();
        let it = map.indefinite_transform(&t).unwrap();
        for x in [0.1, 0.37, 0.5, 0.99] {
            assert_abs_diff_eq!(i1.eval(x).unwrap().re, x, epsilon = 1e-14);
            assert_abs_diff_eq!(it.eval(x).unwrap().re, x * x / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn indefinite_transform_left_of_anchor_is_positive_orientation() {
        let s = spec(-1.0, 1.0, 0.0, Weight::unit());
        let map = SobolevFeatureMap::new(s, 4, 8, &[]).unwrap();
        let one = HVector::from_fn_1d(map.space().clone(), |_| Complex64::new(1.0, 0.0));
        // -∫_0^x 1 dt = -x for x < 0
        assert_abs_diff_eq!(map.indefinite_transform(&one).unwrap().eval(-0.3).unwrap().re, 0.3, epsilon = 1e-14);
    }

    #[test]
    fn sections_reproduce_smooth_functions() {
        let s = spec(-1.0, 1.0, 0.0, Weight::one_plus_t());
        let probes = [-0.8, -0.1, 0.45];
        let h = SobolevSpace::new(s, 8, 16, &probes).unwrap();
        // f(t) = sin t, f(0) = 0
        let f = h.from_derivative(|t| Complex64::new(t.cos(), 0.0));
        for &y in &probes {
            assert_abs_diff_eq!(h.evaluate(&f, y).unwrap().re, y.sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn on_space_requires_anchor_edge() {
        let s = spec(-1.0, 1.0, 0.0, Weight::unit());
        let g = build_grid(&Interval::finite(-1.0, 1.0), 3, 4, &Weight::unit()).unwrap();
        assert!(SobolevSpace::on_space(s.clone(), GridSpace::line(g)).is_err());
        let g = build_grid(&Interval::finite(-1.0, 1.0), 4, 4, &Weight::unit()).unwrap();
        assert!(SobolevSpace::on_space(s, GridSpace::line(g)).is_ok());
    }
}
