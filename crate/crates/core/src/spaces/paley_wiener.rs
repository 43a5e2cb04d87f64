//! Paley–Wiener spaces `PW(a)`: images of `L²(-a, a)` under
//! `φ(x)(t) = e^{it x̄}/√(2π)`, with the Dirichlet kernel
//! `K_a(x, y) = sin(a(x − ȳ))/(π(x − ȳ))`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{
    build_grid_with_breaks, compensated_sum, oscillatory_panels, truncate_line, GridSpace, HVector, Interval, QuadGrid,
    Weight,
};
use crate::rkhs::{Domain, FeatureMap};

/// Below this `|d|` removable singularities switch to their Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// Nodes per panel on truncated-line rules.
pub const LINE_NODES_PER_PANEL: usize = 16;

/// Band limit `a` of `PW(a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwSpec {
    a: f64,
}

impl PwSpec {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter(format!("band limit must be positive and finite, got {a}")));
        }
        Ok(Self { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    /// `I_a = (-a, a)`.
    pub fn interval(&self) -> Interval {
        Interval::finite(-self.a, self.a)
    }
}

/// `sin(a u)/u`, by series near `u = 0`.
pub fn sinc_factor(a: f64, u: f64) -> f64 {
    if u.abs() < SERIES_THRESHOLD {
        let z2 = (a * u) * (a * u);
        a * (1.0 - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        (a * u).sin() / u
    }
}

/// `K_a(x, y) = sin(a(x − ȳ))/(π(x − ȳ))`, valid on all of `ℂ²`.
pub fn pw_kernel(spec: &PwSpec, x: Complex64, y: Complex64) -> Complex64 {
    let a = spec.a;
    let d = x - y.conj();
    if d.norm() < SERIES_THRESHOLD {
        let z2 = (d * a) * (d * a);
        Complex64::new(a / PI, 0.0) * (Complex64::new(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0)
    } else {
        (d * a).sin() / (d * PI)
    }
}

/// The feature map `x ↦ e^{itx}/√(2π)` on a grid over `I_a`.
///
/// Only real points have grid features; complex points are reachable
/// through [`pw_kernel`].
#[derive(Debug, Clone)]
pub struct PwFeatureMap {
    spec: PwSpec,
    space: Arc<GridSpace>,
}

impl PwFeatureMap {
    pub fn new(spec: PwSpec, panels: usize, nodes_per_panel: usize, breaks: &[f64]) -> Result<Self> {
        let grid = build_grid_with_breaks(&spec.interval(), panels, nodes_per_panel, &Weight::unit(), breaks)?;
        Ok(Self { spec, space: GridSpace::line(grid) })
    }

    /// Grid resolving `e^{it(x−y)}` for `|x|, |y| ≤ max_abs_x`, at least four panels.
    pub fn for_frequencies(spec: PwSpec, max_abs_x: f64, nodes_per_panel: usize, breaks: &[f64]) -> Result<Self> {
        let panels = oscillatory_panels(2.0 * spec.a, 2.0 * max_abs_x, nodes_per_panel).max(4);
        Self::new(spec, panels, nodes_per_panel, breaks)
    }

    pub fn spec(&self) -> &PwSpec {
        &self.spec
    }
}

impl FeatureMap for PwFeatureMap {
    type Point = f64;

    fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    fn domain(&self) -> Domain {
        Domain::ComplexPlane
    }

    fn feature(&self, x: &f64) -> Result<HVector> {
        if !x.is_finite() {
            return Err(Error::OutsideDomain(format!("{x}")));
        }
        let s = 1.0 / (2.0 * PI).sqrt();
        Ok(HVector::from_fn_1d(self.space.clone(), |t| Complex64::new(0.0, t * x).exp() * s))
    }
}

/// `φ(x)` for `x ∈ ℂ`; only real `x` have a grid representation.
pub fn pw_feature(map: &PwFeatureMap, x: Complex64) -> Result<HVector> {
    if x.im != 0.0 {
        return Err(Error::ComplexEvaluation);
    }
    map.feature(&x.re)
}

/// Composite rule on `(-radius, radius)` for integrands oscillating at
/// angular frequency up to `omega`, with panel breaks at `breaks`.
pub fn line_grid(radius: f64, omega: f64, breaks: &[f64]) -> Result<QuadGrid> {
    let interval = truncate_line(radius)?;
    let panels = oscillatory_panels(2.0 * radius, omega.max(1.0), LINE_NODES_PER_PANEL);
    build_grid_with_breaks(&interval, panels, LINE_NODES_PER_PANEL, &Weight::unit(), breaks)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SincIdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
}

/// Truncated `∫ sin(a(t−x)) sin(a(t−y)) / ((t−x)(t−y)) dt` against
/// `π sin(a(y−x))/(y−x)`.
pub fn sinc_identity_check(a: f64, x: f64, y: f64, radius: f64) -> Result<SincIdentityReport> {
    PwSpec::new(a)?;
    if radius < 100.0 * (1.0 + x.abs() + y.abs()) {
        return Err(Error::InvalidParameter(format!(
            "radius {radius} below 100·(1 + |x| + |y|) = {}",
            100.0 * (1.0 + x.abs() + y.abs())
        )));
    }
    let grid = line_grid(radius, 2.0 * a, &[x, y])?;
    let lhs = grid.integrate(|t| sinc_factor(a, t - x) * sinc_factor(a, t - y));
    let rhs = PI * sinc_factor(a, y - x);
    Ok(SincIdentityReport { lhs, rhs, abs_err: (lhs - rhs).abs() })
}

/// `∫_{-radius}^{radius} |g|² dt` on a [`line_grid`].
pub fn line_norm_sq(grid: &QuadGrid, g: impl Fn(f64) -> Complex64) -> f64 {
    compensated_sum(grid.nodes().iter().zip(grid.weights()).map(|(&t, &w)| w * g(t).norm_sqr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rkhs::{kernel_eval, transform};
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn kernel_examples() {
        let s = PwSpec::new(1.0).unwrap();
        assert_abs_diff_eq!(pw_kernel(&s, c(0.0), c(0.0)).re, 1.0 / PI, epsilon = 1e-16);
        assert_abs_diff_eq!(pw_kernel(&s, c(PI), c(0.0)).re, 0.0, epsilon = 1e-16);
        assert_abs_diff_eq!(pw_kernel(&s, c(1.0), c(0.0)).re, 1f64.sin() / PI, epsilon = 1e-16);
        assert_abs_diff_eq!(pw_kernel(&s, c(1.0), c(0.0)).re, 0.267849, epsilon = 1e-6);
    }

    #[test]
    fn kernel_series_branch_is_continuous() {
        let s = PwSpec::new(2.0).unwrap();
        for d in [1e-4 * (1.0 - 1e-12), 1e-4, 1e-4 * (1.0 + 1e-12)] {
            let k = pw_kernel(&s, c(0.3 + d), c(0.3)).re;
            let direct = (2.0 * d).sin() / (PI * d);
            assert_abs_diff_eq!(k, direct, epsilon = 1e-15);
        }
        assert_eq!(pw_kernel(&s, c(0.7), c(0.7)).re, 2.0 / PI);
    }

    #[test]
    fn kernel_at_complex_points_is_hermitian() {
        let s = PwSpec::new(1.5).unwrap();
        let x = Complex64::new(0.2, 0.7);
        let y = Complex64::new(-1.1, 0.3);
        let kxy = pw_kernel(&s, x, y);
        let kyx = pw_kernel(&s, y, x);
        assert_abs_diff_eq!(kxy.re, kyx.conj().re, epsilon = 1e-15);
        assert_abs_diff_eq!(kxy.im, kyx.conj().im, epsilon = 1e-15);
        assert!(pw_kernel(&s, x, x).re > 0.0);
    }

    #[test]
    fn feature_gram_matches_closed_form() {
        let s = PwSpec::new(1.0).unwrap();
        let map = PwFeatureMap::for_frequencies(s, 5.0, 16, &[]).unwrap();
        for (x, y) in [(0.0, 0.0), (1.0, 0.0), (PI, 0.0), (-4.0, 2.5), (5.0, -5.0)] {
            let q = kernel_eval(&map, &x, &y).unwrap();
            let k = pw_kernel(&s, c(x), c(y));
            assert_abs_diff_eq!(q.re, k.re, epsilon = 1e-13);
            assert_abs_diff_eq!(q.im, 0.0, epsilon = 1e-13);
        }
        assert_abs_diff_eq!(map.feature(&2.0).unwrap().norm_sq(), 1.0 / PI, epsilon = 1e-14);
    }

    #[test]
    fn complex_feature_is_rejected() {
        let map = PwFeatureMap::new(PwSpec::new(1.0).unwrap(), 4, 8, &[]).unwrap();
        assert!(matches!(pw_feature(&map, Complex64::new(0.0, 1.0)), Err(Error::ComplexEvaluation)));
        assert!(pw_feature(&map, c(1.0)).is_ok());
    }

    #[test]
    fn transform_of_constant_is_sinc() {
        let map = PwFeatureMap::for_frequencies(PwSpec::new(1.0).unwrap(), 3.0, 16, &[]).unwrap();
        let f = HVector::from_fn_1d(map.space().clone(), |_| c(1.0 / (2.0 * PI).sqrt()));
        let image = transform(&f, &map).unwrap();
        for x in [0.5, 1.0, 2.0, -3.0] {
            let v = image.evaluate(&x).unwrap();
            assert_abs_diff_eq!(v.re, x.sin() / (PI * x), epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn sinc_identity_examples() {
        let r = sinc_identity_check(1.0, 0.0, 1.0, 1e3).unwrap();
        assert_abs_diff_eq!(r.rhs, PI * 1f64.sin(), epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 2.643559, epsilon = 1e-6);
        let swapped = sinc_identity_check(1.0, 1.0, 0.0, 1e3).unwrap();
        assert_eq!(r.rhs, swapped.rhs);
        assert_abs_diff_eq!(r.lhs, swapped.lhs, epsilon = 1e-12);
        assert!(sinc_identity_check(1.0, 0.0, 0.0, 50.0).is_err());
    }
}
