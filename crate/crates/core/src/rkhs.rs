//! Feature maps, the integral transforms they induce, and the operator-range
//! inner product realized through Gram matrices.
//!
//! A feature map `φ: E → H` turns `f ∈ H` into the function
//! `f̂(x) = ⟨f, φ(x)⟩_H`. The image space is an RKHS on `E` with kernel
//! `k(x, y) = ⟨φ(y), φ(x)⟩_H`. Its inner product is only computable on
//! finite spans, so every `Ĥ`-level operation goes through a [`SpanBasis`].

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{complex_sum, inner_weighted, GridSpace, HVector, Interval};

/// Relative ridge applied to every Gram matrix: `ε = RIDGE · trace(G) / m`.
pub const RIDGE: f64 = 1e-10;

/// Descriptor of the parameter set `E` of a feature map.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Interval(Interval),
    RealLine,
    ComplexPlane,
    Naturals,
    Product(Vec<Domain>),
}

/// A map `φ: E → H` whose values are sampled on one fixed grid space.
pub trait FeatureMap {
    type Point: Clone + fmt::Debug;

    fn space(&self) -> &Arc<GridSpace>;

    fn domain(&self) -> Domain;

    /// `φ(x)` as an element of `H`.
    fn feature(&self, x: &Self::Point) -> Result<HVector>;
}

/// `k(x, y) = ⟨φ(y), φ(x)⟩_H` by quadrature.
pub fn kernel_eval<M: FeatureMap>(phi: &M, x: &M::Point, y: &M::Point) -> Result<Complex64> {
    inner_weighted(&phi.feature(y)?, &phi.feature(x)?)
}

/// Finite proxy for `cspan φ(E)`: sample points, their features and Gram.
///
/// Solves against the Gram matrix go through its Hermitian
/// eigendecomposition; eigenvalues at or below the ridge level are treated
/// as zero, so a solve is an orthogonal projection onto the retained
/// eigenspace.
pub struct SpanBasis<P> {
    points: Vec<P>,
    features: Vec<HVector>,
    space: Arc<GridSpace>,
    gram: DMatrix<Complex64>,
    ridge: f64,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl<P: fmt::Debug> fmt::Debug for SpanBasis<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpanBasis")
            .field("points", &self.points)
            .field("ridge", &self.ridge)
            .field("rank", &self.rank())
            .finish()
    }
}

/// Assembles the Gram matrix `G_ij = ⟨φ(x_j), φ(x_i)⟩` and its solve handle.
pub fn build_span_basis<M: FeatureMap>(phi: &M, points: &[M::Point]) -> Result<SpanBasis<M::Point>> {
    if points.is_empty() {
        return Err(Error::EmptyPointList);
    }
    let features = points.iter().map(|x| phi.feature(x)).collect::<Result<Vec<_>>>()?;
    let m = points.len();
    let mut gram = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    for i in 0..m {
        for j in 0..m {
            gram[(i, j)] = inner_weighted(&features[j], &features[i])?;
        }
    }
    let trace: f64 = (0..m).map(|i| gram[(i, i)].re).sum();
    let ridge = RIDGE * trace / m as f64;
    let hermitian = DMatrix::from_fn(m, m, |i, j| 0.5 * (gram[(i, j)] + gram[(j, i)].conj()));
    let eigen = SymmetricEigen::try_new(hermitian, 1e-15, 10_000)
        .ok_or_else(|| Error::Numerical("Gram eigendecomposition did not converge".into()))?;
    Ok(SpanBasis {
        points: points.to_vec(),
        features,
        space: phi.space().clone(),
        gram,
        ridge,
        eigenvalues: eigen.eigenvalues.iter().copied().collect(),
        eigenvectors: eigen.eigenvectors,
    })
}

impl<P> SpanBasis<P> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[P] {
        &self.points
    }

    pub fn features(&self) -> &[HVector] {
        &self.features
    }

    pub fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    pub fn gram(&self) -> &DMatrix<Complex64> {
        &self.gram
    }

    pub fn ridge(&self) -> f64 {
        self.ridge
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Number of eigenvalues above the ridge.
    pub fn rank(&self) -> usize {
        self.eigenvalues.iter().filter(|&&l| l > self.ridge).count()
    }

    /// Regularized solve of `G c = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.len() {
            return Err(Error::ArityMismatch { expected: self.len(), got: b.len() });
        }
        let b = DVector::from_column_slice(b);
        let mut c = DVector::from_element(self.len(), Complex64::new(0.0, 0.0));
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            if lambda <= self.ridge {
                continue;
            }
            let v = self.eigenvectors.column(k);
            let proj = v.dotc(&b) / lambda;
            c += v * proj;
        }
        Ok(c.iter().copied().collect())
    }

    /// `Σ cᵢ φ(xᵢ)` as an element of `H`.
    pub fn combine(&self, coefficients: &[Complex64]) -> Result<HVector> {
        let refs: Vec<&HVector> = self.features.iter().collect();
        HVector::linear_combination(self.space.clone(), coefficients, &refs)
    }

    /// `Σ_ij d̄_j G_ji c_i`, the `H` inner product of `Σ cᵢφ(xᵢ)` and `Σ dⱼφ(xⱼ)`.
    pub fn quadratic_form(&self, c: &[Complex64], d: &[Complex64]) -> Result<Complex64> {
        let m = self.len();
        if c.len() != m || d.len() != m {
            return Err(Error::ArityMismatch { expected: m, got: c.len().min(d.len()) });
        }
        Ok(complex_sum(
            (0..m).flat_map(|j| (0..m).map(move |i| (i, j))).map(|(i, j)| d[j].conj() * self.gram[(j, i)] * c[i]),
        ))
    }
}

/// Representation of an image `f̂`.
#[derive(Debug, Clone)]
pub enum ImageRepr<'a, P> {
    /// The source vector `f`, evaluated lazily as `⟨f, φ(x)⟩`.
    Raw(HVector),
    /// `f̂ = Σ cᵢ k_{xᵢ}` over a span basis.
    Span { basis: &'a SpanBasis<P>, coefficients: Vec<Complex64> },
}

/// An element `f̂` of the image RKHS `Ĥ`, evaluable at any point of `E`.
pub struct TransformImage<'a, M: FeatureMap> {
    map: &'a M,
    repr: ImageRepr<'a, M::Point>,
}

impl<M: FeatureMap> fmt::Debug for TransformImage<'_, M> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            ImageRepr::Raw(v) => write!(f, "TransformImage::Raw({} samples)", v.len()),
            ImageRepr::Span { coefficients, .. } => write!(f, "TransformImage::Span({coefficients:?})"),
        }
    }
}

/// `f ↦ f̂` with `f̂(x) = ⟨f, φ(x)⟩_H`.
pub fn transform<'a, M: FeatureMap>(f: &HVector, phi: &'a M) -> Result<TransformImage<'a, M>> {
    if !f.space().same_as(phi.space()) {
        return Err(Error::GridMismatch);
    }
    Ok(TransformImage { map: phi, repr: ImageRepr::Raw(f.clone()) })
}

impl<'a, M: FeatureMap> TransformImage<'a, M> {
    /// `Σ cᵢ k_{xᵢ}` over `basis`.
    pub fn from_span(map: &'a M, basis: &'a SpanBasis<M::Point>, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != basis.len() {
            return Err(Error::ArityMismatch { expected: basis.len(), got: coefficients.len() });
        }
        if !basis.space().same_as(map.space()) {
            return Err(Error::BasisMismatch);
        }
        Ok(Self { map, repr: ImageRepr::Span { basis, coefficients } })
    }

    pub fn map(&self) -> &'a M {
        self.map
    }

    pub fn repr(&self) -> &ImageRepr<'a, M::Point> {
        &self.repr
    }

    /// The element of `H` this image came from.
    pub fn source(&self) -> Result<HVector> {
        match &self.repr {
            ImageRepr::Raw(f) => Ok(f.clone()),
            ImageRepr::Span { basis, coefficients } => basis.combine(coefficients),
        }
    }

    pub fn evaluate(&self, x: &M::Point) -> Result<Complex64> {
        let feature = self.map.feature(x)?;
        match &self.repr {
            ImageRepr::Raw(f) => inner_weighted(f, &feature),
            ImageRepr::Span { basis, coefficients } => {
                let terms = basis
                    .features()
                    .iter()
                    .zip(coefficients)
                    .map(|(phi_i, c)| inner_weighted(phi_i, &feature).map(|k| c * k))
                    .collect::<Result<Vec<_>>>()?;
                Ok(complex_sum(terms))
            }
        }
    }

    /// Coefficients over `basis`: reused when already on it, projected otherwise.
    pub fn coefficients_on(&self, basis: &SpanBasis<M::Point>) -> Result<Vec<Complex64>> {
        match &self.repr {
            ImageRepr::Span { basis: own, coefficients } if std::ptr::eq(*own, basis) => Ok(coefficients.clone()),
            _ => project_span(&self.source()?, basis),
        }
    }

    /// The same image re-expressed over `basis`.
    pub fn onto(&self, basis: &'a SpanBasis<M::Point>) -> Result<TransformImage<'a, M>> {
        let coefficients = self.coefficients_on(basis)?;
        TransformImage::from_span(self.map, basis, coefficients)
    }
}

/// Coefficients `c` of the projection of `f` onto the span basis.
pub fn project_span<P>(f: &HVector, basis: &SpanBasis<P>) -> Result<Vec<Complex64>> {
    if !f.space().same_as(basis.space()) {
        return Err(Error::GridMismatch);
    }
    let b = basis.features().iter().map(|phi_i| inner_weighted(f, phi_i)).collect::<Result<Vec<_>>>()?;
    basis.solve(&b)
}

/// `⟨u, v⟩_Ĥ` for two images over the same span basis.
pub fn opr_inner<M: FeatureMap>(u: &TransformImage<'_, M>, v: &TransformImage<'_, M>) -> Result<Complex64> {
    match (&u.repr, &v.repr) {
        (ImageRepr::Span { basis: bu, coefficients: c }, ImageRepr::Span { basis: bv, coefficients: d })
            if std::ptr::eq(*bu, *bv) =>
        {
            bu.quadratic_form(c, d)
        }
        _ => Err(Error::BasisMismatch),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContractionReport {
    pub norm_h: f64,
    pub norm_hhat: f64,
    /// `norm_h − norm_hhat`; nonnegative up to round-off.
    pub slack: f64,
}

/// Compares `‖f‖_H` with `‖f̂‖_Ĥ` on the span basis.
pub fn contraction_check<M: FeatureMap>(
    f: &HVector,
    phi: &M,
    basis: &SpanBasis<M::Point>,
) -> Result<ContractionReport> {
    if !f.space().same_as(phi.space()) {
        return Err(Error::GridMismatch);
    }
    let c = project_span(f, basis)?;
    let norm_h = f.norm();
    let norm_hhat = basis.quadratic_form(&c, &c)?.re.max(0.0).sqrt();
    Ok(ContractionReport { norm_h, norm_hhat, slack: norm_h - norm_hhat })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{build_grid, Weight};
    use approx::assert_abs_diff_eq;

    /// Orthonormal cosines on (0, π): φ(n) = √(2/π) cos(n t).
    struct Cosines {
        space: Arc<GridSpace>,
    }

    impl Cosines {
        fn new() -> Self {
            let g = build_grid(&Interval::finite(0.0, std::f64::consts::PI), 8, 16, &Weight::unit()).unwrap();
            Self { space: GridSpace::line(g) }
        }
    }

    impl FeatureMap for Cosines {
        type Point = usize;

        fn space(&self) -> &Arc<GridSpace> {
            &self.space
        }

        fn domain(&self) -> Domain {
            Domain::Naturals
        }

        fn feature(&self, n: &usize) -> Result<HVector> {
            let s = (2.0 / std::f64::consts::PI).sqrt();
            Ok(HVector::from_fn_1d(self.space.clone(), |t| Complex64::new(s * (*n as f64 * t).cos(), 0.0)))
        }
    }

    #[test]
    fn orthonormal_features_give_identity_gram() {
        let phi = Cosines::new();
        let basis = build_span_basis(&phi, &[1, 2]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(basis.gram()[(i, j)].re, expected, epsilon = 1e-13);
                assert_abs_diff_eq!(basis.gram()[(i, j)].im, 0.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn duplicated_points_still_solve() {
        let phi = Cosines::new();
        let basis = build_span_basis(&phi, &[3, 3, 1]).unwrap();
        assert_eq!(basis.rank(), 2);
        let f = phi.feature(&3).unwrap();
        let c = project_span(&f, &basis).unwrap();
        let resid = basis.combine(&c).unwrap().sub(&f).unwrap().norm();
        assert!(resid < 1e-6, "residual {resid}");
        // minimum-norm split across the duplicate
        assert_abs_diff_eq!(c[0].re, 0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(c[1].re, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn empty_point_list_is_an_error() {
        let phi = Cosines::new();
        assert!(matches!(build_span_basis(&phi, &[]), Err(Error::EmptyPointList)));
    }

    #[test]
    fn orthogonal_vector_projects_to_zero() {
        let phi = Cosines::new();
        let basis = build_span_basis(&phi, &[1, 2, 3]).unwrap();
        let f = phi.feature(&5).unwrap();
        let c = project_span(&f, &basis).unwrap();
        assert!(c.iter().all(|c| c.norm() < 1e-12));
        let image = transform(&f, &phi).unwrap();
        for n in 1..=4 {
            assert!(image.evaluate(&n).unwrap().norm() < 1e-12);
        }
        assert_abs_diff_eq!(image.evaluate(&5).unwrap().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn opr_inner_examples() {
        let phi = Cosines::new();
        let basis = build_span_basis(&phi, &[1, 2]).unwrap();
        let e1 =
            TransformImage::from_span(&phi, &basis, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let e2 =
            TransformImage::from_span(&phi, &basis, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert_abs_diff_eq!(opr_inner(&e1, &e1).unwrap().re, basis.gram()[(0, 0)].re, epsilon = 1e-15);
        assert!(opr_inner(&e1, &e2).unwrap().norm() < 1e-13);

        let other = build_span_basis(&phi, &[1, 2]).unwrap();
        let e3 = TransformImage::from_span(&phi, &other, vec![Complex64::new(1.0, 0.0); 2]).unwrap();
        assert!(matches!(opr_inner(&e1, &e3), Err(Error::BasisMismatch)));
        let raw = transform(&phi.feature(&1).unwrap(), &phi).unwrap();
        assert!(matches!(opr_inner(&e1, &raw), Err(Error::BasisMismatch)));
    }

    #[test]
    fn contraction_slack_positive_off_span() {
        let phi = Cosines::new();
        let basis = build_span_basis(&phi, &[1, 2]).unwrap();
        let f = phi.feature(&1).unwrap().add(&phi.feature(&4).unwrap()).unwrap();
        let report = contraction_check(&f, &phi, &basis).unwrap();
        assert_abs_diff_eq!(report.norm_h, 2f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(report.norm_hhat, 1.0, epsilon = 1e-10);
        assert!(report.slack > 0.4);
    }
}
