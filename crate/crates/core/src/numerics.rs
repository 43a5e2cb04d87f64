//! Extended-real intervals, composite Gauss-Legendre grids and weighted
//! complex inner products.
//!
//! Everything downstream discretizes `L²_ρ(I)` the same way: a [`QuadGrid`]
//! carries nodes, positive weights and the weight function sampled at the
//! nodes, and an [`HVector`] is a list of complex samples on a [`GridSpace`]
//! (a finite Cartesian product of grids). All reductions run left to right
//! with Neumaier compensation so results are reproducible bit for bit.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hard cap on the node count of any product grid.
pub const MAX_GRID_NODES: usize = 1_000_000;

/// A real number or one of the two infinities.
///
/// Only comparison and median are defined; there is no arithmetic on ±∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtReal {
    /// Maps `f64` infinities onto the extended endpoints. NaN is rejected.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            return Err(Error::InvalidParameter("NaN is not an extended real".into()));
        }
        Ok(Self::from_f64_unchecked(value))
    }

    fn from_f64_unchecked(value: f64) -> Self {
        if value == f64::INFINITY {
            Self::PosInf
        } else if value == f64::NEG_INFINITY {
            Self::NegInf
        } else {
            Self::Finite(value)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Self::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Self::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// The value as an `f64`, with ±∞ mapped to the IEEE infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            Self::NegInf => f64::NEG_INFINITY,
            Self::Finite(v) => v,
            Self::PosInf => f64::INFINITY,
        }
    }

    fn rank(self) -> u8 {
        match self {
            Self::NegInf => 0,
            Self::Finite(_) => 1,
            Self::PosInf => 2,
        }
    }
}

impl From<f64> for ExtReal {
    /// Panics on NaN; use [`ExtReal::new`] for untrusted input.
    fn from(value: f64) -> Self {
        assert!(!value.is_nan(), "NaN is not an extended real");
        Self::from_f64_unchecked(value)
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Self::Finite(a), Self::Finite(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NegInf => write!(f, "-inf"),
            Self::Finite(v) => write!(f, "{v}"),
            Self::PosInf => write!(f, "+inf"),
        }
    }
}

/// Middle element of the sorted triple.
pub fn med3(x: ExtReal, y: ExtReal, z: ExtReal) -> ExtReal {
    let mut v = [x, y, z];
    v.sort();
    v[1]
}

/// Open interval between two extended reals, endpoints in either order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: ExtReal,
    hi: ExtReal,
    empty: bool,
}

/// The set of reals strictly between `a` and `b`, whichever is larger.
pub fn make_interval(a: ExtReal, b: ExtReal) -> Interval {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    Interval { lo, hi, empty: lo == hi }
}

/// `(-radius, radius)`, the finite stand-in for the real line.
pub fn truncate_line(radius: f64) -> Result<Interval> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("truncation radius must be positive and finite, got {radius}")));
    }
    Ok(make_interval(ExtReal::Finite(-radius), ExtReal::Finite(radius)))
}

impl Interval {
    /// Convenience constructor for finite endpoints.
    pub fn finite(a: f64, b: f64) -> Self {
        make_interval(ExtReal::from(a), ExtReal::from(b))
    }

    pub fn lo(&self) -> ExtReal {
        self.lo
    }

    pub fn hi(&self) -> ExtReal {
        self.hi
    }

    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn contains(&self, x: f64) -> bool {
        if self.empty || x.is_nan() {
            return false;
        }
        let x = ExtReal::from(x);
        self.lo < x && x < self.hi
    }

    /// Membership in the closure `[lo, hi]` (finite points only).
    pub fn closure_contains(&self, x: f64) -> bool {
        if x.is_nan() || x.is_infinite() {
            return false;
        }
        let x = ExtReal::Finite(x);
        self.lo <= x && x <= self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Finite endpoints, or the truncation error.
    pub fn bounds(&self) -> Result<(f64, f64)> {
        match (self.lo.finite(), self.hi.finite()) {
            (Some(a), Some(b)) => Ok((a, b)),
            _ => Err(Error::RequiresTruncatedInterval),
        }
    }

    /// Set intersection of two open intervals.
    pub fn intersect(&self, other: &Interval) -> Interval {
        if self.empty || other.empty {
            return Interval { lo: self.lo, hi: self.lo, empty: true };
        }
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        if lo >= hi {
            Interval { lo, hi: lo, empty: true }
        } else {
            Interval { lo, hi, empty: false }
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.empty {
            write!(f, "∅")
        } else {
            write!(f, "({}, {})", self.lo, self.hi)
        }
    }
}

/// Weight functions available by name, plus an escape hatch for closures.
#[derive(Clone)]
pub enum Weight {
    /// `ρ(t) = value`.
    Constant(f64),
    /// `ρ(t) = offset + slope·t`.
    Affine {
        offset: f64,
        slope: f64,
    },
    Custom {
        name: String,
        func: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl Weight {
    pub fn unit() -> Self {
        Self::Constant(1.0)
    }

    /// `ρ(t) = 1 + t`.
    pub fn one_plus_t() -> Self {
        Self::Affine { offset: 1.0, slope: 1.0 }
    }

    pub fn custom(name: impl Into<String>, func: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self::Custom { name: name.into(), func: Arc::new(func) }
    }

    /// Looks up the CLI registry: `const` (ρ ≡ 1) or `affine` (ρ = 1 + t).
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "const" => Ok(Self::unit()),
            "affine" => Ok(Self::one_plus_t()),
            other => Err(Error::InvalidParameter(format!("unknown weight {other:?}; expected one of: const, affine"))),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Self::Constant(v) => *v,
            Self::Affine { offset, slope } => offset + slope * t,
            Self::Custom { func, .. } => func(t),
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant(_))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Constant(v) if *v == 1.0 => "const".into(),
            Self::Constant(v) => format!("const:{v}"),
            Self::Affine { offset, slope } if *offset == 1.0 && *slope == 1.0 => "affine".into(),
            Self::Affine { offset, slope } => format!("affine:{offset}+{slope}t"),
            Self::Custom { name, .. } => name.clone(),
        }
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({})", self.name())
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Compensated sum of complex terms, real and imaginary parts tracked apart.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

pub fn complex_sum<I: IntoIterator<Item = Complex64>>(terms: I) -> Complex64 {
    let mut acc = ComplexSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Panel count keeping the phase of `e^{iωt}` per panel at most
/// `nodes_per_panel / 2` radians, i.e. about 4π nodes per oscillation.
pub fn oscillatory_panels(length: f64, omega: f64, nodes_per_panel: usize) -> usize {
    let phase = length * omega.abs();
    let per_panel = (nodes_per_panel as f64 / 2.0).max(1.0);
    ((phase / per_panel).ceil() as usize).max(1)
}

/// Composite Gauss-Legendre discretization of a bounded interval.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    interval: Interval,
    edges: Vec<f64>,
    nodes_per_panel: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    rho: Vec<f64>,
}

/// Uniform composite Gauss-Legendre grid.
pub fn build_grid(interval: &Interval, panels: usize, nodes_per_panel: usize, rho: &Weight) -> Result<QuadGrid> {
    build_grid_with_breaks(interval, panels, nodes_per_panel, rho, &[])
}

/// Composite grid whose panel boundaries include every break inside the
/// interval, so integrands with jumps there are integrated panel-exactly.
pub fn build_grid_with_breaks(
    interval: &Interval,
    panels: usize,
    nodes_per_panel: usize,
    rho: &Weight,
    breaks: &[f64],
) -> Result<QuadGrid> {
    let (a, b) = interval.bounds()?;
    if interval.is_empty() {
        return Err(Error::InvalidParameter("cannot discretize an empty interval".into()));
    }
    if panels == 0 || nodes_per_panel == 0 {
        return Err(Error::InvalidParameter("panels and nodes_per_panel must be positive".into()));
    }
    let h = (b - a) / panels as f64;
    let mut edges: Vec<f64> = (0..=panels).map(|k| if k == panels { b } else { a + k as f64 * h }).collect();
    // A break within `tol` of an existing interior edge replaces that edge
    // instead of creating a sliver panel.
    let tol = 1e-12 * (b - a);
    for &x in breaks {
        if !(x.is_finite() && x > a + tol && x < b - tol) {
            continue;
        }
        match edges[1..panels].iter_mut().find(|e| (**e - x).abs() <= tol) {
            Some(e) => *e = x,
            None => edges.push(x),
        }
    }
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let (ref_nodes, ref_weights) = gauss_legendre(nodes_per_panel);
    let total = (edges.len() - 1) * nodes_per_panel;
    if total > MAX_GRID_NODES {
        return Err(Error::GridTooLarge { nodes: total, cap: MAX_GRID_NODES });
    }
    let mut nodes = Vec::with_capacity(total);
    let mut weights = Vec::with_capacity(total);
    let mut rho_at = Vec::with_capacity(total);
    for pair in edges.windows(2) {
        let (lo, hi) = (pair[0], pair[1]);
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (x, w) in ref_nodes.iter().zip(&ref_weights) {
            let t = mid + half * x;
            let r = rho.eval(t);
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidWeight { at: t, value: r });
            }
            nodes.push(t);
            weights.push(half * w);
            rho_at.push(r);
        }
    }
    Ok(QuadGrid { interval: *interval, edges, nodes_per_panel, nodes, weights, rho: rho_at })
}

impl QuadGrid {
    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn panel_edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn nodes_per_panel(&self) -> usize {
        self.nodes_per_panel
    }

    pub fn panels(&self) -> usize {
        self.edges.len() - 1
    }

    /// Whether `x` is a panel boundary (exact match).
    pub fn has_edge(&self, x: f64) -> bool {
        self.edges.binary_search_by(|e| e.total_cmp(&x)).is_ok()
    }

    /// `∫ g dt` over the grid interval (Lebesgue measure, ρ not applied).
    pub fn integrate(&self, g: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).map(|(&t, &w)| w * g(t)))
    }

    /// `∫ g ρ dt` over the grid interval.
    pub fn integrate_weighted(&self, g: impl Fn(f64) -> f64) -> f64 {
        compensated_sum(self.nodes.iter().zip(&self.weights).zip(&self.rho).map(|((&t, &w), &r)| w * r * g(t)))
    }

    fn panel_of(&self, x: f64) -> usize {
        let p = self.edges.partition_point(|&e| e <= x);
        p.saturating_sub(1).min(self.panels() - 1)
    }

    /// Weights `u` with `Σ uᵢ g(tᵢ) ≈ ∫_from^to g dt` (oriented), exact when
    /// `g` restricted to each panel is a polynomial of degree below
    /// `nodes_per_panel`. Partial panels integrate the node interpolant.
    pub fn partial_weights(&self, from: f64, to: f64) -> Result<Vec<f64>> {
        let (a, b) = self.interval.bounds()?;
        for x in [from, to] {
            if !(x >= a && x <= b) {
                return Err(Error::OutsideDomain(format!("{x} not in [{a}, {b}]")));
            }
        }
        let mut u = vec![0.0; self.len()];
        if from == to {
            return Ok(u);
        }
        let (lo, hi, sign) = if from < to { (from, to, 1.0) } else { (to, from, -1.0) };
        let n = self.nodes_per_panel;
        let (ref_nodes, ref_weights) = gauss_legendre(n);
        for p in self.panel_of(lo)..=self.panel_of(hi) {
            let (pa, pb) = (self.edges[p], self.edges[p + 1]);
            let sa = lo.max(pa);
            let sb = hi.min(pb);
            if sb <= sa {
                continue;
            }
            let range = p * n..(p + 1) * n;
            if sa == pa && sb == pb {
                for i in range {
                    u[i] += sign * self.weights[i];
                }
                continue;
            }
            let panel_nodes = &self.nodes[range.clone()];
            let bary = barycentric_weights(panel_nodes);
            let half = 0.5 * (sb - sa);
            let mid = 0.5 * (sb + sa);
            for (x, w) in ref_nodes.iter().zip(&ref_weights) {
                let s = mid + half * x;
                let basis = lagrange_basis(panel_nodes, &bary, s);
                for (k, l) in basis.iter().enumerate() {
                    u[range.start + k] += sign * half * w * l;
                }
            }
        }
        Ok(u)
    }

    /// Derivative of the per-panel node interpolant of `values`, at the nodes.
    pub fn differentiate(&self, values: &[Complex64]) -> Result<Vec<Complex64>> {
        if values.len() != self.len() {
            return Err(Error::GridMismatch);
        }
        let n = self.nodes_per_panel;
        let mut out = vec![Complex64::new(0.0, 0.0); values.len()];
        for p in 0..self.panels() {
            let range = p * n..(p + 1) * n;
            let x = &self.nodes[range.clone()];
            let bary = barycentric_weights(x);
            let v = &values[range.clone()];
            for i in 0..n {
                let mut diag = Complex64::new(0.0, 0.0);
                let mut acc = ComplexSum::new();
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let dij = bary[j] / bary[i] / (x[i] - x[j]);
                    acc.add(v[j] * dij);
                    diag -= v[i] * dij;
                }
                out[range.start + i] = acc.value() + diag;
            }
        }
        Ok(out)
    }
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            let prod: f64 = (0..x.len()).filter(|&k| k != j).map(|k| x[j] - x[k]).product();
            1.0 / prod
        })
        .collect()
}

fn lagrange_basis(x: &[f64], bary: &[f64], s: f64) -> Vec<f64> {
    if let Some(k) = x.iter().position(|&xk| xk == s) {
        let mut e = vec![0.0; x.len()];
        e[k] = 1.0;
        return e;
    }
    let terms: Vec<f64> = x.iter().zip(bary).map(|(&xk, &bk)| bk / (s - xk)).collect();
    let denom: f64 = terms.iter().sum();
    terms.into_iter().map(|t| t / denom).collect()
}

/// A finite product of [`QuadGrid`]s: the discretized measure space.
///
/// Node `i` of a product space enumerates axes in row-major order (last
/// axis fastest); its measure is the product of `w·ρ` over the axes.
#[derive(Debug, Clone)]
pub struct GridSpace {
    axes: Vec<Arc<QuadGrid>>,
    shape: Vec<usize>,
    measure: Vec<f64>,
}

impl GridSpace {
    pub fn line(grid: QuadGrid) -> Arc<Self> {
        Self::from_axes(vec![Arc::new(grid)]).expect("a single grid is always within the cap")
    }

    pub fn from_axes(axes: Vec<Arc<QuadGrid>>) -> Result<Arc<Self>> {
        if axes.is_empty() {
            return Err(Error::InvalidParameter("a grid space needs at least one axis".into()));
        }
        let shape: Vec<usize> = axes.iter().map(|g| g.len()).collect();
        let total = shape.iter().try_fold(1usize, |acc, &n| acc.checked_mul(n));
        let total = match total {
            Some(t) if t <= MAX_GRID_NODES => t,
            Some(t) => return Err(Error::GridTooLarge { nodes: t, cap: MAX_GRID_NODES }),
            None => return Err(Error::GridTooLarge { nodes: usize::MAX, cap: MAX_GRID_NODES }),
        };
        let mut measure = vec![1.0; total];
        let mut stride = total;
        for g in &axes {
            let n = g.len();
            stride /= n;
            for (idx, m) in measure.iter_mut().enumerate() {
                let k = (idx / stride) % n;
                *m *= g.weights()[k] * g.rho()[k];
            }
        }
        Ok(Arc::new(Self { axes, shape, measure }))
    }

    pub fn product(spaces: &[&GridSpace]) -> Result<Arc<Self>> {
        Self::from_axes(spaces.iter().flat_map(|s| s.axes.iter().cloned()).collect())
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Arc<QuadGrid>] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &QuadGrid {
        &self.axes[k]
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.measure.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measure.is_empty()
    }

    /// `w·ρ` (product over axes) at each node.
    pub fn measure(&self) -> &[f64] {
        &self.measure
    }

    /// Coordinates of node `idx`.
    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims()];
        let mut rem = idx;
        for k in (0..self.dims()).rev() {
            let n = self.shape[k];
            out[k] = self.axes[k].nodes()[rem % n];
            rem /= n;
        }
        out
    }

    /// Structural equality: same axes (by identity or by value).
    pub fn same_as(&self, other: &GridSpace) -> bool {
        std::ptr::eq(self, other)
            || (self.axes.len() == other.axes.len()
                && self.axes.iter().zip(&other.axes).all(|(a, b)| Arc::ptr_eq(a, b) || a == b))
    }
}

/// Complex samples of an element of `L²_ρ` on a [`GridSpace`].
#[derive(Debug, Clone)]
pub struct HVector {
    space: Arc<GridSpace>,
    values: Vec<Complex64>,
}

impl HVector {
    pub fn new(space: Arc<GridSpace>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { space, values })
    }

    pub fn zeros(space: Arc<GridSpace>) -> Self {
        let n = space.len();
        Self { space, values: vec![Complex64::new(0.0, 0.0); n] }
    }

    /// Samples `f` at every node; `f` receives the node coordinates.
    pub fn from_fn(space: Arc<GridSpace>, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let values = (0..space.len()).map(|i| f(&space.coords(i))).collect();
        Self { space, values }
    }

    /// One-dimensional convenience form of [`HVector::from_fn`].
    pub fn from_fn_1d(space: Arc<GridSpace>, f: impl Fn(f64) -> Complex64) -> Self {
        assert_eq!(space.dims(), 1, "from_fn_1d on a product space");
        let values = space.axis(0).nodes().iter().map(|&t| f(t)).collect();
        Self { space, values }
    }

    /// Row-major outer product of factor vectors on the product space.
    pub fn tensor(factors: &[&HVector]) -> Result<Self> {
        let spaces: Vec<&GridSpace> = factors.iter().map(|f| f.space.as_ref()).collect();
        let space = GridSpace::product(&spaces)?;
        Self::tensor_on(space, factors)
    }

    /// Outer product placed on an existing product space.
    pub fn tensor_on(space: Arc<GridSpace>, factors: &[&HVector]) -> Result<Self> {
        let expected: usize = factors.iter().map(|f| f.values.len()).product();
        if expected != space.len() {
            return Err(Error::GridMismatch);
        }
        let mut values = vec![Complex64::new(1.0, 0.0)];
        for f in factors {
            let mut next = Vec::with_capacity(values.len() * f.values.len());
            for v in &values {
                for w in &f.values {
                    next.push(v * w);
                }
            }
            values = next;
        }
        Ok(Self { space, values })
    }

    pub fn space(&self) -> &Arc<GridSpace> {
        &self.space
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn conj(&self) -> Self {
        Self { space: self.space.clone(), values: self.values.iter().map(|v| v.conj()).collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { space: self.space.clone(), values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn sub(&self, other: &HVector) -> Result<Self> {
        self.check_space(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { space: self.space.clone(), values })
    }

    pub fn add(&self, other: &HVector) -> Result<Self> {
        self.check_space(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { space: self.space.clone(), values })
    }

    /// `Σ cᵢ vᵢ` over vectors sharing one space.
    pub fn linear_combination(space: Arc<GridSpace>, coeffs: &[Complex64], vectors: &[&HVector]) -> Result<Self> {
        if coeffs.len() != vectors.len() {
            return Err(Error::ArityMismatch { expected: vectors.len(), got: coeffs.len() });
        }
        let n = space.len();
        let mut acc = vec![ComplexSum::new(); n];
        for (c, v) in coeffs.iter().zip(vectors) {
            if !v.space.same_as(&space) {
                return Err(Error::GridMismatch);
            }
            for (a, x) in acc.iter_mut().zip(&v.values) {
                a.add(c * x);
            }
        }
        Ok(Self { space, values: acc.iter().map(ComplexSum::value).collect() })
    }

    pub fn norm_sq(&self) -> f64 {
        compensated_sum(self.values.iter().zip(self.space.measure()).map(|(v, m)| v.norm_sqr() * m))
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    fn check_space(&self, other: &HVector) -> Result<()> {
        if self.space.same_as(&other.space) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// `Σ fᵢ·conj(gᵢ)·ρᵢ·wᵢ`, linear in `f`, conjugate-linear in `g`.
pub fn inner_weighted(f: &HVector, g: &HVector) -> Result<Complex64> {
    f.check_space(g)?;
    Ok(complex_sum(f.values.iter().zip(&g.values).zip(f.space.measure()).map(|((a, b), m)| a * b.conj() * *m)))
}
