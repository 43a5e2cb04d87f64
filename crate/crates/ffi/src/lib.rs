//! C ABI over `rkhs-invert`.
//!
//! Every fallible function returns an [`RkhsStatus`]; on failure a message is
//! available from [`rkhs_last_error`] on the same thread. Handles are opaque and
//! released with their `_free` function. Strings returned to the caller are
//! released with [`rkhs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use rkhs_invert::cli::{run_suite, Report, RunConfig, Suite};
use rkhs_invert::inversion::invert_at;
use rkhs_invert::numerics::{med3, ExtReal, Interval, Weight};
use rkhs_invert::rkhs::{build_span_basis, kernel_eval, transform, SpanBasis};
use rkhs_invert::spaces::{
    pw_kernel, sinc_identity_check, sobolev_kernel, PwFeatureMap, PwSpec, SobolevSpace, SobolevSpec,
};
use rkhs_invert::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkhsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    OutsideDomain = 3,
    GridMismatch = 4,
    Numerical = 5,
    CheckFailed = 6,
    InvalidUtf8 = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RkhsWeight {
    /// `ρ ≡ 1`.
    Const = 0,
    /// `ρ(t) = 1 + t`.
    Affine = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RkhsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for RkhsComplex {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<RkhsComplex> for Complex64 {
    fn from(z: RkhsComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RkhsSincReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RkhsInversion {
    pub value: RkhsComplex,
    pub residual: f64,
    pub bound: f64,
}

/// Opaque Sobolev space `H_{c,ρ}(I)` on a fixed grid.
pub struct RkhsSobolevSpace(SobolevSpace);

/// Opaque Paley–Wiener feature map.
pub struct RkhsPwMap(PwFeatureMap);

/// Opaque span basis of Sobolev sections.
pub struct RkhsSpanBasis(SpanBasis<f64>);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn status_of(e: &Error) -> RkhsStatus {
    match e {
        Error::OutsideDomain(_) | Error::ComplexEvaluation | Error::IndexOutOfRange { .. } => RkhsStatus::OutsideDomain,
        Error::GridMismatch | Error::BasisMismatch | Error::ArityMismatch { .. } => RkhsStatus::GridMismatch,
        Error::Numerical(_) | Error::GridTooLarge { .. } => RkhsStatus::Numerical,
        _ => RkhsStatus::InvalidParameter,
    }
}

struct Failure(RkhsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RkhsStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, converting errors and panics into a status plus last-error message.
/// Handles are only read through shared references, so a panic leaves them intact.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> RkhsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RkhsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {msg}"));
            RkhsStatus::Panic
        }
    }
}

/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

/// # Safety
/// `ptr` must be null or point to a live `T`.
unsafe fn borrow<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

/// # Safety
/// `ptr` must be null or point to `len` readable values.
unsafe fn slice<'a, T>(ptr: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(ptr, len))
}

fn weight(w: RkhsWeight) -> Weight {
    match w {
        RkhsWeight::Const => Weight::unit(),
        RkhsWeight::Affine => Weight::one_plus_t(),
    }
}

fn spec(lo: f64, hi: f64, c: f64, w: RkhsWeight) -> Result<SobolevSpec, Failure> {
    Ok(SobolevSpec::new(Interval::finite(lo, hi), ExtReal::new(c)?, weight(w))?)
}

/// Message for the last failed call on this thread, or null. Valid until the next call.
#[no_mangle]
pub extern "C" fn rkhs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rkhs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Median of three extended reals; `±INFINITY` are the infinite endpoints. NaN input gives NaN.
#[no_mangle]
pub extern "C" fn rkhs_med3(x: f64, y: f64, z: f64) -> f64 {
    match (ExtReal::new(x), ExtReal::new(y), ExtReal::new(z)) {
        (Ok(x), Ok(y), Ok(z)) => med3(x, y, z).to_f64(),
        _ => f64::NAN,
    }
}

/// Closed-form kernel of `H_{c,ρ}((lo, hi))`.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_sobolev_kernel(
    lo: f64,
    hi: f64,
    c: f64,
    rho: RkhsWeight,
    x: f64,
    y: f64,
    out: *mut f64,
) -> RkhsStatus {
    guard(move || {
        let k = sobolev_kernel(&spec(lo, hi, c, rho)?, x, y)?;
        write(out, k)
    })
}

/// Paley–Wiener kernel `K_a(x, y)` at complex points.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_pw_kernel(a: f64, x: RkhsComplex, y: RkhsComplex, out: *mut RkhsComplex) -> RkhsStatus {
    guard(move || {
        let pw = PwSpec::new(a)?;
        write(out, pw_kernel(&pw, x.into(), y.into()).into())
    })
}

/// Truncated line integral of a product of two sinc sections against its closed form.
///
/// # Safety
/// `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_sinc_identity_check(
    a: f64,
    x: f64,
    y: f64,
    radius: f64,
    out: *mut RkhsSincReport,
) -> RkhsStatus {
    guard(move || {
        let r = sinc_identity_check(a, x, y, radius)?;
        write(out, RkhsSincReport { lhs: r.lhs, rhs: r.rhs, abs_err: r.abs_err })
    })
}

/// # Safety
/// `out` must be valid for a write; the handle is released with [`rkhs_sobolev_space_free`].
#[no_mangle]
pub unsafe extern "C" fn rkhs_sobolev_space_new(
    lo: f64,
    hi: f64,
    c: f64,
    rho: RkhsWeight,
    panels: usize,
    nodes_per_panel: usize,
    breaks: *const f64,
    n_breaks: usize,
    out: *mut *mut RkhsSobolevSpace,
) -> RkhsStatus {
    guard(move || {
        let breaks = slice(breaks, n_breaks, "breaks")?;
        let h = SobolevSpace::new(spec(lo, hi, c, rho)?, panels, nodes_per_panel, breaks)?;
        write(out, Box::into_raw(Box::new(RkhsSobolevSpace(h))))
    })
}

/// # Safety
/// `h` must be null or a handle from [`rkhs_sobolev_space_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rkhs_sobolev_space_free(h: *mut RkhsSobolevSpace) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Quadrature Gram entry `⟨φ(y), φ(x)⟩` on the handle's grid.
///
/// # Safety
/// `h` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_sobolev_space_gram(
    h: *const RkhsSobolevSpace,
    x: f64,
    y: f64,
    out: *mut f64,
) -> RkhsStatus {
    guard(move || {
        let h = borrow(h, "space")?;
        write(out, kernel_eval(&h.0, &x, &y)?.re)
    })
}

/// # Safety
/// `out` must be valid for a write; the handle is released with [`rkhs_pw_map_free`].
#[no_mangle]
pub unsafe extern "C" fn rkhs_pw_map_new(
    a: f64,
    max_abs_x: f64,
    nodes_per_panel: usize,
    out: *mut *mut RkhsPwMap,
) -> RkhsStatus {
    guard(move || {
        let map = PwFeatureMap::for_frequencies(PwSpec::new(a)?, max_abs_x, nodes_per_panel, &[])?;
        write(out, Box::into_raw(Box::new(RkhsPwMap(map))))
    })
}

/// # Safety
/// `map` must be null or a handle from [`rkhs_pw_map_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rkhs_pw_map_free(map: *mut RkhsPwMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

/// Quadrature Gram entry of the Paley–Wiener features at real points.
///
/// # Safety
/// `map` must be a live handle and `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_pw_map_gram(map: *const RkhsPwMap, x: f64, y: f64, out: *mut RkhsComplex) -> RkhsStatus {
    guard(move || {
        let map = borrow(map, "map")?;
        write(out, kernel_eval(&map.0, &x, &y)?.into())
    })
}

/// Span basis of the sections `k_x`, `x ∈ points`.
///
/// # Safety
/// `h` must be a live handle, `points` readable for `n` values, `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_span_basis_new(
    h: *const RkhsSobolevSpace,
    points: *const f64,
    n: usize,
    out: *mut *mut RkhsSpanBasis,
) -> RkhsStatus {
    guard(move || {
        let h = borrow(h, "space")?;
        let basis = build_span_basis(&h.0, slice(points, n, "points")?)?;
        write(out, Box::into_raw(Box::new(RkhsSpanBasis(basis))))
    })
}

/// # Safety
/// `basis` must be null or a handle from [`rkhs_span_basis_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rkhs_span_basis_free(basis: *mut RkhsSpanBasis) {
    if !basis.is_null() {
        drop(Box::from_raw(basis));
    }
}

/// Numerical rank of the basis Gram matrix; 0 for a null handle.
///
/// # Safety
/// `basis` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rkhs_span_basis_rank(basis: *const RkhsSpanBasis) -> usize {
    basis.as_ref().map_or(0, |b| b.0.rank())
}

/// Transforms `f = Σ coeffs[i] k_{x_i}` and recovers `f(t)` from the transform alone.
///
/// # Safety
/// Handles must be live, `coeffs` readable for the basis length, `out` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_invert_span_member(
    h: *const RkhsSobolevSpace,
    basis: *const RkhsSpanBasis,
    coeffs: *const RkhsComplex,
    n: usize,
    t: f64,
    out: *mut RkhsInversion,
) -> RkhsStatus {
    guard(move || {
        let h = borrow(h, "space")?;
        let basis = borrow(basis, "basis")?;
        let coeffs: Vec<Complex64> = slice(coeffs, n, "coeffs")?.iter().map(|&z| z.into()).collect();
        let f = basis.0.combine(&coeffs)?;
        let image = transform(&f, &h.0)?;
        let inv = invert_at(&image, &t, &h.0, &basis.0)?;
        write(out, RkhsInversion { value: inv.value.into(), residual: inv.residual, bound: inv.bound })
    })
}

/// Runs a verification suite and returns its JSON report through `out_json`.
///
/// Returns [`RkhsStatus::CheckFailed`] when the report does not pass; the JSON is
/// still written. Release it with [`rkhs_string_free`].
///
/// # Safety
/// `suite` must be a NUL-terminated string and `out_json` valid for a write.
#[no_mangle]
pub unsafe extern "C" fn rkhs_verify_suite(suite: *const c_char, seed: u64, out_json: *mut *mut c_char) -> RkhsStatus {
    let mut passed = true;
    let passed_ref = &mut passed;
    let status = guard(move || {
        if suite.is_null() {
            return Err(null("suite"));
        }
        let name = CStr::from_ptr(suite).to_str().map_err(|e| Failure(RkhsStatus::InvalidUtf8, e.to_string()))?;
        let suite: Suite = name.parse()?;
        let cfg = RunConfig { seed, ..RunConfig::default() };
        let report = Report::new(suite.name(), run_suite(suite, &cfg)?);
        *passed_ref = report.pass;
        let json = serde_json_string(&report)?;
        write(out_json, json.into_raw())
    });
    if status == RkhsStatus::Ok && !passed {
        set_last_error("one or more checks failed");
        return RkhsStatus::CheckFailed;
    }
    status
}

fn serde_json_string(report: &Report) -> Result<CString, Failure> {
    let text = report.to_json().map_err(|e| Failure(RkhsStatus::Numerical, e.to_string()))?;
    CString::new(text).map_err(|e| Failure(RkhsStatus::Numerical, e.to_string()))
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rkhs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
