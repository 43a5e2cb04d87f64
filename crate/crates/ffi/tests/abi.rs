use std::f64::consts::PI;
use std::ffi::{CStr, CString};
use std::ptr;

use rkhs_invert_ffi::*;

fn last_error() -> String {
    let p = rkhs_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn med3_handles_infinities_and_nan() {
    assert_eq!(rkhs_med3(f64::NEG_INFINITY, 2.0, f64::INFINITY), 2.0);
    assert_eq!(rkhs_med3(f64::INFINITY, f64::INFINITY, 0.0), f64::INFINITY);
    assert!(rkhs_med3(f64::NAN, 0.0, 1.0).is_nan());
}

#[test]
fn closed_form_kernels() {
    let mut k = 0.0;
    let s = unsafe { rkhs_sobolev_kernel(0.0, 1.0, 0.0, RkhsWeight::Affine, 0.5, 0.8, &mut k) };
    assert_eq!(s, RkhsStatus::Ok);
    assert!((k - 1.5f64.ln()).abs() < 1e-14);

    let mut z = RkhsComplex::default();
    let zero = RkhsComplex { re: 0.0, im: 0.0 };
    assert_eq!(unsafe { rkhs_pw_kernel(1.0, zero, zero, &mut z) }, RkhsStatus::Ok);
    assert!((z.re - 1.0 / PI).abs() < 1e-15 && z.im == 0.0);
}

#[test]
fn errors_set_status_and_message() {
    let mut k = 0.0;
    let s = unsafe { rkhs_sobolev_kernel(0.0, 1.0, 0.0, RkhsWeight::Const, 2.0, 0.5, &mut k) };
    assert_eq!(s, RkhsStatus::OutsideDomain);
    assert!(last_error().contains('2'));

    let s =
        unsafe { rkhs_pw_kernel(-1.0, RkhsComplex::default(), RkhsComplex::default(), &mut RkhsComplex::default()) };
    assert_eq!(s, RkhsStatus::InvalidParameter);

    let s = unsafe { rkhs_sobolev_kernel(0.0, 1.0, 0.0, RkhsWeight::Const, 0.2, 0.5, ptr::null_mut()) };
    assert_eq!(s, RkhsStatus::NullPointer);

    let mut ok = 0.0;
    assert_eq!(unsafe { rkhs_sobolev_kernel(0.0, 1.0, 0.0, RkhsWeight::Const, 0.2, 0.5, &mut ok) }, RkhsStatus::Ok);
    assert!(rkhs_last_error().is_null());
}

#[test]
fn sinc_check_reports_small_error() {
    let mut r = RkhsSincReport::default();
    assert_eq!(unsafe { rkhs_sinc_identity_check(1.0, 0.5, -0.3, 1e4, &mut r) }, RkhsStatus::Ok);
    assert!(r.abs_err < 1e-3);
    assert!((r.lhs - r.rhs).abs() == r.abs_err);
}

#[test]
fn handles_round_trip_a_span_member() {
    let points = [0.2, 0.45, 0.7, 0.9];
    let probe = 0.6;
    let breaks = [0.2, 0.45, 0.6, 0.7, 0.9];
    let mut h = ptr::null_mut();
    let s = unsafe {
        rkhs_sobolev_space_new(0.0, 1.0, 0.0, RkhsWeight::Affine, 8, 16, breaks.as_ptr(), breaks.len(), &mut h)
    };
    assert_eq!(s, RkhsStatus::Ok);

    let mut g = 0.0;
    assert_eq!(unsafe { rkhs_sobolev_space_gram(h, 0.45, 0.7, &mut g) }, RkhsStatus::Ok);
    assert!((g - 1.45f64.ln()).abs() < 1e-12);

    let mut basis = ptr::null_mut();
    assert_eq!(unsafe { rkhs_span_basis_new(h, points.as_ptr(), points.len(), &mut basis) }, RkhsStatus::Ok);
    assert_eq!(unsafe { rkhs_span_basis_rank(basis) }, 4);

    let coeffs = [
        RkhsComplex { re: 1.0, im: 0.0 },
        RkhsComplex { re: -0.5, im: 0.25 },
        RkhsComplex { re: 0.0, im: 1.0 },
        RkhsComplex { re: 0.3, im: -0.2 },
    ];
    let mut inv = RkhsInversion::default();
    let s = unsafe { rkhs_invert_span_member(h, basis, coeffs.as_ptr(), coeffs.len(), probe, &mut inv) };
    assert_eq!(s, RkhsStatus::Ok);
    let (re, im) = points.iter().zip(&coeffs).fold((0.0, 0.0), |(re, im), (&x, c)| {
        let k = (1.0 + x.min(probe)).ln();
        (re + c.re * k, im + c.im * k)
    });
    assert!((inv.value.re - re).abs() < 1e-10 && (inv.value.im - im).abs() < 1e-10);
    assert!(inv.residual.is_finite() && inv.residual >= 0.0);
    assert!((re * re + im * im).sqrt() <= inv.bound + 1e-12);

    let s = unsafe { rkhs_invert_span_member(h, basis, coeffs.as_ptr(), 2, probe, &mut inv) };
    assert_ne!(s, RkhsStatus::Ok);

    unsafe {
        rkhs_span_basis_free(basis);
        rkhs_sobolev_space_free(h);
        rkhs_span_basis_free(ptr::null_mut());
        rkhs_sobolev_space_free(ptr::null_mut());
    }
    assert_eq!(unsafe { rkhs_span_basis_rank(ptr::null()) }, 0);
}

#[test]
fn pw_map_gram_matches_closed_form() {
    let mut map = ptr::null_mut();
    assert_eq!(unsafe { rkhs_pw_map_new(1.0, 3.0, 16, &mut map) }, RkhsStatus::Ok);
    let mut g = RkhsComplex::default();
    assert_eq!(unsafe { rkhs_pw_map_gram(map, 1.0, -0.5, &mut g) }, RkhsStatus::Ok);
    let mut k = RkhsComplex::default();
    let x = RkhsComplex { re: 1.0, im: 0.0 };
    let y = RkhsComplex { re: -0.5, im: 0.0 };
    assert_eq!(unsafe { rkhs_pw_kernel(1.0, x, y, &mut k) }, RkhsStatus::Ok);
    assert!((g.re - k.re).abs() < 1e-12 && g.im.abs() < 1e-12);
    unsafe { rkhs_pw_map_free(map) };
}

#[test]
fn verify_suite_returns_json() {
    let name = CString::new("cons").unwrap();
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { rkhs_verify_suite(name.as_ptr(), 42, &mut json) }, RkhsStatus::Ok);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { rkhs_string_free(json) };
    assert!(text.contains("\"suite\": \"cons\"") && text.contains("\"pass\": true"));

    let bogus = CString::new("bogus").unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { rkhs_verify_suite(bogus.as_ptr(), 42, &mut none) }, RkhsStatus::InvalidParameter);
    assert!(none.is_null());
    assert!(last_error().contains("valid suites"));
    assert_eq!(unsafe { rkhs_verify_suite(ptr::null(), 42, &mut none) }, RkhsStatus::NullPointer);
}

#[test]
fn version_is_package_version() {
    let v = unsafe { CStr::from_ptr(rkhs_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
