//! Exercises the C ABI through its Rust-visible symbols: handle lifecycle,
//! status codes, null handling, and a few frozen values to prove the ABI
//! reaches the same numerics as the core crate.

use std::ffi::CStr;
use std::ptr;
use zetadrive_capi::*;

const RIEMANN: i32 = 0;
const POLYA: i32 = 1;

fn new_profile(target: i32, e: f64, omega: f64) -> *mut ZdProfile {
    let mut handle: *mut ZdProfile = ptr::null_mut();
    let status = zd_profile_new(target, e, omega, &mut handle);
    assert_eq!(status, ZdStatus::Ok);
    assert!(!handle.is_null());
    handle
}

#[test]
fn version_string_is_static_and_sane() {
    let v = zd_version();
    assert!(!v.is_null());
    let s = unsafe { CStr::from_ptr(v) }.to_str().unwrap();
    assert!(s.contains('.'), "version {s:?}");
    assert_eq!(s, env!("CARGO_PKG_VERSION"));
}

#[test]
fn profile_lifecycle_and_phase_values() {
    let h = new_profile(RIEMANN, 14.0, 8.0);

    let mut f = f64::NAN;
    assert_eq!(zd_phase(h, 0.0, &mut f), ZdStatus::Ok);
    assert!(f.abs() <= 1e-12, "F(0) = {f}");

    // the compressed waveform reaches its half-period peak at pi/8
    assert_eq!(zd_phase(h, std::f64::consts::PI / 8.0, &mut f), ZdStatus::Ok);
    assert!((f - 3.141592653590).abs() <= 1e-9, "F at compressed midpoint: {f}");

    zd_profile_free(h);
    zd_profile_free(ptr::null_mut()); // tolerated
}

#[test]
fn quasi_energy_and_sor_match_frozen_core_values() {
    let h = new_profile(RIEMANN, 14.0, 8.0);

    let mut eps = f64::NAN;
    assert_eq!(zd_quasi_energy(h, &mut eps), ZdStatus::Ok);
    assert!((eps - 1.3854811223e-3).abs() <= 1e-9, "eps = {eps:.10e}");

    let mut sor = f64::NAN;
    assert_eq!(zd_sor(h, 20, &mut sor), ZdStatus::Ok);
    assert!((sor - (-1.808784)).abs() <= 1e-5, "sor = {sor:.6}");

    assert_eq!(zd_sor(h, 0, &mut sor), ZdStatus::InvalidInput);
    zd_profile_free(h);
}

#[test]
fn oracle_calls_reach_the_reference_transform() {
    let mut v = f64::NAN;
    assert_eq!(zd_oracle_xi(RIEMANN, 14.0, &mut v), ZdStatus::Ok);
    assert!((v - 2.012944442e-4).abs() <= 1e-11, "xi(14) = {v:.9e}");

    let mut root = f64::NAN;
    assert_eq!(zd_oracle_zero(RIEMANN, 14.0, 15.0, &mut root), ZdStatus::Ok);
    assert!((root - 14.1347251).abs() <= 1e-6);
    assert_eq!(zd_oracle_zero(POLYA, 8.0, 10.0, &mut root), ZdStatus::Ok);
    assert!((root - 8.9928140).abs() <= 1e-6);

    // same-sign bracket is a numerical failure, not a crash
    assert_eq!(zd_oracle_zero(RIEMANN, 15.0, 16.0, &mut root), ZdStatus::Numerical);
}

#[test]
fn status_codes_cover_bad_inputs_and_null_pointers() {
    let mut handle: *mut ZdProfile = ptr::null_mut();
    assert_eq!(zd_profile_new(7, 14.0, 8.0, &mut handle), ZdStatus::InvalidInput);
    assert_eq!(zd_profile_new(RIEMANN, -1.0, 8.0, &mut handle), ZdStatus::InvalidInput);
    assert_eq!(zd_profile_new(RIEMANN, 14.0, 0.5, &mut handle), ZdStatus::InvalidInput);
    assert!(handle.is_null(), "failed construction must not write the handle");

    assert_eq!(
        zd_profile_new(RIEMANN, 14.0, 8.0, ptr::null_mut()),
        ZdStatus::NullPointer
    );

    let mut out = f64::NAN;
    assert_eq!(zd_phase(ptr::null(), 0.0, &mut out), ZdStatus::NullPointer);
    assert_eq!(zd_quasi_energy(ptr::null(), &mut out), ZdStatus::NullPointer);
    assert_eq!(zd_sor(ptr::null(), 5, &mut out), ZdStatus::NullPointer);
    assert_eq!(zd_oracle_xi(RIEMANN, 14.0, ptr::null_mut()), ZdStatus::NullPointer);
    assert_eq!(zd_oracle_zero(RIEMANN, 14.0, 15.0, ptr::null_mut()), ZdStatus::NullPointer);

    let h = new_profile(POLYA, 9.0, 8.0);
    assert_eq!(zd_phase(h, f64::NAN, &mut out), ZdStatus::InvalidInput);
    zd_profile_free(h);

    assert_eq!(zd_oracle_xi(99, 1.0, &mut out), ZdStatus::InvalidInput);
}

#[test]
fn generated_header_exposes_the_full_surface() {
    let header = std::fs::read_to_string(
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("include/zetadrive.h"),
    )
    .expect("build script should have generated include/zetadrive.h");
    for needle in [
        "ZETADRIVE_H",
        "typedef enum ZdStatus",
        "typedef enum ZdTarget",
        "typedef struct ZdProfile ZdProfile",
        "zd_version(void)",
        "zd_profile_new(",
        "zd_profile_free(",
        "zd_phase(",
        "zd_quasi_energy(",
        "zd_sor(",
        "zd_oracle_xi(",
        "zd_oracle_zero(",
    ] {
        assert!(header.contains(needle), "header is missing {needle:?}");
    }
}
