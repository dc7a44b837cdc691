//! C ABI over the zetadrive core: opaque drive-profile handles, status
//! codes instead of panics, and plain doubles at the boundary.
//!
//! Ownership: `zd_profile_new` allocates, `zd_profile_free` releases. A
//! handle may be shared across threads for reads (the profile is immutable)
//! but must be freed exactly once, after all readers are done.

use std::ffi::{c_char, c_int};
use std::panic::{catch_unwind, AssertUnwindSafe};

use zetadrive::driving::{rescaled_phase, DrivingSpec, PhaseProfile};
use zetadrive::floquet::{propagate_period, stroboscopic_probabilities, QubitState, SimConfig};
use zetadrive::specfun::{oracle_xi, oracle_zero, KernelConfig};
use zetadrive::{Error, Target};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZdStatus {
    /// Success.
    Ok = 0,
    /// A parameter was out of range or otherwise malformed.
    InvalidInput = 1,
    /// The computation failed to converge or left its valid domain.
    Numerical = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
}

/// Transform selector accepted by the `target` arguments.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZdTarget {
    Riemann = 0,
    Polya = 1,
}

/// Opaque drive profile: one (target, E, omega) waveform plus its
/// propagation defaults.
pub struct ZdProfile {
    profile: PhaseProfile,
    omega: f64,
    sim: SimConfig,
}

fn status_of(e: &Error) -> ZdStatus {
    match e {
        Error::InvalidInput(_) => ZdStatus::InvalidInput,
        // no I/O happens behind this ABI; map the residual variant safely
        _ => ZdStatus::Numerical,
    }
}

fn target_of(raw: c_int) -> Result<Target, ZdStatus> {
    match raw {
        0 => Ok(Target::Riemann),
        1 => Ok(Target::Polya),
        _ => Err(ZdStatus::InvalidInput),
    }
}

/// Never let a panic unwind across the ABI.
fn guarded<F: FnOnce() -> ZdStatus>(f: F) -> ZdStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(ZdStatus::Numerical)
}

/// Library version as a static NUL-terminated string; never null, never
/// freed by the caller.
#[no_mangle]
pub extern "C" fn zd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Builds a drive profile for `target` (0 = Riemann, 1 = Polya) at spectral
/// parameter `e` with time-compression `omega >= 1`, and stores the handle
/// in `*out`. On any failure `*out` is left untouched.
#[no_mangle]
pub extern "C" fn zd_profile_new(
    target: c_int,
    e: f64,
    omega: f64,
    out: *mut *mut ZdProfile,
) -> ZdStatus {
    if out.is_null() {
        return ZdStatus::NullPointer;
    }
    guarded(|| {
        let target = match target_of(target) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let spec = match DrivingSpec::new(target, e, omega, KernelConfig::default()) {
            Ok(s) => s,
            Err(e) => return status_of(&e),
        };
        let profile = match PhaseProfile::new(spec) {
            Ok(p) => p,
            Err(e) => return status_of(&e),
        };
        let handle = Box::new(ZdProfile { profile, omega, sim: SimConfig::default() });
        unsafe { *out = Box::into_raw(handle) };
        ZdStatus::Ok
    })
}

/// Releases a profile handle. Passing null is a no-op; passing the same
/// handle twice is undefined behavior.
#[no_mangle]
pub extern "C" fn zd_profile_free(profile: *mut ZdProfile) {
    if !profile.is_null() {
        drop(unsafe { Box::from_raw(profile) });
    }
}

/// Accumulated drive phase F at lab time `t` (the waveform repeats omega
/// times per base period). Writes the value to `*out`.
#[no_mangle]
pub extern "C" fn zd_phase(profile: *const ZdProfile, t: f64, out: *mut f64) -> ZdStatus {
    if profile.is_null() || out.is_null() {
        return ZdStatus::NullPointer;
    }
    guarded(|| {
        let h = unsafe { &*profile };
        match rescaled_phase(&h.profile, t, h.omega) {
            Ok(v) => {
                unsafe { *out = v };
                ZdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Positive quasi-energy of the one-period propagator, in units of the
/// base drive frequency, folded to [0, 1/2]. Writes the value to `*out`.
#[no_mangle]
pub extern "C" fn zd_quasi_energy(profile: *const ZdProfile, out: *mut f64) -> ZdStatus {
    if profile.is_null() || out.is_null() {
        return ZdStatus::NullPointer;
    }
    guarded(|| {
        let h = unsafe { &*profile };
        match propagate_period(&h.profile, h.omega, &h.sim) {
            Ok(m) => {
                unsafe { *out = m.quasi_pair.0 };
                ZdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Sum over `periods` stroboscopic samples of P_plus(m) - 1/2, starting
/// from |0>. Exact probabilities, no shot noise. Writes the sum to `*out`.
#[no_mangle]
pub extern "C" fn zd_sor(profile: *const ZdProfile, periods: u32, out: *mut f64) -> ZdStatus {
    if profile.is_null() || out.is_null() {
        return ZdStatus::NullPointer;
    }
    guarded(|| {
        let h = unsafe { &*profile };
        if periods == 0 {
            return ZdStatus::InvalidInput;
        }
        let sim = SimConfig { periods: periods as usize, ..h.sim };
        match stroboscopic_probabilities(&h.profile, h.omega, &sim, QubitState::ket0()) {
            Ok(series) => {
                unsafe { *out = series.iter().map(|p| p.p_plus - 0.5).sum() };
                ZdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Reference transform value at `e` (full-range quadrature, independent of
/// any drive). Writes the value to `*out`.
#[no_mangle]
pub extern "C" fn zd_oracle_xi(target: c_int, e: f64, out: *mut f64) -> ZdStatus {
    if out.is_null() {
        return ZdStatus::NullPointer;
    }
    guarded(|| {
        let target = match target_of(target) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match oracle_xi(target, e, &KernelConfig::full_range()) {
            Ok(v) => {
                unsafe { *out = v.value };
                ZdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Bisects the reference transform for a zero inside [lo, hi]; the ends
/// must straddle a sign change. Writes the root to `*out`.
#[no_mangle]
pub extern "C" fn zd_oracle_zero(target: c_int, lo: f64, hi: f64, out: *mut f64) -> ZdStatus {
    if out.is_null() {
        return ZdStatus::NullPointer;
    }
    guarded(|| {
        let target = match target_of(target) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match oracle_zero(target, lo, hi, &KernelConfig::full_range()) {
            Ok(root) => {
                unsafe { *out = root };
                ZdStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
