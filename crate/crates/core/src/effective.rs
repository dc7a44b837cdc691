//! First-order effective tunneling.
//!
//! Averaging e^{-iF} over one period gives the leading effective coupling
//! J_eff between the two stroboscopic states. The drive is built so that
//! Re(J_eff) is proportional to the target transform, which is what turns
//! zero-finding into a quantum simulation problem. The phase is referenced
//! to the plateau value h = F(pi)/2: the segment symmetry F - h = +-G makes
//! cos(F - h) = g(t), the transform integrand itself; without that
//! reference the proportionality constant would drift with E.

use crate::driving::{rescaled_phase, PhaseProfile};
use crate::quad::trapezoid_uniform_c;
use crate::Error;
use num_complex::Complex64;
use std::f64::consts::TAU;

/// First-order effective tunneling at one (E, omega) point.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct EffectiveTunneling {
    pub re: f64,
    pub im: f64,
    pub e: f64,
    pub omega: f64,
}

impl EffectiveTunneling {
    pub fn magnitude(&self) -> f64 {
        self.re.hypot(self.im)
    }
}

fn j_eff_of_phase(
    phase: &dyn Fn(f64) -> Result<f64, Error>,
    reference: f64,
    j: f64,
    quad_points: usize,
) -> Result<Complex64, Error> {
    let integrand = |t: f64| -> Complex64 {
        let f = phase(t).unwrap_or(f64::NAN);
        Complex64::from_polar(1.0, -(f - reference))
    };
    let full = trapezoid_uniform_c(&integrand, 0.0, TAU, quad_points);
    let half = trapezoid_uniform_c(&integrand, 0.0, TAU, quad_points / 2);
    // the integrand is periodic and continuous but its derivative has cusps
    // at the segment joins, so trapezoid convergence is algebraic: the
    // default mesh lands at a few 1e-6. The guard only has to catch a mesh
    // that no longer resolves the compressed waveform at all.
    if (full - half).norm() > 1e-5 {
        return Err(Error::Numerical(format!(
            "period average not converged: {} nodes vs {} differ by {:.3e}",
            quad_points,
            quad_points / 2,
            (full - half).norm()
        )));
    }
    if full.re.is_nan() || full.im.is_nan() {
        return Err(Error::Numerical("phase evaluation failed inside period average".into()));
    }
    Ok(full * j / TAU)
}

/// Period average (J/T) int_0^T e^{-i(F(t) - h)} dt on a uniform trapezoid
/// grid. quad_points must grow with omega since the waveform compresses.
pub fn j_eff(profile: &PhaseProfile, omega: f64, j: f64, quad_points: usize) -> Result<EffectiveTunneling, Error> {
    if !omega.is_finite() || omega < 1.0 {
        return Err(Error::InvalidInput(format!("omega must be >= 1, got {omega}")));
    }
    if (quad_points as f64) < 256.0 * omega {
        return Err(Error::InvalidInput(format!(
            "need at least 256 * omega = {} quadrature points, got {quad_points}",
            (256.0 * omega).ceil()
        )));
    }
    if !(j > 0.0) || !j.is_finite() {
        return Err(Error::InvalidInput(format!("J must be positive, got {j}")));
    }
    let v = j_eff_of_phase(
        &|t| rescaled_phase(profile, t, omega),
        profile.plateau(),
        j,
        quad_points,
    )?;
    Ok(EffectiveTunneling { re: v.re, im: v.im, e: profile.spec.e, omega })
}

/// Default node count used by the scanning layers.
pub fn default_quad_points(omega: f64) -> usize {
    (512.0 * omega).ceil() as usize
}

/// First-order quasi-energies +-|J_eff| of the effective Hamiltonian
/// J_eff sigma_x.
pub fn effective_quasi_energies(jt: &EffectiveTunneling) -> (f64, f64) {
    let m = jt.magnitude();
    (m, -m)
}
