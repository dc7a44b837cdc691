//! The four-segment drive construction.
//!
//! One base period [0, 2pi] is built from four copies of the arccos phase
//! G(t) = arccos(kernel(t)/kernel(0) * cos(E t/2)) on [0, pi/2], reflected so
//! that the field f = dF/dt is antisymmetric under t -> t + pi (zero average)
//! and the phase returns to zero at the period boundary. Propagation consumes
//! the bounded phase F, never the field; the field samples exist for
//! inspection and plotting only.

use crate::specfun::{kernel_raw, kernel_raw_prime, KernelConfig};
use crate::{Error, Target};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// How close |g| may come to 1 from roundoff before clamping is refused.
const CLAMP_TOL: f64 = 1e-12;

/// Distance from a degenerate segment join inside which field samples are
/// clipped and flagged. The closed form is 0/0 exactly at the join (the
/// limit is finite because the kernels are even) and loses precision below
/// this distance.
const SINGULAR_CLIP: f64 = 1e-6;

/// Parameters fixing one drive waveform.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct DrivingSpec {
    pub target: Target,
    /// Spectral parameter scanned for zeros.
    pub e: f64,
    /// Time-compression factor (pulses narrower and taller by this factor).
    pub omega_scale: f64,
    pub kernel_cfg: KernelConfig,
}

impl DrivingSpec {
    pub fn new(target: Target, e: f64, omega_scale: f64, kernel_cfg: KernelConfig) -> Result<Self, Error> {
        if !e.is_finite() || e < 0.0 {
            return Err(Error::InvalidInput(format!(
                "drive parameter E must be finite and >= 0 (evenness makes negative E redundant), got {e}"
            )));
        }
        if !omega_scale.is_finite() || omega_scale < 1.0 {
            return Err(Error::InvalidInput(format!("omega_scale must be >= 1, got {omega_scale}")));
        }
        kernel_cfg.validate()?;
        Ok(DrivingSpec { target, e, omega_scale, kernel_cfg })
    }
}

/// An immutable, closed-form-evaluable accumulated phase over one base
/// period. All evaluation is pure; no samples are stored.
#[derive(Debug, Clone, Copy)]
pub struct PhaseProfile {
    pub spec: DrivingSpec,
    /// Base period before time compression (2 pi).
    pub period: f64,
    kernel0: f64,
    /// Plateau value h = G(pi/2); F(pi) = 2h.
    plateau: f64,
}

fn checked_arccos(g: f64) -> Result<f64, Error> {
    if g.abs() > 1.0 + CLAMP_TOL {
        return Err(Error::Numerical(format!(
            "arccos argument {g} exceeds 1 by more than {CLAMP_TOL}; kernel normalization is broken"
        )));
    }
    Ok(g.clamp(-1.0, 1.0).acos())
}

/// arccos(kernel(t)/kernel(0) * cos(E t/2)) on the quarter-period [0, pi/2].
pub fn base_arccos_phase(target: Target, e: f64, t: f64, cfg: &KernelConfig) -> Result<f64, Error> {
    if !(0.0..=FRAC_PI_2 + 1e-15).contains(&t) {
        return Err(Error::InvalidInput(format!("arccos phase defined on [0, pi/2], got t = {t}")));
    }
    cfg.validate()?;
    let k0 = kernel_raw(target, 0.0, cfg);
    checked_arccos(kernel_raw(target, t, cfg) / k0 * (e * t / 2.0).cos())
}

impl PhaseProfile {
    pub fn new(spec: DrivingSpec) -> Result<Self, Error> {
        let kernel0 = kernel_raw(spec.target, 0.0, &spec.kernel_cfg);
        if !(kernel0 > 0.0) {
            return Err(Error::Numerical(format!("kernel(0) = {kernel0} is not positive")));
        }
        let plateau = base_arccos_phase(spec.target, spec.e, FRAC_PI_2, &spec.kernel_cfg)?;
        Ok(PhaseProfile { spec, period: TAU, kernel0, plateau })
    }

    /// Maximum phase F(pi) = 2 G(pi/2).
    pub fn plateau(&self) -> f64 {
        self.plateau
    }

    fn g(&self, u: f64) -> f64 {
        kernel_raw(self.spec.target, u, &self.spec.kernel_cfg) / self.kernel0 * (self.spec.e * u / 2.0).cos()
    }

    fn g_prime(&self, u: f64) -> f64 {
        let (e, cfg) = (self.spec.e, &self.spec.kernel_cfg);
        (kernel_raw_prime(self.spec.target, u, cfg) * (e * u / 2.0).cos()
            - (e / 2.0) * kernel_raw(self.spec.target, u, cfg) * (e * u / 2.0).sin())
            / self.kernel0
    }

    fn arccos_phase(&self, u: f64) -> Result<f64, Error> {
        checked_arccos(self.g(u))
    }

    /// Closed-form field on the quarter period: -g'(u)/sqrt(1 - g(u)^2).
    /// Degenerate (0/0) at u = 0; callers keep u >= SINGULAR_CLIP.
    fn quarter_field(&self, u: f64) -> f64 {
        let g = self.g(u);
        -self.g_prime(u) / (1.0 - g * g).max(0.0).sqrt()
    }

    /// Segment decomposition of a base-period time: (u in [0, pi/2],
    /// phase sign so F = h + sign*G(u), field sign, distance to the
    /// degenerate join of this segment).
    fn segment(&self, tau: f64) -> (f64, f64, f64) {
        if tau <= FRAC_PI_2 {
            (FRAC_PI_2 - tau, -1.0, 1.0)
        } else if tau <= PI {
            (tau - FRAC_PI_2, 1.0, 1.0)
        } else if tau <= 1.5 * PI {
            (1.5 * PI - tau, 1.0, -1.0)
        } else {
            (tau - 1.5 * PI, -1.0, -1.0)
        }
    }
}

/// Accumulated phase at base-period time t in [0, 2 pi]; the caller reduces
/// mod 2 pi first.
pub fn full_period_phase(profile: &PhaseProfile, t: f64) -> Result<f64, Error> {
    if !(0.0..=TAU + 1e-12).contains(&t) {
        return Err(Error::InvalidInput(format!("phase domain is [0, 2 pi], got t = {t}")));
    }
    let (u, phase_sign, _) = profile.segment(t.min(TAU));
    Ok(profile.plateau + phase_sign * profile.arccos_phase(u)?)
}

/// Compressed phase F(omega * t mod 2 pi): the waveform repeats omega times
/// per base period while its range stays fixed.
pub fn rescaled_phase(profile: &PhaseProfile, t: f64, omega: f64) -> Result<f64, Error> {
    if !omega.is_finite() || omega < 1.0 {
        return Err(Error::InvalidInput(format!("omega must be >= 1, got {omega}")));
    }
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite t = {t}")));
    }
    full_period_phase(profile, (omega * t).rem_euclid(TAU))
}

/// One inspection sample of the compressed field omega * f(omega t).
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct FieldSample {
    pub t: f64,
    pub f_value: f64,
    /// True when the sample fell within SINGULAR_CLIP of a degenerate join
    /// and the reported magnitude is the clipped closed form.
    pub singular: bool,
}

/// Samples the field on n uniform points spanning one base period of lab
/// time (omega compressed copies). For plotting only; propagation uses the
/// phase.
pub fn sample_field(profile: &PhaseProfile, omega: f64, n_samples: usize) -> Result<Vec<FieldSample>, Error> {
    if n_samples < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 samples, got {n_samples}")));
    }
    if !omega.is_finite() || omega < 1.0 {
        return Err(Error::InvalidInput(format!("omega must be >= 1, got {omega}")));
    }
    let mut out = Vec::with_capacity(n_samples);
    for i in 0..n_samples {
        let t = TAU * i as f64 / (n_samples - 1) as f64;
        let tau = (omega * t).rem_euclid(TAU);
        let (u, _, field_sign) = profile.segment(tau);
        let singular = u < SINGULAR_CLIP;
        let f_value = omega * field_sign * profile.quarter_field(u.max(SINGULAR_CLIP));
        out.push(FieldSample { t, f_value, singular });
    }
    Ok(out)
}

/// CSV serialization of field samples (header required by the output
/// contract).
pub fn field_csv(samples: &[FieldSample]) -> String {
    let mut s = String::from("t,f_value,singular_flag\n");
    for r in samples {
        s.push_str(&format!("{:.12e},{:.12e},{}\n", r.t, r.f_value, u8::from(r.singular)));
    }
    s
}
