//! Kernel functions and the quadrature oracle.
//!
//! `phi` is the rapidly decaying series kernel whose cosine transform is the
//! Riemann Xi function (up to normalization); `polya_kernel` is the
//! cosh-kernel whose transform is Polya's Xi* approximation. Both transforms
//! are evaluated by adaptive quadrature and serve as the independent ground
//! truth the drive construction is tested against.

use crate::quad::adaptive_simpson;
use crate::roots::bisect;
use crate::{Error, Target};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Exponent coefficient of the Polya kernel, a = 9/4.
pub const POLYA_A: f64 = 2.25;

/// Configuration for kernel series truncation and quadrature.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct KernelConfig {
    /// Truncation of the phi series (default 100 terms).
    pub series_terms: usize,
    pub quad_abs_tol: f64,
    pub quad_rel_tol: f64,
    /// Integration cutoff in dimensionless time (default pi/2, the drive
    /// construction's truncation; 10 recovers the full-line transform to
    /// machine precision).
    pub upper_cutoff: f64,
}

impl Default for KernelConfig {
    fn default() -> Self {
        KernelConfig {
            series_terms: 100,
            quad_abs_tol: 1e-12,
            quad_rel_tol: 1e-10,
            upper_cutoff: FRAC_PI_2,
        }
    }
}

impl KernelConfig {
    /// Full-transform configuration (cutoff 10) used when the oracle's
    /// absolute zero locations matter, not just the kernel shape.
    pub fn full_range() -> Self {
        KernelConfig {
            upper_cutoff: 10.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.series_terms < 1 {
            return Err(Error::InvalidInput("series_terms must be >= 1".into()));
        }
        if !(self.upper_cutoff > 0.0) || !self.upper_cutoff.is_finite() {
            return Err(Error::InvalidInput("upper_cutoff must be positive".into()));
        }
        if self.quad_abs_tol < 0.0 || self.quad_rel_tol < 0.0 {
            return Err(Error::InvalidInput("quadrature tolerances must be >= 0".into()));
        }
        Ok(())
    }
}

/// A quadrature result with an error bound combining the quadrature
/// tolerance, the series tail, and the integration-cutoff tail.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct OracleValue {
    pub value: f64,
    pub est_error: f64,
}

fn phi_series(t: f64, terms: usize) -> f64 {
    let x = t.exp();
    let mut s = 0.0;
    for n in 1..=terms {
        let n2 = (n * n) as f64;
        let w = (-PI * n2 * x).exp();
        if w == 0.0 {
            break; // summands decrease monotonically in n; the rest underflow
        }
        s += (TAU * x * n2 - 3.0) * n2 * w;
    }
    TAU * (1.25 * t).exp() * s
}

fn phi_prime_series(t: f64, terms: usize) -> f64 {
    let x = t.exp();
    let mut s = 0.0;
    for n in 1..=terms {
        let n2 = (n * n) as f64;
        let w = (-PI * n2 * x).exp();
        if w == 0.0 {
            break;
        }
        let base = TAU * x * n2 - 3.0;
        s += n2 * w * (1.25 * base + TAU * x * n2 - PI * n2 * x * base);
    }
    TAU * (1.25 * t).exp() * s
}

/// Bound on the dropped phi terms (n > terms); zero in double precision at
/// the default truncation.
fn phi_tail_bound(terms: usize) -> f64 {
    let n2 = ((terms + 1) * (terms + 1)) as f64;
    let first = TAU * (TAU * n2 - 3.0) * n2 * (-PI * n2).exp();
    first / (1.0 - (-3.0 * PI).exp())
}

/// The Riemann series kernel, truncated at cfg.series_terms.
pub fn phi(t: f64, cfg: &KernelConfig) -> Result<f64, Error> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("phi: non-finite t = {t}")));
    }
    cfg.validate()?;
    Ok(phi_series(t, cfg.series_terms))
}

/// Term-by-term analytic derivative of the truncated phi series.
pub fn phi_prime(t: f64, cfg: &KernelConfig) -> f64 {
    phi_prime_series(t, cfg.series_terms)
}

/// cosh(at) e^{-2 pi cosh t}, without the alpha normalization.
pub fn polya_kernel(t: f64) -> f64 {
    (POLYA_A * t).cosh() * (-TAU * t.cosh()).exp()
}

/// Analytic derivative of the Polya kernel.
pub(crate) fn polya_kernel_prime(t: f64) -> f64 {
    polya_kernel(t) * (POLYA_A * (POLYA_A * t).tanh() - TAU * t.sinh())
}

/// Unvalidated kernel dispatch for hot loops (callers validate cfg once).
pub(crate) fn kernel_raw(target: Target, t: f64, cfg: &KernelConfig) -> f64 {
    match target {
        Target::Riemann => phi_series(t, cfg.series_terms),
        Target::Polya => polya_kernel(t),
    }
}

pub(crate) fn kernel_raw_prime(target: Target, t: f64, cfg: &KernelConfig) -> f64 {
    match target {
        Target::Riemann => phi_prime_series(t, cfg.series_terms),
        Target::Polya => polya_kernel_prime(t),
    }
}

fn cutoff_tail(kernel: &dyn Fn(f64) -> f64, cutoff: f64) -> f64 {
    // |cos| <= 1, so the integral of the kernel itself past the cutoff
    // bounds the discarded contribution. Both kernels are below double
    // underflow past t = 12.
    adaptive_simpson(&|t| kernel(t), cutoff, cutoff + 6.0, 1e-15, 40)
        .map(|(v, _)| v.abs())
        .unwrap_or(f64::NAN)
}

fn transform(
    kernel: &dyn Fn(f64) -> f64,
    e: f64,
    cfg: &KernelConfig,
    scale: f64,
    extra_tail: f64,
) -> Result<OracleValue, Error> {
    cfg.validate()?;
    if !e.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite E = {e}")));
    }
    if e.abs() > 100.0 {
        eprintln!("warning: |E| = {} exceeds the validated range (<= 100); quadrature oscillation grows", e.abs());
    }
    let f = |t: f64| kernel(t) * (e * t / 2.0).cos();
    let (v, quad_est) = adaptive_simpson(&f, 0.0, cfg.upper_cutoff, cfg.quad_abs_tol, 48)?;
    Ok(OracleValue {
        value: scale * v,
        est_error: scale * (quad_est + cutoff_tail(kernel, cfg.upper_cutoff) + extra_tail),
    })
}

/// Cosine transform of phi over [0, upper_cutoff]: the Riemann oracle.
pub fn riemann_xi(e: f64, cfg: &KernelConfig) -> Result<OracleValue, Error> {
    let terms = cfg.series_terms;
    transform(&|t| phi_series(t, terms), e, cfg, 1.0, phi_tail_bound(terms) * cfg.upper_cutoff)
}

/// Cosine transform of the normalized Polya kernel (alpha = e^{2 pi}, so the
/// kernel is 1 at t = 0): the Polya oracle.
pub fn polya_xi_star(e: f64, cfg: &KernelConfig) -> Result<OracleValue, Error> {
    transform(&polya_kernel, e, cfg, TAU.exp(), 0.0)
}

/// Oracle dispatch on the target function.
pub fn oracle_xi(target: Target, e: f64, cfg: &KernelConfig) -> Result<OracleValue, Error> {
    match target {
        Target::Riemann => riemann_xi(e, cfg),
        Target::Polya => polya_xi_star(e, cfg),
    }
}

/// Bisection root of the oracle on [lo, hi].
pub fn oracle_zero(target: Target, lo: f64, hi: f64, cfg: &KernelConfig) -> Result<f64, Error> {
    let f = |e: f64| oracle_xi(target, e, cfg).map(|o| o.value).unwrap_or(f64::NAN);
    bisect(&f, lo, hi, 1e-9)
}

/// Modified Bessel K of complex order beta at argument x, via the integral
/// representation K_beta(x) = int_0^inf cosh(beta t) e^{-x cosh t} dt,
/// truncated at t = 10 (the weight underflows long before that).
fn bessel_k_complex_order(beta_re: f64, beta_im: f64, x: f64) -> Result<(f64, f64), Error> {
    let weight = move |t: f64| (-x * t.cosh()).exp();
    let re = adaptive_simpson(
        &|t| {
            let w = weight(t);
            if w == 0.0 { 0.0 } else { w * (beta_re * t).cosh() * (beta_im * t).cos() }
        },
        0.0,
        10.0,
        1e-14,
        48,
    )?;
    let im = adaptive_simpson(
        &|t| {
            let w = weight(t);
            if w == 0.0 { 0.0 } else { w * (beta_re * t).sinh() * (beta_im * t).sin() }
        },
        0.0,
        10.0,
        1e-14,
        48,
    )?;
    Ok((re.0, im.0))
}

/// 4 pi^2 [K_{a+iE/2}(2 pi) + K_{a-iE/2}(2 pi)]: the independent cross-check
/// for the Polya oracle, compared only up to overall scale (zero locations).
pub fn bessel_k_crosscheck(e: f64) -> Result<f64, Error> {
    if !e.is_finite() {
        return Err(Error::InvalidInput(format!("non-finite E = {e}")));
    }
    let (re_p, im_p) = bessel_k_complex_order(POLYA_A, e / 2.0, TAU)?;
    let (re_m, im_m) = bessel_k_complex_order(POLYA_A, -e / 2.0, TAU)?;
    // conjugate pair: imaginary parts cancel
    debug_assert!((im_p + im_m).abs() <= 1e-10 * (re_p.abs() + 1.0));
    Ok(4.0 * PI * PI * (re_p + re_m))
}
