//! Floquet engine: one-period propagator, quasi-energies, stroboscopic
//! probabilities.
//!
//! Propagation happens in the frame rotated by exp(-i F(t)/2 sigma_z), where
//! the drive appears only through the bounded phase F:
//! H_rot(t) = -J [cos F(t) sigma_x - sin F(t) sigma_y]. The frame coincides
//! with the lab frame at stroboscopic times t = mT because F(mT) = 0.

use crate::driving::{rescaled_phase, PhaseProfile};
use crate::Error;
use num_complex::Complex64;
use std::f64::consts::TAU;

type C = Complex64;

/// 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [C; 4]);

impl Mat2 {
    pub fn identity() -> Self {
        Mat2([C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(1.0, 0.0)])
    }

    pub fn mul(&self, rhs: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &rhs.0;
        Mat2([
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ])
    }

    pub fn mul_vec(&self, v: (C, C)) -> (C, C) {
        (self.0[0] * v.0 + self.0[1] * v.1, self.0[2] * v.0 + self.0[3] * v.1)
    }

    pub fn dagger(&self) -> Mat2 {
        Mat2([self.0[0].conj(), self.0[2].conj(), self.0[1].conj(), self.0[3].conj()])
    }

    pub fn trace(&self) -> C {
        self.0[0] + self.0[3]
    }

    pub fn det(&self) -> C {
        self.0[0] * self.0[3] - self.0[1] * self.0[2]
    }

    /// Binary exponentiation; m = 0 gives the identity.
    pub fn pow(&self, mut m: usize) -> Mat2 {
        let mut base = *self;
        let mut acc = Mat2::identity();
        while m > 0 {
            if m & 1 == 1 {
                acc = base.mul(&acc);
            }
            base = base.mul(&base);
            m >>= 1;
        }
        acc
    }

    /// max-norm of (self^dagger self - I); 0 for exact unitaries.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.dagger().mul(self);
        let i = Mat2::identity();
        (0..4).map(|k| (p.0[k] - i.0[k]).norm()).fold(0.0, f64::max)
    }
}

/// Two-level amplitudes on |0>, |1>.
#[derive(Debug, Clone, Copy)]
pub struct QubitState {
    pub amp0: C,
    pub amp1: C,
}

impl QubitState {
    pub fn ket0() -> Self {
        QubitState { amp0: C::new(1.0, 0.0), amp1: C::new(0.0, 0.0) }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amp0.norm_sqr() + self.amp1.norm_sqr()
    }

    /// Probability of measuring |0>.
    pub fn p0(&self) -> f64 {
        self.amp0.norm_sqr()
    }

    /// Probability of measuring |+> = (|0> + |1>)/sqrt(2).
    pub fn p_plus(&self) -> f64 {
        ((self.amp0 + self.amp1) / 2f64.sqrt()).norm_sqr()
    }

    /// Probability of measuring |i> = (|0> + i|1>)/sqrt(2).
    pub fn p_i(&self) -> f64 {
        ((self.amp0 - C::i() * self.amp1) / 2f64.sqrt()).norm_sqr()
    }

    pub fn apply(&self, u: &Mat2) -> QubitState {
        let (a, b) = u.mul_vec((self.amp0, self.amp1));
        QubitState { amp0: a, amp1: b }
    }
}

/// One-period propagator with its quasi-energy pair.
#[derive(Debug, Clone, Copy)]
pub struct Monodromy {
    pub u: Mat2,
    /// (eps_plus, eps_minus) in the zone (-omega/2, omega/2], omega = 1.
    pub quasi_pair: (f64, f64),
}

/// Propagation parameters. Time is dimensionless (t = J_lab * t_lab); the
/// lab tunneling frequency only enters CLI report formatting.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct SimConfig {
    /// Tunneling rate in dimensionless units.
    pub j: f64,
    /// Midpoint-stepper resolution per compressed sub-period.
    pub steps_per_subperiod: usize,
    /// Stroboscopic horizon m_max.
    pub periods: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { j: 1.0, steps_per_subperiod: 1024, periods: 20 }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if !(self.j > 0.0) || !self.j.is_finite() {
            return Err(Error::InvalidInput(format!("J must be positive, got {}", self.j)));
        }
        if self.steps_per_subperiod < 64 {
            return Err(Error::InvalidInput(format!(
                "steps_per_subperiod must be >= 64, got {}",
                self.steps_per_subperiod
            )));
        }
        if self.periods < 1 {
            return Err(Error::InvalidInput("periods must be >= 1".into()));
        }
        Ok(())
    }
}

/// Rotated-frame Hamiltonian at time t: -J [cos F sigma_x - sin F sigma_y]
/// = -J [[0, e^{iF}], [e^{-iF}, 0]].
pub fn hamiltonian_rotated(profile: &PhaseProfile, omega: f64, t: f64, cfg: &SimConfig) -> Result<Mat2, Error> {
    cfg.validate()?;
    let f = rescaled_phase(profile, t, omega)?;
    let z = C::from_polar(-cfg.j, f);
    Ok(Mat2([C::new(0.0, 0.0), z, z.conj(), C::new(0.0, 0.0)]))
}

/// Exact step propagator exp(-i H_rot dt) for constant phase F:
/// [[c, i s e^{iF}], [i s e^{-iF}, c]] with c = cos(J dt), s = sin(J dt).
fn step_propagator(f: f64, j_dt: f64) -> Mat2 {
    let (s, c) = j_dt.sin_cos();
    let up = C::i() * C::from_polar(s, f);
    let dn = C::i() * C::from_polar(s, -f);
    Mat2([C::new(c, 0.0), up, dn, C::new(c, 0.0)])
}

fn quasi_from_u(u: &Mat2) -> (f64, f64) {
    // SU(2): eigenvalues e^{-i eps T} come in conjugate pairs; the trace is
    // real up to roundoff and fixes the pair.
    let x = (u.trace().re / 2.0).clamp(-1.0, 1.0);
    let eps_plus = x.acos() / TAU; // in [0, 1/2], omega = 2 pi / T = 1
    let eps_minus = if eps_plus == 0.5 { 0.5 } else { -eps_plus };
    (eps_plus, eps_minus)
}

pub(crate) fn propagate_with_phase(
    phase: &dyn Fn(f64) -> Result<f64, Error>,
    omega: f64,
    cfg: &SimConfig,
) -> Result<Monodromy, Error> {
    cfg.validate()?;
    let integer_omega = (omega - omega.round()).abs() < 1e-9 && omega.round() >= 1.0;
    let u = if integer_omega {
        // identical compressed sub-periods: propagate one, then power up
        let reps = omega.round() as usize;
        let n = cfg.steps_per_subperiod;
        let dt = TAU / omega / n as f64;
        let mut u_sub = Mat2::identity();
        for i in 0..n {
            let t_mid = (i as f64 + 0.5) * dt;
            u_sub = step_propagator(phase(t_mid)?, cfg.j * dt).mul(&u_sub);
        }
        u_sub.pow(reps)
    } else {
        let n = (cfg.steps_per_subperiod as f64 * omega).ceil() as usize;
        let dt = TAU / n as f64;
        let mut u = Mat2::identity();
        for i in 0..n {
            let t_mid = (i as f64 + 0.5) * dt;
            u = step_propagator(phase(t_mid)?, cfg.j * dt).mul(&u);
        }
        u
    };
    Ok(Monodromy { quasi_pair: quasi_from_u(&u), u })
}

/// Composes midpoint exponential steps over one full period T = 2 pi
/// (omega compressed sub-periods) and extracts the quasi-energies.
pub fn propagate_period(profile: &PhaseProfile, omega: f64, cfg: &SimConfig) -> Result<Monodromy, Error> {
    propagate_with_phase(&|t| rescaled_phase(profile, t, omega), omega, cfg)
}

/// Convergence guard: |change of eps_plus| when the step count doubles.
/// Callers may treat > 1e-6 as an under-resolved configuration.
pub fn step_doubling_shift(profile: &PhaseProfile, omega: f64, cfg: &SimConfig) -> Result<f64, Error> {
    let coarse = propagate_period(profile, omega, cfg)?;
    let fine_cfg = SimConfig { steps_per_subperiod: cfg.steps_per_subperiod * 2, ..*cfg };
    let fine = propagate_period(profile, omega, &fine_cfg)?;
    Ok((coarse.quasi_pair.0 - fine.quasi_pair.0).abs())
}

/// One stroboscopic record: probabilities in the z, x, y measurement bases
/// after m full periods.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct StroboPoint {
    pub m: usize,
    pub p0: f64,
    pub p_plus: f64,
    pub p_i: f64,
}

/// Propagates one period, then iterates the monodromy stroboscopically;
/// returns both so scanning layers pay for a single propagation.
pub fn monodromy_and_series(
    profile: &PhaseProfile,
    omega: f64,
    cfg: &SimConfig,
    initial: QubitState,
) -> Result<(Monodromy, Vec<StroboPoint>), Error> {
    if (initial.norm_sq() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "initial state norm^2 = {} is not 1",
            initial.norm_sq()
        )));
    }
    let mono = propagate_period(profile, omega, cfg)?;
    let mut state = initial;
    let mut out = Vec::with_capacity(cfg.periods);
    for m in 1..=cfg.periods {
        state = state.apply(&mono.u);
        let drift = (state.norm_sq() - 1.0).abs();
        if drift > 1e-9 {
            return Err(Error::Numerical(format!("norm drift {drift} at period {m}")));
        }
        out.push(StroboPoint { m, p0: state.p0(), p_plus: state.p_plus(), p_i: state.p_i() });
    }
    Ok((mono, out))
}

/// Exact projective probabilities of u^m applied to the initial state, for
/// m = 1..=periods. The m = 0 row is implicit (the initial state itself).
pub fn stroboscopic_probabilities(
    profile: &PhaseProfile,
    omega: f64,
    cfg: &SimConfig,
    initial: QubitState,
) -> Result<Vec<StroboPoint>, Error> {
    Ok(monodromy_and_series(profile, omega, cfg, initial)?.1)
}

/// Result of the sinusoid diagnostic fit.
#[derive(Debug, Clone, Copy, serde::Serialize)]
pub struct QuasiFit {
    /// Signed rate; the magnitude estimates the quasi-energy, the sign the
    /// rotation sense seen from the x basis.
    pub epsilon: f64,
    /// RMS residual of the fitted model.
    pub residual: f64,
    /// Set when the fit did not converge or the oscillation leaves the
    /// quarter-wave window |2 eps m T| < pi/2 where the model is faithful.
    pub unreliable: bool,
}

/// Least-squares fit of P_plus(m) = 1/2 - sin(2 eps m T)/2 for the scalar
/// rate eps. A diagnostic only: the full simulation is the ground truth and
/// the sinusoid presumes a specific effective rotation axis.
pub fn quasi_energy_fit(series: &[(usize, f64)]) -> Result<QuasiFit, Error> {
    if series.len() < 5 {
        return Err(Error::InvalidInput(format!("fit needs >= 5 points, got {}", series.len())));
    }
    if series.iter().any(|(_, p)| !p.is_finite()) {
        return Err(Error::InvalidInput("non-finite probability in fit series".into()));
    }
    let t = TAU;
    // initial guess from the first point's inverse model
    let (m1, p1) = series[0];
    let mut eps = (1.0 - 2.0 * p1).clamp(-1.0, 1.0).asin() / (2.0 * t * m1 as f64);
    let mut converged = false;
    for _ in 0..100 {
        let mut jtj = 0.0;
        let mut jtr = 0.0;
        for &(m, p) in series {
            let arg = 2.0 * eps * m as f64 * t;
            let r = p - 0.5 + arg.sin() / 2.0;
            let jac = m as f64 * t * arg.cos();
            jtj += jac * jac;
            jtr += jac * r;
        }
        if jtj < 1e-300 {
            converged = true; // flat model (constant series): eps is final
            break;
        }
        let delta = -jtr / jtj;
        eps += delta;
        if delta.abs() <= 1e-15 * eps.abs().max(1e-12) {
            converged = true;
            break;
        }
    }
    let mut ss = 0.0;
    let mut max_arg: f64 = 0.0;
    for &(m, p) in series {
        let arg = 2.0 * eps * m as f64 * t;
        max_arg = max_arg.max(arg.abs());
        let r = p - 0.5 + arg.sin() / 2.0;
        ss += r * r;
    }
    Ok(QuasiFit {
        epsilon: eps,
        residual: (ss / series.len() as f64).sqrt(),
        unreliable: !converged || max_arg >= std::f64::consts::FRAC_PI_2,
    })
}
