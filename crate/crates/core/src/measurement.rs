//! Shot-noise and readout-error model.
//!
//! Exact probabilities become simulated experimental estimates: a symmetric
//! readout flip with probability 1 - readout_fidelity compresses p toward
//! 1/2, then a seeded binomial draw adds shot noise. Everything is
//! deterministic given the seed so scans can run in parallel and reruns are
//! byte-identical.

use crate::Error;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

/// RNG algorithm recorded in output metadata.
pub const RNG_NAME: &str = "ChaCha8";

/// Shot-sampling parameters.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ShotModel {
    /// Measurement repetitions N per data point.
    pub repetitions: u64,
    /// Probability the readout reports the true outcome (aggregate SPAM).
    pub readout_fidelity: f64,
    pub seed: u64,
}

impl Default for ShotModel {
    fn default() -> Self {
        ShotModel { repetitions: 40_000, readout_fidelity: 0.995, seed: 0 }
    }
}

impl ShotModel {
    pub fn validate(&self) -> Result<(), Error> {
        if self.repetitions < 1 {
            return Err(Error::InvalidInput("repetitions must be >= 1".into()));
        }
        if !(self.readout_fidelity > 0.5 && self.readout_fidelity <= 1.0) {
            return Err(Error::InvalidInput(format!(
                "readout_fidelity must be in (0.5, 1], got {}",
                self.readout_fidelity
            )));
        }
        Ok(())
    }

    /// The same model with a different seed (per-point derivation).
    pub fn with_seed(&self, seed: u64) -> ShotModel {
        ShotModel { seed, ..*self }
    }
}

/// Whether a scan records exact probabilities or sampled estimates.
#[derive(Debug, Clone, Copy)]
pub enum MeasureMode {
    Exact,
    Shots(ShotModel),
}

/// splitmix64 step: the standard 64-bit finalizer used to derive
/// independent per-point seeds from (base seed, index).
pub fn derive_seed(base: u64, salt: u64) -> u64 {
    let mut z = base ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// One simulated measurement: returns (p_hat, std_err). Inputs a hair
/// outside [0, 1] from propagator roundoff are snapped to the boundary;
/// anything further out is a caller bug.
pub fn observe(p_true: f64, model: &ShotModel) -> Result<(f64, f64), Error> {
    let p_true = if (-1e-9..0.0).contains(&p_true) {
        0.0
    } else if p_true > 1.0 && p_true <= 1.0 + 1e-9 {
        1.0
    } else {
        p_true
    };
    if !(0.0..=1.0).contains(&p_true) {
        return Err(Error::InvalidInput(format!("probability {p_true} outside [0, 1]")));
    }
    model.validate()?;
    let eta = model.readout_fidelity;
    let p_eff = eta * p_true + (1.0 - eta) * (1.0 - p_true);
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let k = Binomial::new(model.repetitions, p_eff)
        .map_err(|e| Error::Numerical(format!("binomial setup: {e}")))?
        .sample(&mut rng);
    let n = model.repetitions as f64;
    let p_hat = k as f64 / n;
    let std_err = (p_hat * (1.0 - p_hat) / n).sqrt();
    Ok((p_hat, std_err))
}

/// Minimal resolvable probability difference: two standard errors at the
/// worst case p = 1/2.
pub fn distinguishability(repetitions: u64, readout_fidelity: f64) -> Result<f64, Error> {
    ShotModel { repetitions, readout_fidelity, seed: 0 }.validate()?;
    Ok(2.0 * (0.25 / repetitions as f64).sqrt())
}
