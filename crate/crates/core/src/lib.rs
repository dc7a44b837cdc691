//! Simulation library that locates zeros of the Riemann Xi function and of
//! Polya's Xi* approximation by driving a two-level quantum system with a
//! specially constructed periodic field and detecting coherent destruction
//! of tunneling (CDT).
//!
//! The pipeline: `specfun` evaluates the target functions by quadrature
//! (the independent oracle), `driving` builds the accumulated phase profile
//! whose field realizes the construction, `floquet` propagates the qubit
//! over whole periods, `effective` computes the first-order effective
//! tunneling, `cdt` scans the drive parameter for the quasi-energy crossing,
//! `measurement` adds shot noise and readout error, and `cli` orchestrates
//! the experiment commands.

pub mod cdt;
pub mod cli;
pub mod driving;
pub mod effective;
pub mod error;
pub mod floquet;
pub mod measurement;
pub mod quad;
pub mod roots;
pub mod specfun;

pub use error::Error;

/// Which target function the drive is constructed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Riemann,
    Polya,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Riemann => "riemann",
            Target::Polya => "polya",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "riemann" => Ok(Target::Riemann),
            "polya" => Ok(Target::Polya),
            other => Err(Error::InvalidInput(format!(
                "unknown target '{other}' (expected riemann or polya)"
            ))),
        }
    }
}
