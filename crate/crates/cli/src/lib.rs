//! Verification harness: seeded trial campaigns over the pentagon
//! constructions, zeta family files and JSON reports.

pub mod config;
pub mod io;
pub mod report;
pub mod run;

pub use config::{CliError, Mode, TrialConfig, ZetaSource};
pub use report::{Report, TrialRecord};
pub use run::run;

/// Environment variable overriding the default tolerance.
pub const TOL_ENV: &str = "PENTAGON_TOL";

/// Tolerance used when neither `--tol` nor the environment sets one.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Name of the per-trial random generator, echoed in reports.
pub const RNG_NAME: &str = "ChaCha20Rng";

/// Default tolerance, honouring [`TOL_ENV`].
pub fn default_tolerance() -> Result<f64, CliError> {
    match std::env::var(TOL_ENV) {
        Ok(s) => s
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("{TOL_ENV}={s:?} is not a number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}
