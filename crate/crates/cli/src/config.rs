use std::fmt;
use std::path::PathBuf;

use clap::ValueEnum;
use pentagon_core::ZetaFamily64;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {source_name} at {location}: {message}")]
    Parse {
        source_name: String,
        location: String,
        message: String,
    },
}

impl CliError {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

/// Verification pipeline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    DirectSum,
    Orthogonal,
    Isotropic,
    GrassmannPentagon,
    Kashaev,
    Exotic,
    All,
}

impl Mode {
    pub const SINGLE: [Mode; 6] = [
        Mode::DirectSum,
        Mode::Orthogonal,
        Mode::Isotropic,
        Mode::GrassmannPentagon,
        Mode::Kashaev,
        Mode::Exotic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::DirectSum => "direct-sum",
            Mode::Orthogonal => "orthogonal",
            Mode::Isotropic => "isotropic",
            Mode::GrassmannPentagon => "grassmann-pentagon",
            Mode::Kashaev => "kashaev",
            Mode::Exotic => "exotic",
            Mode::All => "all",
        }
    }

    /// Block size the mode requires, if fixed.
    pub fn fixed_n(self) -> Option<usize> {
        match self {
            Mode::Isotropic | Mode::GrassmannPentagon | Mode::Exotic => Some(2),
            Mode::Kashaev => Some(1),
            _ => None,
        }
    }

    pub fn default_n(self) -> usize {
        self.fixed_n().unwrap_or(3)
    }

    /// Whether families read from files must be symmetric.
    pub fn strict_symmetry(self) -> bool {
        !matches!(self, Mode::DirectSum)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the zeta family of each trial comes from.
#[derive(Debug, Clone)]
pub enum ZetaSource {
    Random,
    File(PathBuf),
    Inline(Box<ZetaFamily64>),
}

impl ZetaSource {
    pub fn describe(&self) -> String {
        match self {
            ZetaSource::Random => "random".into(),
            ZetaSource::File(p) => format!("file:{}", p.display()),
            ZetaSource::Inline(_) => "inline".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub mode: Mode,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub zeta_source: ZetaSource,
}

impl TrialConfig {
    /// Random-family config with the mode's default block size.
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            n: mode.default_n(),
            trials: 1,
            seed: 0,
            tolerance: crate::DEFAULT_TOL,
            zeta_source: ZetaSource::Random,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::Config(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.n == 0 {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        if let Some(n) = self.mode.fixed_n() {
            if self.n != n {
                return Err(CliError::Config(format!(
                    "mode {} needs n = {n}, got {}",
                    self.mode, self.n
                )));
            }
        }
        if matches!(self.mode, Mode::Exotic | Mode::All)
            && !matches!(self.zeta_source, ZetaSource::Random)
        {
            return Err(CliError::Config(format!(
                "mode {} draws its own parameters and takes no zeta family",
                self.mode
            )));
        }
        Ok(())
    }
}

/// Config as echoed in reports.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ConfigEcho {
    pub mode: Mode,
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub zeta_source: String,
}

impl From<&TrialConfig> for ConfigEcho {
    fn from(c: &TrialConfig) -> Self {
        Self {
            mode: c.mode,
            n: c.n,
            trials: c.trials,
            seed: c.seed,
            tolerance: c.tolerance,
            zeta_source: c.zeta_source.describe(),
        }
    }
}
