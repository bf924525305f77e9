use std::collections::BTreeMap;

use serde::Serialize;

use crate::config::ConfigEcho;

/// A residual with a short display form and the full value.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct Residual {
    pub display: Sci3,
    pub value: f64,
}

/// `f64` serialized with three significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sci3(pub f64);

impl Serialize for Sci3 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{:.2e}", self.0))
    }
}

impl Residual {
    pub fn new(value: f64) -> Self {
        Self {
            display: Sci3(value),
            value,
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    /// FNV-1a digest of the trial's input parameters.
    pub digest: String,
    pub residuals: BTreeMap<String, Residual>,
    /// Measured quantities that are not residuals, as `[re, im]`.
    pub values: BTreeMap<String, [f64; 2]>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl TrialRecord {
    pub fn worst(&self) -> f64 {
        self.residuals.values().map(|r| r.value).fold(0.0, |a, b| {
            if b.is_nan() {
                f64::NAN
            } else {
                a.max(b)
            }
        })
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Summary {
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    /// Largest value of each residual over all trials.
    pub max_residuals: BTreeMap<String, Residual>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub rng: String,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
    pub config: ConfigEcho,
    pub wiring: Vec<String>,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
    pub pass: bool,
}

impl Report {
    pub fn new(config: ConfigEcho, mut trials: Vec<TrialRecord>, wiring: Vec<String>) -> Self {
        trials.sort_by_key(|t| t.trial);
        let passed = trials.iter().filter(|t| t.pass).count();
        let mut max_residuals: BTreeMap<String, Residual> = BTreeMap::new();
        for t in &trials {
            for (k, r) in &t.residuals {
                let e = max_residuals.entry(k.clone()).or_insert(*r);
                if r.value > e.value || r.value.is_nan() {
                    *e = *r;
                }
            }
        }
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Self {
            tool: "pentagon".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            rng: crate::RNG_NAME.into(),
            timestamp,
            config,
            wiring,
            summary: Summary {
                trials: trials.len(),
                passed,
                failed: trials.len() - passed,
                max_residuals,
            },
            pass: passed == trials.len(),
            trials,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One-line human summary.
    pub fn headline(&self) -> String {
        let worst = self
            .summary
            .max_residuals
            .iter()
            .map(|(k, r)| format!("{k}={:.2e}", r.value))
            .collect::<Vec<_>>()
            .join(" ");
        format!(
            "{}: {}/{} trials pass (tol {:.1e}) {worst}",
            self.config.mode, self.summary.passed, self.summary.trials, self.config.tolerance
        )
    }
}

/// 64-bit FNV-1a over a stream of floats.
pub fn digest(values: impl IntoIterator<Item = f64>) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in values {
        for b in v.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Mode, TrialConfig};

    fn record(trial: usize, r: f64, pass: bool) -> TrialRecord {
        TrialRecord {
            trial,
            digest: digest([r]),
            residuals: [("pentagon".to_string(), Residual::new(r))].into(),
            values: BTreeMap::new(),
            pass,
            error: None,
        }
    }

    #[test]
    fn summary_counts_and_maxima() {
        let cfg = TrialConfig::new(Mode::DirectSum);
        let r = Report::new(
            (&cfg).into(),
            vec![record(1, 3e-12, true), record(0, 2e-3, false)],
            vec![],
        );
        assert_eq!(r.trials[0].trial, 0);
        assert_eq!((r.summary.passed, r.summary.failed), (1, 1));
        assert!(!r.pass);
        assert_eq!(r.summary.max_residuals["pentagon"].value, 2e-3);
        let json = r.to_json();
        assert!(json.contains("\"display\": \"2.00e-3\""), "{json}");
        assert!(json.contains("\"rng\": \"ChaCha20Rng\""));
    }

    #[test]
    fn digest_is_stable() {
        assert_eq!(digest([]), "cbf29ce484222325");
        assert_ne!(digest([1.0]), digest([-1.0]));
    }
}
