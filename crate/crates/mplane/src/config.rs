//! Suite configuration: JSON file plus flag overrides (flags win).

use serde::Deserialize;
use std::path::Path;

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub seed: u64,
    pub workers: u32,
    /// Monte Carlo budget per estimator; checks scale this internally.
    pub samples: u64,
    /// Override for deterministic-quadrature relative tolerance.
    pub rel_tol: Option<f64>,
    /// Absolute floor of the pass rule.
    pub abs_tol: f64,
    /// Embed measured wall times in the JSON report (off keeps reports
    /// byte-identical across runs).
    pub timings: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            workers: 1,
            samples: 200_000,
            rel_tol: None,
            abs_tol: 1e-12,
            timings: false,
        }
    }
}

/// The JSON shape of a config file; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub workers: Option<u32>,
    pub samples: Option<u64>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub timings: Option<bool>,
    #[serde(default)]
    pub suites: Vec<String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    pub fn apply(&self, cfg: &mut SuiteConfig) {
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.workers = w.max(1);
        }
        if let Some(n) = self.samples {
            cfg.samples = n.max(2);
        }
        if let Some(r) = self.rel_tol {
            cfg.rel_tol = Some(r);
        }
        if let Some(a) = self.abs_tol {
            cfg.abs_tol = a;
        }
        if let Some(t) = self.timings {
            cfg.timings = t;
        }
    }
}
