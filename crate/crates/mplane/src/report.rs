//! JSON report schema (versioned; golden-file tested).
//!
//! Numbers serialize through serde_json's shortest round-trip form, so a
//! fixed (seed, workers) pair yields byte-identical reports. Wall times are
//! written as 0 unless timings were requested, keeping default reports
//! stable across runs.

use mplane_core::report::{ParamValue, Report};
use serde::Serialize;
use std::collections::BTreeMap;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize)]
pub struct CheckJson {
    pub id: String,
    pub params: BTreeMap<String, serde_json::Value>,
    pub lhs: f64,
    pub stderr: f64,
    pub rhs: f64,
    pub pass: bool,
    pub n_samples: u64,
    pub seed: u64,
    pub wall_ms: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route: Option<String>,
}

impl CheckJson {
    pub fn from_report(r: &Report, wall_ms: u64, timings: bool) -> Self {
        let mut params = BTreeMap::new();
        for (k, v) in &r.params {
            let jv = match v {
                ParamValue::Real(x) => serde_json::json!(x),
                ParamValue::Int(i) => serde_json::json!(i),
                ParamValue::Text(s) => serde_json::json!(s),
            };
            params.insert(k.clone(), jv);
        }
        CheckJson {
            id: r.id.clone(),
            params,
            lhs: r.lhs,
            stderr: r.stderr,
            rhs: r.rhs,
            pass: r.pass,
            n_samples: r.n_samples,
            seed: r.seed,
            wall_ms: if timings { wall_ms } else { 0 },
            route: r.route.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReportJson {
    pub suite: String,
    pub version: String,
    pub schema: u32,
    pub seed: u64,
    pub workers: u32,
    pub pass_count: usize,
    pub fail_count: usize,
    pub wall_ms: u64,
    pub checks: Vec<CheckJson>,
}

impl SuiteReportJson {
    pub fn all_passed(&self) -> bool {
        self.fail_count == 0
    }
}

/// Render one check as a stdout line.
pub fn human_line(c: &CheckJson, wall_ms: u64) -> String {
    format!(
        "  [{}] {:<34} lhs={:<14.8e} rhs={:<14.8e} σ={:.2e} ({} ms)",
        if c.pass { "PASS" } else { "FAIL" },
        c.id,
        c.lhs,
        c.rhs,
        c.stderr,
        wall_ms
    )
}
