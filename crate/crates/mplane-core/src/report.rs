//! Identity-check reports.
//!
//! Every verifier produces a [`Report`]: a numerical left-hand side with its
//! error estimate, a reference right-hand side, and the uniform stochastic
//! pass rule |lhs − rhs| ≤ max(abs_tol, 3·combined stderr). Serialization to
//! JSON lives in the companion crate; this type is plain data.

use alloc::string::String;
use alloc::vec::Vec;

use num_traits::Float;

use crate::quad::MCEstimate;

/// A named parameter attached to a report.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Int(i64),
    Text(String),
}

/// The outcome of one identity check.
#[derive(Debug, Clone)]
pub struct Report {
    pub id: String,
    pub params: Vec<(String, ParamValue)>,
    /// Numerical evaluation (real part; any imaginary residue folds into the
    /// distance used for the pass rule).
    pub lhs: f64,
    /// Combined error estimate of both sides.
    pub stderr: f64,
    /// Reference value (closed form, or the second route).
    pub rhs: f64,
    pub pass: bool,
    pub n_samples: u64,
    pub seed: u64,
    /// Filled by the runner in the companion crate; 0 inside the core.
    pub wall_ms: u64,
    /// Which evaluation route produced `lhs`, when several exist.
    pub route: Option<String>,
}

impl Report {
    /// Compare an estimate against an exact reference value.
    pub fn two_sided(id: &str, lhs: MCEstimate, rhs: f64, abs_tol: f64, seed: u64) -> Self {
        let dist = (lhs.value - crate::Complex64::new(rhs, 0.0)).norm();
        let pass = dist <= abs_tol.max(3.0 * lhs.stderr);
        Report {
            id: String::from(id),
            params: Vec::new(),
            lhs: lhs.re(),
            stderr: lhs.stderr,
            rhs,
            pass,
            n_samples: lhs.n_samples,
            seed,
            wall_ms: 0,
            route: None,
        }
    }

    /// Compare two estimates with the combined-stderr rule.
    pub fn two_estimates(
        id: &str,
        lhs: MCEstimate,
        rhs: MCEstimate,
        abs_tol: f64,
        seed: u64,
    ) -> Self {
        let err = (lhs.stderr.powi(2) + rhs.stderr.powi(2)).sqrt();
        let dist = (lhs.value - rhs.value).norm();
        Report {
            id: String::from(id),
            params: Vec::new(),
            lhs: lhs.re(),
            stderr: err,
            rhs: rhs.re(),
            pass: dist <= abs_tol.max(3.0 * err),
            n_samples: lhs.n_samples + rhs.n_samples,
            seed,
            wall_ms: 0,
            route: None,
        }
    }

    pub fn with_param(mut self, key: &str, value: ParamValue) -> Self {
        self.params.push((String::from(key), value));
        self
    }

    pub fn with_real(self, key: &str, value: f64) -> Self {
        self.with_param(key, ParamValue::Real(value))
    }

    pub fn with_int(self, key: &str, value: i64) -> Self {
        self.with_param(key, ParamValue::Int(value))
    }

    pub fn with_route(mut self, route: &str) -> Self {
        self.route = Some(String::from(route));
        self
    }

    /// Relative disagreement |lhs − rhs| / |rhs|.
    pub fn rel_err(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(1e-300)
    }
}
