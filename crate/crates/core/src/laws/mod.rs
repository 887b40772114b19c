//! Executable checks of entropy inequalities on concrete instances.

mod checks;
mod suite;
mod truncation;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::cover::Caps;
use crate::estimate::Method;

pub use checks::*;
pub use suite::{run_suite, SuiteOptions, LAW_IDS};
pub use truncation::{optimal_cover, truncation_transform, CoverShape, Truncation};

/// Version of the serialized report layout.
pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Tolerance for tail-statistic comparisons on exact scenarios.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: String,
    pub instance: String,
    pub verdict: Verdict,
    pub witnesses: Value,
    pub tolerances: Map<String, Value>,
}

impl LawReport {
    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

/// Shared parameters of a check.
#[derive(Debug, Clone, PartialEq)]
pub struct LawContext {
    pub ns: Vec<usize>,
    pub caps: Caps,
    pub method: Method,
    pub tol: f64,
}

impl LawContext {
    pub fn new(ns: Vec<usize>) -> Self {
        Self { ns, caps: Caps::default(), method: Method::Auto, tol: DEFAULT_TOL }
    }

    pub fn with_ns(&self, ns: Vec<usize>) -> Self {
        Self { ns, ..self.clone() }
    }
}

/// Accumulates witnesses and failures for one report.
pub(crate) struct Recorder {
    law: &'static str,
    instance: String,
    witnesses: Map<String, Value>,
    failures: Vec<Value>,
    tolerances: Map<String, Value>,
    skipped: Option<String>,
}

impl Recorder {
    pub(crate) fn new(law: &'static str, instance: impl Into<String>) -> Self {
        Self {
            law,
            instance: instance.into(),
            witnesses: Map::new(),
            failures: Vec::new(),
            tolerances: Map::new(),
            skipped: None,
        }
    }

    pub(crate) fn tol(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.to_string(), Value::from(v));
    }

    pub(crate) fn note(&mut self, key: &str, v: impl Serialize) {
        self.witnesses.insert(key.to_string(), serde_json::to_value(v).unwrap_or(Value::Null));
    }

    /// Records `ok`; on failure keeps the description as a witness.
    pub(crate) fn expect(&mut self, ok: bool, what: impl Serialize) {
        if !ok {
            self.failures.push(serde_json::to_value(what).unwrap_or(Value::Null));
        }
    }

    pub(crate) fn skip(&mut self, reason: impl Into<String>) {
        self.skipped.get_or_insert(reason.into());
    }

    pub(crate) fn finish(mut self) -> LawReport {
        let verdict = if !self.failures.is_empty() {
            Verdict::Fail
        } else if self.skipped.is_some() {
            Verdict::Skipped
        } else {
            Verdict::Pass
        };
        if !self.failures.is_empty() {
            self.witnesses.insert("failures".into(), Value::Array(self.failures));
        }
        if let Some(reason) = self.skipped {
            self.witnesses.insert("skipped".into(), Value::from(reason));
        }
        LawReport {
            law: self.law.to_string(),
            instance: self.instance,
            verdict,
            witnesses: Value::Object(self.witnesses),
            tolerances: self.tolerances,
        }
    }
}
