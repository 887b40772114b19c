use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use super::CliError;
use crate::estimate::EntropyEstimate;

/// Version of every JSON report written by the CLI.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Units {
    Nats,
    Bits,
}

impl Units {
    pub fn name(self) -> &'static str {
        match self {
            Units::Nats => "nat",
            Units::Bits => "bit",
        }
    }

    pub fn value(self, x: f64) -> f64 {
        match self {
            Units::Nats => x,
            Units::Bits => x / std::f64::consts::LN_2,
        }
    }

    pub fn estimate(self, e: &EntropyEstimate) -> EntropyEstimate {
        let mut e = e.clone();
        for r in &mut e.rows {
            r.alpha_lo = self.value(r.alpha_lo);
            r.alpha_hi = self.value(r.alpha_hi);
        }
        e.tail_lo = self.value(e.tail_lo);
        e.tail_hi = self.value(e.tail_hi);
        e
    }
}

/// Fixed-point rendering used in CSV cells and summaries.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.12}")
    }
}

pub(crate) fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

/// `theta,N,alpha_lo,alpha_hi,exact`, one row per `(θ, N)`.
pub fn write_curve_csv(path: &Path, estimates: &[EntropyEstimate]) -> Result<(), CliError> {
    let mut s = String::from("theta,N,alpha_lo,alpha_hi,exact\n");
    for e in estimates {
        for r in &e.rows {
            let _ = writeln!(s, "{},{},{},{},{}", e.theta, r.n, num(r.alpha_lo), num(r.alpha_hi), r.exact && r.error.is_none());
        }
    }
    write_file(path, &s)
}

pub(crate) fn write_json(path: &Path, command: &str, units: Units, payload: Value) -> Result<(), CliError> {
    let mut doc = json!({ "schema_version": SCHEMA_VERSION, "command": command, "units": units.name() });
    if let (Value::Object(d), Value::Object(p)) = (&mut doc, payload) {
        d.extend(p);
    }
    let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Engine(crate::Error::invalid(e.to_string())))?;
    text.push('\n');
    write_file(path, &text)
}
