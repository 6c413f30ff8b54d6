use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use quantumness_core::BoundsReport;

use crate::spec::CommandSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    InputError,
    NotConverged,
    InvariantBreach,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::InputError => 1,
            Status::NotConverged => 2,
            Status::InvariantBreach => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    /// Everything needed to reproduce the run.
    pub spec: CommandSpec,
    /// SHA-256 of the input file, when the command reads one.
    pub input_digest: Option<String>,
    pub results: serde_json::Value,
    pub bounds: Option<BoundsReport>,
    pub converged: bool,
    pub status: Status,
    pub warnings: Vec<String>,
    pub breaches: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// Digest of the report with wall time removed.
    pub fn digest(&self) -> String {
        let mut copy = self.clone();
        copy.wall_time_ms = None;
        sha256_hex(copy.to_json().as_bytes())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Tracks convergence and invariant checks while a command runs.
#[derive(Default)]
pub(crate) struct Checks {
    pub converged: bool,
    pub warnings: Vec<String>,
    pub breaches: Vec<String>,
}

impl Checks {
    pub fn new() -> Self {
        Self {
            converged: true,
            ..Self::default()
        }
    }

    pub fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok {
            self.breaches.push(what());
        }
    }

    pub fn finite(&mut self, name: &str, v: f64) {
        self.require(v.is_finite(), || format!("{name} is not finite ({v})"));
    }

    pub fn status(&self) -> Status {
        if !self.breaches.is_empty() {
            Status::InvariantBreach
        } else if !self.converged {
            Status::NotConverged
        } else {
            Status::Ok
        }
    }
}

/// Decimal rendering with 12 significant digits.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { v.to_string() };
    }
    let magnitude = v.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let text = format!("{v:.decimals$}");
    // Rounding can carry into a new leading digit (9.99.. -> 10.0..).
    let rounded: f64 = text.parse().unwrap_or(v);
    if decimals > 0 && rounded.abs() >= 10f64.powi(magnitude + 1) {
        format!("{v:.prec$}", prec = decimals - 1)
    } else {
        text
    }
}

pub fn csv(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_sig(1.0), "1.00000000000");
        assert_eq!(fmt_sig(0.5), "0.500000000000");
        assert_eq!(fmt_sig(2.0 / 3.0), "0.666666666667");
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.02), "0.0200000000000");
        assert_eq!(fmt_sig(0.99999999999999), "1.00000000000");
        assert_eq!(fmt_sig(100.0), "100.000000000");
        assert_eq!(fmt_sig(-0.25), "-0.250000000000");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(Status::Ok.exit_code(), 0);
        assert_eq!(Status::InputError.exit_code(), 1);
        assert_eq!(Status::NotConverged.exit_code(), 2);
        assert_eq!(Status::InvariantBreach.exit_code(), 3);
    }
}
