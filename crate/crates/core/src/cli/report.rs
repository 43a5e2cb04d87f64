//! Machine-readable verification reports.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Passes when `|measured − expected| ≤ tolerance`.
    pub fn near(name: impl Into<String>, measured: f64, expected: f64, tolerance: f64) -> Self {
        let pass = (measured - expected).abs() <= tolerance;
        Self { name: name.into(), measured, expected, tolerance, pass, note: None }
    }

    /// An error-type measurement: passes when `measured ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        let pass = measured <= tolerance;
        Self { name: name.into(), measured, expected: 0.0, tolerance, pass, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub timestamp: String,
}

impl Environment {
    pub fn now() -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    pub environment: Environment,
}

impl Report {
    pub fn new(suite: impl Into<String>, checks: Vec<CheckRecord>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { suite: suite.into(), checks, pass, environment: Environment::now() }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_pass_requires_every_record() {
        let ok = CheckRecord::at_most("a", 1e-9, 1e-8);
        let bad = CheckRecord::near("b", 1.1, 1.0, 0.05);
        assert!(Report::new("s", vec![ok.clone()]).pass);
        assert!(!Report::new("s", vec![ok, bad]).pass);
        assert!(Report::new("s", vec![]).pass);
    }

    #[test]
    fn json_round_trip() {
        let r = Report::new("sinc", vec![CheckRecord::at_most("x", 0.5, 1.0).with_note("n")]);
        let text = serde_json::to_string(&r).unwrap();
        let back: Report = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let plain = serde_json::to_string(&CheckRecord::at_most("y", 0.0, 1.0)).unwrap();
        assert!(!plain.contains("note"));
    }
}
