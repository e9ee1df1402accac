//! Verification reports: named checks with a status and an optional witness.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::exactla::SVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    /// The truncation window leaves nothing to check.
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
    /// Inclusive degree range the check covered.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<(i64, i64)>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }

    /// Record a check; `failure` is the witness if it failed.
    pub fn record(&mut self, check: impl Into<String>, failure: Option<Value>) {
        let status = if failure.is_some() { Status::Fail } else { Status::Pass };
        self.checks.push(CheckResult { check: check.into(), status, witness: failure, window: None });
    }

    /// Record a check over the inclusive degree range `lo..=hi`, skipped if empty.
    pub fn record_window(&mut self, check: impl Into<String>, lo: i64, hi: i64, failure: Option<Value>) {
        let status = match (&failure, lo > hi) {
            (Some(_), _) => Status::Fail,
            (None, true) => Status::Skip,
            (None, false) => Status::Pass,
        };
        let window = (lo <= hi).then_some((lo, hi));
        self.checks.push(CheckResult { check: check.into(), status, witness: failure, window });
    }

    pub fn pass(&mut self, check: impl Into<String>) {
        self.record(check, None);
    }

    pub fn fail(&mut self, check: impl Into<String>, witness: Value) {
        self.record(check, Some(witness));
    }

    /// Append another report's checks, prefixing their names.
    pub fn merge(&mut self, prefix: &str, other: Report) {
        for n in other.notes {
            self.notes.push(n);
        }
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.check = format!("{prefix}.{}", c.check);
            }
            self.checks.push(c);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }

    pub fn get(&self, check: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check == check)
    }

    pub fn passed(&self, check: &str) -> bool {
        self.get(check).is_some_and(|c| c.status == Status::Pass)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for n in &self.notes {
            let _ = writeln!(s, "NOTE {n}");
        }
        for c in &self.checks {
            let status = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            let _ = write!(s, "CHECK {}: {status}", c.check);
            if let Some((lo, hi)) = c.window {
                let _ = write!(s, " [degrees {lo}..{hi}]");
            }
            if let Some(w) = &c.witness {
                let _ = write!(s, " {w}");
            }
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }
}

/// Sparse vector as a list of `[index, "coefficient"]` pairs.
pub fn vec_json(v: &SVec) -> Value {
    Value::Array(v.iter().map(|(i, c)| json!([i, c.to_string()])).collect())
}

/// Witness for an identity `lhs = rhs` failing at a basis element.
pub fn mismatch(what: &str, index: usize, lhs: &SVec, rhs: &SVec) -> Value {
    json!({ what: index, "lhs": vec_json(lhs), "rhs": vec_json(rhs) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::q;

    #[test]
    fn status_and_text() {
        let mut r = Report::new();
        r.pass("a");
        r.record_window("b", 2, 1, None);
        assert!(r.all_pass());
        r.fail("c", mismatch("basis", 3, &SVec::single(0, q(1)), &SVec::new()));
        assert!(!r.all_pass());
        let t = r.to_text();
        assert!(t.contains("CHECK a: PASS"));
        assert!(t.contains("CHECK b: SKIP"));
        assert!(t.contains("CHECK c: FAIL {\"basis\":3"));
    }

    #[test]
    fn json_round_trip() {
        let mut r = Report::new();
        r.record_window("w", 0, 2, None);
        let back: Report = serde_json::from_value(r.to_json()).unwrap();
        assert_eq!(back, r);
    }
}
