//! Check outcome records and their machine-readable serialization.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Witness {
    /// Index tuple or component description where the mismatch occurred.
    pub location: String,
    pub lhs: String,
    pub rhs: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lhs_canonical: Option<serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rhs_canonical: Option<serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail { witness: Witness },
    Skipped { reason: String },
}

impl CheckStatus {
    pub fn is_pass(&self) -> bool {
        matches!(self, CheckStatus::Pass)
    }
    pub fn is_fail(&self) -> bool {
        matches!(self, CheckStatus::Fail { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CheckReport {
    pub id: String,
    pub params: BTreeMap<String, String>,
    pub status: CheckStatus,
    pub elapsed_ms: u64,
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match &self.status {
            CheckStatus::Pass => "pass".to_string(),
            CheckStatus::Fail { witness } => format!("FAIL at {}", witness.location),
            CheckStatus::Skipped { reason } => format!("skipped ({reason})"),
        };
        let params = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(",");
        write!(f, "{:<58} [{params}] {status} ({} ms)", self.id, self.elapsed_ms)
    }
}

/// Outcome of a single verification before it is wrapped in a report.
pub type CheckResult = Result<(), CheckStatus>;

pub fn fail(location: impl Into<String>, lhs: impl fmt::Display, rhs: impl fmt::Display) -> CheckStatus {
    CheckStatus::Fail {
        witness: Witness {
            location: location.into(),
            lhs: lhs.to_string(),
            rhs: rhs.to_string(),
            lhs_canonical: None,
            rhs_canonical: None,
        },
    }
}

pub fn skip(reason: impl Into<String>) -> CheckStatus {
    CheckStatus::Skipped {
        reason: reason.into(),
    }
}

/// Write one JSON object per line.
pub fn write_jsonl<W: Write>(mut w: W, reports: &[CheckReport]) -> std::io::Result<()> {
    for r in reports {
        let line = serde_json::to_string(r).expect("report serialization");
        writeln!(w, "{line}")?;
    }
    Ok(())
}

pub fn read_jsonl(data: &str) -> Result<Vec<CheckReport>, serde_json::Error> {
    data.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub lines: Vec<String>,
}

pub fn summarize(reports: &[CheckReport]) -> Summary {
    let mut s = Summary {
        total: reports.len(),
        passed: 0,
        failed: 0,
        skipped: 0,
        lines: Vec::new(),
    };
    for r in reports {
        match r.status {
            CheckStatus::Pass => s.passed += 1,
            CheckStatus::Fail { .. } => s.failed += 1,
            CheckStatus::Skipped { .. } => s.skipped += 1,
        }
        s.lines.push(r.to_string());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jsonl_roundtrip_reproduces_summary() {
        let reports = vec![
            CheckReport {
                id: "demo.pass".into(),
                params: [("n".to_string(), "2".to_string())].into_iter().collect(),
                status: CheckStatus::Pass,
                elapsed_ms: 3,
            },
            CheckReport {
                id: "demo.fail".into(),
                params: BTreeMap::new(),
                status: fail("(0,1)", "1", "0"),
                elapsed_ms: 1,
            },
            CheckReport {
                id: "demo.skip".into(),
                params: BTreeMap::new(),
                status: skip("NonGenericWeight"),
                elapsed_ms: 0,
            },
        ];
        let mut buf = Vec::new();
        write_jsonl(&mut buf, &reports).unwrap();
        let parsed = read_jsonl(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(parsed, reports);
        assert_eq!(summarize(&parsed), summarize(&reports));
    }
}
