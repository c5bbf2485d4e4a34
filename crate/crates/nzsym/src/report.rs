//! Uniform machine-readable check reports.
//!
//! Every verification routine in this crate reduces to a [`CheckReport`]:
//! the check name, the degree it ran at, a pass/fail/skipped status, and a
//! JSON blob of supporting details.  The CLI prints these one per line.

use serde::{Deserialize, Serialize};

/// Outcome of a single check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// The check does not apply to the given input (e.g. a closed-surface
    /// check on a manifold with annular cusps); the details say why.
    Skipped,
}

impl Status {
    pub fn from_bool(ok: bool) -> Status {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn is_pass(self) -> bool {
        self == Status::Pass
    }

    pub fn is_fail(self) -> bool {
        self == Status::Fail
    }
}

/// One verification result, serialized as
/// `{"check": ..., "n": ..., "status": ..., "details": {...}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub n: i64,
    pub status: Status,
    pub details: serde_json::Value,
}

impl CheckReport {
    pub fn new(check: &str, n: i64, status: Status, details: serde_json::Value) -> CheckReport {
        CheckReport {
            check: check.to_string(),
            n,
            status,
            details,
        }
    }

    pub fn to_json(&self, pretty: bool) -> String {
        if pretty {
            serde_json::to_string_pretty(self).expect("report serializes")
        } else {
            serde_json::to_string(self).expect("report serializes")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_round_trip() {
        assert_eq!(serde_json::to_string(&Status::Pass).unwrap(), "\"pass\"");
        assert_eq!(serde_json::to_string(&Status::Fail).unwrap(), "\"fail\"");
        assert_eq!(
            serde_json::to_string(&Status::Skipped).unwrap(),
            "\"skipped\""
        );
        let s: Status = serde_json::from_str("\"skipped\"").unwrap();
        assert_eq!(s, Status::Skipped);
    }

    #[test]
    fn report_shape() {
        let r = CheckReport::new(
            "demo",
            3,
            Status::from_bool(true),
            serde_json::json!({"k": 1}),
        );
        let v: serde_json::Value = serde_json::from_str(&r.to_json(false)).unwrap();
        assert_eq!(v["check"], "demo");
        assert_eq!(v["n"], 3);
        assert_eq!(v["status"], "pass");
        assert_eq!(v["details"]["k"], 1);
        assert!(r.to_json(true).contains('\n'));
    }

    #[test]
    fn from_bool() {
        assert!(Status::from_bool(true).is_pass());
        assert!(Status::from_bool(false).is_fail());
        assert!(!Status::Skipped.is_pass());
        assert!(!Status::Skipped.is_fail());
    }
}
