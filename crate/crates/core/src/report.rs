//! Pass/fail report with a grep-able text form and a JSON mirror.

use std::fmt;

use serde::Serialize;

use crate::expr::Equiv;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    /// Numeric-only equivalence evidence; never upgraded to PASS.
    #[serde(rename = "LIKELY_PASS")]
    LikelyPass,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::LikelyPass => "LIKELY_PASS",
        })
    }
}

impl From<&Equiv> for Status {
    fn from(e: &Equiv) -> Status {
        match e {
            Equiv::Equal => Status::Pass,
            Equiv::LikelyEqual => Status::LikelyPass,
            Equiv::Unequal { .. } => Status::Fail,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckEntry {
    pub id: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Report {
    pub checks: Vec<CheckEntry>,
}

impl Report {
    pub fn new() -> Report {
        Report::default()
    }

    pub fn push(&mut self, id: impl Into<String>, status: Status, detail: impl Into<String>) {
        self.checks.push(CheckEntry {
            id: id.into(),
            status,
            detail: detail.into(),
        });
    }

    /// PASS iff no check FAILed; LIKELY_PASS entries keep overall at PASS
    /// but are reported as such individually.
    pub fn overall(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else {
            Status::Pass
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("CHECK {} {} {}\n", c.id, c.status, c.detail));
        }
        out.push_str(&format!("OVERALL {}\n", self.overall()));
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Payload<'a> {
            overall: Status,
            checks: &'a [CheckEntry],
        }
        serde_json::to_string_pretty(&Payload {
            overall: self.overall(),
            checks: &self.checks,
        })
        .expect("report serialization")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overall_logic() {
        let mut r = Report::new();
        r.push("a", Status::Pass, "ok");
        r.push("b", Status::LikelyPass, "numeric only");
        assert_eq!(r.overall(), Status::Pass);
        r.push("c", Status::Fail, "broken");
        assert_eq!(r.overall(), Status::Fail);
    }

    #[test]
    fn text_and_json_agree() {
        let mut r = Report::new();
        r.push("x", Status::Pass, "fine");
        let text = r.to_text();
        assert!(text.contains("CHECK x PASS fine"));
        assert!(text.ends_with("OVERALL PASS\n"));
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["overall"], "PASS");
        assert_eq!(v["checks"][0]["id"], "x");
        assert_eq!(v["checks"][0]["status"], "PASS");
    }
}
