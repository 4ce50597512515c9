//! Report items with text and JSON rendering. Text reports are byte-stable
//! across runs (no timing data); the JSON form carries per-item wall time.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// One report line. Field order is the stable JSON key order.
#[derive(Debug, Clone, Serialize)]
pub struct ReportItem {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sign: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub millis: u128,
    /// print statements render as their bare value in text mode
    #[serde(skip)]
    pub is_print: bool,
}

impl ReportItem {
    pub fn new(name: impl Into<String>, status: Status) -> Self {
        ReportItem {
            name: name.into(),
            status,
            sign: None,
            flag: None,
            witness: None,
            millis: 0,
            is_print: false,
        }
    }

    pub fn from_outcome(outcome: chowcalc::CheckOutcome, millis: u128) -> Self {
        ReportItem {
            name: outcome.name,
            status: if outcome.passed { Status::Pass } else { Status::Fail },
            sign: outcome.sign,
            flag: outcome.flag,
            witness: outcome.witness,
            millis,
            is_print: false,
        }
    }
}

#[derive(Debug, Default)]
pub struct Report {
    pub items: Vec<ReportItem>,
}

impl Report {
    pub fn any_failed(&self) -> bool {
        self.items.iter().any(|i| i.status == Status::Fail || i.status == Status::Error)
    }

    pub fn any_internal(&self) -> bool {
        self.items
            .iter()
            .any(|i| i.status == Status::Error && i.name.starts_with("internal"))
    }

    /// Deterministic human-readable rendering; timing is deliberately omitted.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut pass = 0usize;
        let mut fail = 0usize;
        let mut error = 0usize;
        for item in &self.items {
            if item.is_print {
                out.push_str(item.witness.as_deref().unwrap_or(""));
                out.push('\n');
                continue;
            }
            let tag = match item.status {
                Status::Pass => "pass ",
                Status::Fail => "FAIL ",
                Status::Error => "ERROR",
            };
            out.push_str(&format!("{tag} {}\n", item.name));
            if let Some(sign) = item.sign {
                out.push_str(&format!("      sign: {sign:+}\n"));
            }
            if let Some(flag) = &item.flag {
                out.push_str(&format!("      flag: {flag}\n"));
            }
            if item.status != Status::Pass {
                if let Some(w) = &item.witness {
                    out.push_str(&format!("      witness: {w}\n"));
                }
            }
            match item.status {
                Status::Pass => pass += 1,
                Status::Fail => fail += 1,
                Status::Error => error += 1,
            }
        }
        out.push_str(&format!("{pass} passed, {fail} failed, {error} errors\n"));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.items).expect("report serializes")
    }
}
