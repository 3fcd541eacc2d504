//! Suite reports, witnesses and the exit-code convention.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cases::{CaseParams, CaseSpec};
use crate::error::{HarnessError, Result};
use crate::suites::SuiteConfig;

pub const REPORT_FORMAT: u32 = 1;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skip,
    Inconclusive,
}

/// Everything needed to recompute one case from scratch.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Witness {
    pub format: u32,
    pub suite: String,
    pub params: CaseParams,
    pub case: CaseSpec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseReport {
    pub index: usize,
    pub ring: String,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub detail: Value,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub inconclusive: usize,
    /// Passes whose hypothesis never triggered, e.g. no vanishing Ext was observed.
    pub vacuous_pass: usize,
}

/// Wall-clock data, kept apart so the rest of the report is reproducible byte for byte.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: u64,
    pub case_ms: Vec<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub format: u32,
    pub suite: String,
    pub tool_version: String,
    pub seed: u64,
    pub config: SuiteConfig,
    pub verdict: Verdict,
    pub summary: Summary,
    pub cases: Vec<CaseReport>,
    pub timing: Timing,
}

impl Summary {
    pub fn of(cases: &[CaseReport]) -> Self {
        let mut s = Summary::default();
        for c in cases {
            match c.verdict {
                Verdict::Pass => {
                    s.pass += 1;
                    if c.detail.get("vacuous") == Some(&Value::Bool(true)) {
                        s.vacuous_pass += 1;
                    }
                }
                Verdict::Fail => s.fail += 1,
                Verdict::Skip => s.skip += 1,
                Verdict::Inconclusive => s.inconclusive += 1,
            }
        }
        s
    }

    /// FAIL if anything failed, INCONCLUSIVE if nothing passed but something was inconclusive,
    /// SKIP if everything was skipped, PASS otherwise.
    pub fn verdict(&self) -> Verdict {
        if self.fail > 0 {
            Verdict::Fail
        } else if self.pass > 0 {
            Verdict::Pass
        } else if self.inconclusive > 0 {
            Verdict::Inconclusive
        } else {
            Verdict::Skip
        }
    }
}

pub fn exit_code(verdict: Verdict) -> i32 {
    match verdict {
        Verdict::Pass | Verdict::Skip => EXIT_PASS,
        Verdict::Fail => EXIT_FAIL,
        Verdict::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        exit_code(self.verdict)
    }

    /// The report without timing, which is what determinism is promised for.
    pub fn reproducible_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().expect("object").remove("timing");
        to_sorted_json(&v)
    }

    pub fn to_json(&self) -> String {
        to_sorted_json(&serde_json::to_value(self).expect("reports serialize"))
    }
}

/// Pretty JSON; `serde_json::Map` is ordered by key, so objects come out sorted.
pub fn to_sorted_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("values serialize")
}

pub fn emit_report(report: &Report, path: &Path) -> Result<()> {
    std::fs::write(path, report.to_json() + "\n")
        .map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(verdict: Verdict) -> CaseReport {
        CaseReport { index: 0, ring: "R".into(), verdict, reason: None, detail: Value::Null, witness: None }
    }

    #[test]
    fn verdicts_and_exit_codes() {
        let s = Summary::of(&[case(Verdict::Pass), case(Verdict::Inconclusive), case(Verdict::Skip)]);
        assert_eq!((s.verdict(), exit_code(s.verdict())), (Verdict::Pass, 0));
        let s = Summary::of(&[case(Verdict::Pass), case(Verdict::Fail)]);
        assert_eq!(exit_code(s.verdict()), 1);
        let s = Summary::of(&[case(Verdict::Inconclusive), case(Verdict::Skip)]);
        assert_eq!(exit_code(s.verdict()), 3);
        assert_eq!(serde_json::to_string(&Verdict::Inconclusive).unwrap(), "\"INCONCLUSIVE\"");
    }
}
