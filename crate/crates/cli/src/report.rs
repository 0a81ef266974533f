use extlab_core::TolerancePolicy;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Passed,
    /// A clause that only holds in infinite dimension, measured and reported.
    ExpectedFail,
    Failed,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Passed
        } else {
            Verdict::Failed
        }
    }

    /// Passed when it holds, expected-fail otherwise.
    pub fn infinite_clause(ok: bool) -> Self {
        if ok {
            Verdict::Passed
        } else {
            Verdict::ExpectedFail
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::Passed => "passed",
            Verdict::ExpectedFail => "expected-fail",
            Verdict::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    pub paper_anchor: String,
    pub verdict: Verdict,
    pub max_residual: Option<f64>,
    pub witness: Value,
}

impl Record {
    pub fn new(name: &str, anchor: &str, verdict: Verdict, max_residual: Option<f64>, witness: Value) -> Self {
        Self { name: name.into(), paper_anchor: anchor.into(), verdict, max_residual, witness }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub seed: u64,
    pub instance: String,
    pub tolerances: TolerancePolicy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub environment: Environment,
    pub records: Vec<Record>,
}

impl ReportDocument {
    /// 1 when any record failed; expected-fail records do not count.
    pub fn exit_code(&self) -> i32 {
        i32::from(self.records.iter().any(|r| r.verdict == Verdict::Failed))
    }

    pub fn count(&self, v: Verdict) -> usize {
        self.records.iter().filter(|r| r.verdict == v).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Text,
}

/// JSON goes through `Value`, whose maps keep keys sorted.
pub fn emit_report(doc: &ReportDocument, format: Format) -> Result<String> {
    match format {
        Format::Json => {
            let v = serde_json::to_value(doc)?;
            Ok(serde_json::to_string_pretty(&v)? + "\n")
        }
        Format::Text => {
            let env = &doc.environment;
            let mut out = format!(
                "extlab {} | instance {} | seed {} | eq_abs_tol {:e}\n",
                env.version, env.instance, env.seed, env.tolerances.eq_abs_tol
            );
            for r in &doc.records {
                let res = r.max_residual.map_or("-".to_string(), |x| format!("{x:.3e}"));
                out += &format!("[{}] {} ({}) residual {} | {}\n", r.verdict.label(), r.name, r.paper_anchor, res, r.witness);
            }
            out += &format!(
                "{} passed, {} expected-fail, {} failed\n",
                doc.count(Verdict::Passed),
                doc.count(Verdict::ExpectedFail),
                doc.count(Verdict::Failed)
            );
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn doc(verdicts: &[Verdict]) -> ReportDocument {
        ReportDocument {
            environment: Environment {
                version: "0".into(),
                seed: 1,
                instance: "E2".into(),
                tolerances: TolerancePolicy::default(),
            },
            records: verdicts
                .iter()
                .enumerate()
                .map(|(i, &v)| Record::new(&format!("r{i}"), "inv11", v, Some(1e-12), json!({"z": 1, "a": [1.5]})))
                .collect(),
        }
    }

    #[test]
    fn json_round_trips_with_sorted_keys() {
        let d = doc(&[Verdict::Passed, Verdict::ExpectedFail]);
        let s = emit_report(&d, Format::Json).unwrap();
        let back: ReportDocument = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let keys = ["\"environment\"", "\"records\""].map(|k| s.find(k).unwrap());
        assert!(keys[0] < keys[1]);
        let w = ["\"a\"", "\"z\""].map(|k| s.find(k).unwrap());
        assert!(w[0] < w[1]);
        assert!(s.contains("\"expected-fail\""));
    }

    #[test]
    fn exit_status_contract() {
        assert_eq!(doc(&[Verdict::Passed, Verdict::ExpectedFail]).exit_code(), 0);
        assert_eq!(doc(&[Verdict::Passed, Verdict::Failed]).exit_code(), 1);
    }

    #[test]
    fn text_lists_every_record() {
        let d = doc(&[Verdict::Passed, Verdict::Failed, Verdict::ExpectedFail]);
        let s = emit_report(&d, Format::Text).unwrap();
        assert!(s.contains("r0") && s.contains("r1") && s.contains("r2"));
        assert!(s.contains("1 passed, 1 expected-fail, 1 failed"));
    }
}
