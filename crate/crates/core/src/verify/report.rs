use serde::Serialize;
use serde_json::{json, Value};

/// Where an asserted cap comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapKind {
    /// Constant stated explicitly for the inequality.
    Explicit,
    /// Constant re-derived step by step for the discrete setting.
    ProofTraced,
    /// No explicit constant; only finiteness is asserted.
    Empirical,
    /// Identity checked to relative error.
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceRecord {
    pub index: usize,
    pub digest: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub ok: bool,
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub cap: f64,
    pub cap_kind: CapKind,
    pub verdict: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub description: String,
    pub config: Value,
    pub environment: Value,
    pub records: Vec<InstanceRecord>,
    pub summary: Summary,
    /// Extra statistics and the derivation of traced constants.
    pub notes: Value,
}

impl SuiteReport {
    pub fn new(
        suite: &str,
        description: &str,
        config: Value,
        environment: Value,
        records: Vec<InstanceRecord>,
        cap: f64,
        cap_kind: CapKind,
        notes: Value,
    ) -> Self {
        let mut ratios: Vec<f64> = records.iter().map(|r| r.ratio).collect();
        ratios.sort_by(f64::total_cmp);
        let median = if ratios.is_empty() {
            0.0
        } else if ratios.len() % 2 == 1 {
            ratios[ratios.len() / 2]
        } else {
            0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
        };
        let violations = records.iter().filter(|r| !r.ok).count();
        let summary = Summary {
            count: records.len(),
            violations,
            max_ratio: ratios.last().copied().unwrap_or(0.0),
            median_ratio: median,
            cap,
            cap_kind,
            verdict: if violations == 0 { "pass" } else { "fail" }.to_string(),
        };
        Self {
            suite: suite.to_string(),
            description: description.to_string(),
            config,
            environment,
            records,
            summary,
            notes,
        }
    }

    pub fn passed(&self) -> bool {
        self.summary.violations == 0
    }

    /// JSON document; `timestamp` is the only field that varies between
    /// identical runs.
    pub fn to_json(&self, timestamp: Option<u64>) -> Value {
        json!({
            "schema": crate::io::SCHEMA_VERSION,
            "kind": "suite_report",
            "tool_version": crate::io::TOOL_VERSION,
            "timestamp": timestamp,
            "suite": self.suite,
            "description": self.description,
            "config": self.config,
            "environment": self.environment,
            "summary": {
                "count": self.summary.count,
                "violations": self.summary.violations,
                "max_ratio": num(self.summary.max_ratio),
                "median_ratio": num(self.summary.median_ratio),
                "cap": num(self.summary.cap),
                "cap_kind": self.summary.cap_kind,
                "verdict": self.summary.verdict,
            },
            "notes": self.notes,
            "records": self.records.iter().map(|r| json!({
                "index": r.index,
                "digest": r.digest,
                "lhs": num(r.lhs),
                "rhs": num(r.rhs),
                "ratio": num(r.ratio),
                "ok": r.ok,
                "params": r.params,
            })).collect::<Vec<_>>(),
        })
    }
}

/// JSON number, with non-finite values as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub const CSV_HEADER: &str = "suite,count,violations,max_ratio,median_ratio,cap,cap_kind,verdict";

/// One summary row per report, with a header.
pub fn summary_csv(reports: &[SuiteReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in reports {
        let s = &r.summary;
        let kind = serde_json::to_value(s.cap_kind).unwrap();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.suite,
            s.count,
            s.violations,
            s.max_ratio,
            s.median_ratio,
            s.cap,
            kind.as_str().unwrap_or(""),
            s.verdict
        ));
    }
    out
}
