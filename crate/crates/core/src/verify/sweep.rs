//! Empirical constants of a suite across a one-parameter grid.

use serde::Serialize;
use serde_json::{json, Value};

use super::report::num;
use super::{run_suite, SuiteConfig};
use crate::error::{param, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub count: usize,
    pub violations: usize,
    pub max_ratio: f64,
    pub median_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub suite: String,
    pub parameter: String,
    pub base: SuiteConfig,
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    /// Direction of the max ratio as the parameter increases:
    /// "increasing", "decreasing", "flat" or "mixed".
    pub fn trend(&self) -> &'static str {
        let m: Vec<f64> = self.rows.iter().map(|r| r.max_ratio).collect();
        if m.len() < 2 {
            return "flat";
        }
        let up = m.windows(2).all(|w| w[1] >= w[0]);
        let down = m.windows(2).all(|w| w[1] <= w[0]);
        match (up, down) {
            (true, true) => "flat",
            (true, false) => "increasing",
            (false, true) => "decreasing",
            _ => "mixed",
        }
    }

    /// `max_ratio` at the first row over `max_ratio` at the last row.
    pub fn end_ratio(&self) -> f64 {
        match (self.rows.first(), self.rows.last()) {
            (Some(a), Some(b)) if b.max_ratio > 0.0 => a.max_ratio / b.max_ratio,
            _ => f64::NAN,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!("{},count,violations,max_ratio,median_ratio\n", self.parameter);
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{}\n", r.value, r.count, r.violations, r.max_ratio, r.median_ratio));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": crate::io::SCHEMA_VERSION,
            "kind": "sweep",
            "tool_version": crate::io::TOOL_VERSION,
            "suite": self.suite,
            "parameter": self.parameter,
            "base": self.base,
            "trend": self.trend(),
            "end_ratio": num(self.end_ratio()),
            "rows": self.rows.iter().map(|r| json!({
                "value": r.value,
                "count": r.count,
                "violations": r.violations,
                "max_ratio": num(r.max_ratio),
                "median_ratio": num(r.median_ratio),
            })).collect::<Vec<_>>(),
        })
    }
}

fn set_param(cfg: &mut SuiteConfig, name: &str, v: f64) -> Result<()> {
    match name {
        "p" => cfg.p = Some(v),
        "q" => cfg.q = Some(v),
        "delta" => cfg.delta = Some(v),
        "delta2" => cfg.delta2 = Some(v),
        "kappa" => cfg.kappa = Some(v),
        "alpha" => cfg.alpha = Some(v),
        "floor" => cfg.floor = Some(v),
        "L" | "level" => {
            if v.fract() != 0.0 || v < 0.0 {
                return param(format!("level must be a non-negative integer, got {v}"));
            }
            cfg.level = Some(v as u32);
        }
        _ => return param(format!("cannot sweep `{name}`; use one of p, q, delta, delta2, kappa, alpha, floor, L")),
    }
    Ok(())
}

/// Runs `suite` once per value of `parameter`, all other settings from `base`.
pub fn estimate_constant(suite: &str, base: &SuiteConfig, parameter: &str, values: &[f64]) -> Result<SweepTable> {
    if values.is_empty() {
        return param("sweep needs at least one parameter value");
    }
    let mut rows = Vec::with_capacity(values.len());
    for &v in values {
        let mut cfg = base.clone();
        set_param(&mut cfg, parameter, v)?;
        let rep = run_suite(suite, &cfg)?;
        let s = &rep.summary;
        rows.push(SweepRow {
            value: v,
            count: s.count,
            violations: s.violations,
            max_ratio: s.max_ratio,
            median_ratio: s.median_ratio,
        });
    }
    Ok(SweepTable { suite: suite.to_string(), parameter: parameter.to_string(), base: base.clone(), rows })
}
