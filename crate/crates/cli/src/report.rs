use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

/// Effective parameters of a run. Only the ones a command uses are set.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Everything but `timing` is a function of the configuration.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub result: Verdict,
    pub violations: Vec<Value>,
    pub stats: Value,
    pub version: &'static str,
    pub timing: Timing,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_ms: u128,
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

const SHOWN_VIOLATIONS: usize = 10;

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let verdict = match self.result {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let _ = writeln!(out, "{}: {verdict}", self.config.command);
        if let Value::Object(map) = serde_json::to_value(&self.config).expect("serializable") {
            for (key, v) in map.iter().filter(|(k, _)| *k != "command") {
                let _ = writeln!(out, "  {key} = {}", scalar(v));
            }
        }
        let empty = Map::new();
        for (key, v) in self.stats.as_object().unwrap_or(&empty) {
            let _ = writeln!(out, "  {key}: {}", scalar(v));
        }
        let _ = writeln!(out, "  violations: {}", self.violations.len());
        for v in self.violations.iter().take(SHOWN_VIOLATIONS) {
            let _ = writeln!(out, "    {v}");
        }
        if self.violations.len() > SHOWN_VIOLATIONS {
            let _ = writeln!(out, "    ... {} more", self.violations.len() - SHOWN_VIOLATIONS);
        }
        let _ = writeln!(out, "  elapsed: {} ms", self.timing.elapsed_ms);
        out
    }
}
