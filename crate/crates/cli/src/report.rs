use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sproc::Config;

use crate::commands::Failure;

/// Everything a run emits. No timestamps or host data: equal inputs and flags give
/// byte-identical reports.
#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub inputs: Vec<String>,
    pub config: Config,
    /// Seed actually used: the base seed mixed with the instance hash.
    pub seed: u64,
    pub result: Value,
    /// Set by `selftest` when an expectation is not met.
    #[serde(skip)]
    pub failed: bool,
}

impl Report {
    pub fn new(command: &'static str, inputs: Vec<String>, config: &Config, seed: u64, result: Value) -> Self {
        Report {
            tool: "sproc",
            version: env!("CARGO_PKG_VERSION"),
            command,
            inputs,
            config: config.clone(),
            seed,
            result,
            failed: false,
        }
    }

    /// 0 when every verdict is definite, 2 when any value in the result is unknown.
    pub fn exit_code(&self) -> u8 {
        if self.failed {
            1
        } else if has_unknown(&self.result) {
            2
        } else {
            0
        }
    }
}

fn has_unknown(v: &Value) -> bool {
    match v {
        Value::String(s) => s.eq_ignore_ascii_case("unknown"),
        Value::Array(items) => items.iter().any(has_unknown),
        Value::Object(map) => map.values().any(has_unknown),
        _ => false,
    }
}

pub fn emit(report: &Report, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::io(path, &e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| json!({ "serialization_error": e.to_string() }))
}
