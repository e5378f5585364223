//! The machine-readable run report.
//!
//! Every `fpg` invocation writes one JSON object to stdout:
//!
//! ```text
//! {
//!   "schema":      "fpg-report/1",
//!   "tool":        "fpg",
//!   "version":     crate version,
//!   "command":     "parse" | "abelianize" | "enumerate" | "check" | "paper",
//!   "inputs":      object, the paths and settings the command ran with,
//!   "results":     object, command specific (see the README),
//!   "passed":      bool,
//!   "exit_code":   0 | 1 | 2 | 3,
//!   "diagnostics": [string],
//!   "timing_ms":   integer
//! }
//! ```
//!
//! Keys keep a fixed order and nothing but `timing_ms` depends on the clock,
//! so two runs over the same inputs agree after [`strip_timing`].

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "fpg-report/1";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub passed: bool,
    pub exit_code: i32,
    pub diagnostics: Vec<String>,
    pub timing_ms: u64,
}

impl RunReport {
    pub fn new(command: &str) -> Self {
        RunReport {
            schema: SCHEMA,
            tool: "fpg",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            inputs: Value::Object(Default::default()),
            results: Value::Object(Default::default()),
            passed: true,
            exit_code: 0,
            diagnostics: Vec::new(),
            timing_ms: 0,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are plain JSON")
    }
}

/// Removes the clock-dependent fields so reports can be compared.
pub fn strip_timing(v: &mut Value) {
    match v {
        Value::Object(m) => {
            m.retain(|k, _| k != "timing_ms" && !k.ends_with("_ms"));
            m.values_mut().for_each(strip_timing);
        }
        Value::Array(a) => a.iter_mut().for_each(strip_timing),
        _ => {}
    }
}

type KeyCheck = (&'static str, fn(&Value) -> bool);

/// Checks the top-level shape of a report. Returns the first problem found.
pub fn validate_report(v: &Value) -> Result<(), String> {
    let obj = v.as_object().ok_or("report is not an object")?;
    let want: [KeyCheck; 10] = [
        ("schema", |v| v.as_str() == Some(SCHEMA)),
        ("tool", Value::is_string),
        ("version", Value::is_string),
        ("command", Value::is_string),
        ("inputs", Value::is_object),
        ("results", Value::is_object),
        ("passed", Value::is_boolean),
        ("exit_code", |v| matches!(v.as_i64(), Some(0..=3))),
        ("diagnostics", |v| {
            v.as_array().is_some_and(|a| a.iter().all(Value::is_string))
        }),
        ("timing_ms", Value::is_u64),
    ];
    for (k, ok) in want {
        match obj.get(k) {
            None => return Err(format!("missing key {k}")),
            Some(x) if !ok(x) => return Err(format!("bad value for {k}: {x}")),
            _ => {}
        }
    }
    if let Some(k) = obj.keys().find(|k| !want.iter().any(|(w, _)| w == k)) {
        return Err(format!("unexpected key {k}"));
    }
    let passed = obj["passed"].as_bool() == Some(true);
    if passed != (obj["exit_code"].as_i64() == Some(0)) {
        return Err("passed disagrees with exit_code".into());
    }
    Ok(())
}
