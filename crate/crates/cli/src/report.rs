//! The run report printed by every subcommand.

use std::collections::BTreeMap;
use std::fmt::Display;

use centralaut::acceptance::factored;
use centralaut::Error;
use num_bigint::BigUint;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::HypothesisViolation(_) | Error::HomomorphismCheckFailed(_) | Error::NotPCentral(_) => 3,
            _ => 2,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub inputs: BTreeMap<String, Value>,
    pub results: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub timing_ms: f64,
}

impl RunReport {
    pub fn new(command: &'static str, argv: Vec<String>) -> Self {
        let mut inputs = BTreeMap::new();
        inputs.insert("argv".to_string(), json!(argv));
        Self { command, inputs, results: BTreeMap::new(), checks: Vec::new(), error: None, timing_ms: 0.0 }
    }

    pub fn input(&mut self, key: &str, v: Value) {
        self.inputs.insert(key.to_string(), v);
    }

    /// A count as a decimal string and as `p^k * m`.
    pub fn count(&mut self, key: &str, n: &BigUint, p: u64) {
        self.results.insert(key.to_string(), json!({ "value": n.to_string(), "factored": factored(n, p) }));
    }

    pub fn set_result(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }

    pub fn push_result(&mut self, key: &str, v: Value) {
        match self.results.entry(key.to_string()).or_insert_with(|| json!([])) {
            Value::Array(a) => a.push(v),
            other => *other = v,
        }
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl Display) {
        let status = if ok { Status::Pass } else { Status::Fail };
        self.checks.push(Check { name: name.to_string(), status, detail: detail.to_string() });
    }

    pub fn check_eq(&mut self, name: &str, got: &BigUint, want: &BigUint) {
        self.check(name, got == want, format!("{got} vs formula {want}"));
    }

    pub fn skip(&mut self, name: &str, reason: impl Display) {
        self.checks.push(Check { name: name.to_string(), status: Status::Skipped, detail: reason.to_string() });
    }

    pub fn any_failed(&self) -> bool {
        self.checks.iter().any(|c| c.status == Status::Fail)
    }

    pub fn print(&self, as_json: bool) {
        if let Some(e) = &self.error {
            eprintln!("error: {e}");
        } else if let Some(c) = self.checks.iter().find(|c| c.status == Status::Fail) {
            eprintln!("check failed: {}: {}", c.name, c.detail);
        }
        if as_json {
            println!("{}", serde_json::to_string_pretty(self).expect("serializable"));
            return;
        }
        println!("{}", self.command);
        for (k, v) in &self.results {
            match v {
                Value::Object(o) if o.contains_key("factored") => {
                    println!("  {k} = {} ({})", o["value"].as_str().unwrap_or(""), o["factored"].as_str().unwrap_or(""))
                }
                Value::Array(items) => {
                    println!("  {k}:");
                    for item in items {
                        println!("    {item}");
                    }
                }
                _ => println!("  {k} = {v}"),
            }
        }
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skipped => "skip",
            };
            println!("  [{tag}] {}: {}", c.name, c.detail);
        }
        println!("  ({:.1} ms)", self.timing_ms);
    }
}
