//! Report assembly. Maps are sorted by key and floats are written with 17
//! significant digits, so identical inputs give byte-identical output.

use std::str::FromStr;

use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// A float as a JSON number with 17 significant digits; non-finite values
/// become strings.
pub fn float(x: f64) -> Value {
    // collapses −0.0 so that sign-of-zero noise never reaches a report
    let x = if x == 0.0 { 0.0 } else { x };
    if x.is_finite() {
        Value::Number(Number::from_str(&fmt17(x)).expect("formatted float parses"))
    } else {
        Value::String(x.to_string())
    }
}

pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

/// Ordered key/value builder.
#[derive(Debug, Default, Clone)]
pub struct Obj(Map<String, Value>);

impl Obj {
    pub fn new() -> Self {
        Obj(Map::new())
    }

    pub fn set(mut self, key: &str, v: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), v.into());
        self
    }

    pub fn f(self, key: &str, x: f64) -> Self {
        self.set(key, float(x))
    }

    pub fn insert(&mut self, key: &str, v: impl Into<Value>) {
        self.0.insert(key.to_string(), v.into());
    }
}

impl From<Obj> for Value {
    fn from(o: Obj) -> Value {
        Value::Object(o.0)
    }
}

/// One named pass/fail line.
pub fn check(name: &str, passed: bool, detail: impl Into<Value>) -> Value {
    Obj::new().set("name", name).set("passed", passed).set("detail", detail).into()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Violation,
}

impl Outcome {
    pub fn from_checks(checks: &[Value]) -> Self {
        if checks.iter().all(|c| c["passed"] == Value::Bool(true)) {
            Outcome::Pass
        } else {
            Outcome::Violation
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Violation => 1,
        }
    }
}

pub struct Report {
    pub command: String,
    pub input_digest: String,
    pub results: Value,
    pub checks: Vec<Value>,
    pub outcome: Outcome,
    pub timings: Option<Value>,
}

impl Report {
    pub fn new(command: &str, input_digest: String, results: Value, checks: Vec<Value>) -> Self {
        let outcome = Outcome::from_checks(&checks);
        Report { command: command.to_string(), input_digest, results, checks, outcome, timings: None }
    }

    pub fn to_json(&self) -> String {
        let mut o = Obj::new()
            .set("command", self.command.as_str())
            .set("input_digest", self.input_digest.as_str())
            .set("status", if self.outcome == Outcome::Pass { "pass" } else { "violation" })
            .set("checks", Value::Array(self.checks.clone()))
            .set("results", self.results.clone());
        if let Some(t) = &self.timings {
            o.insert("timings", t.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::from(o)).expect("serializable");
        s.push('\n');
        s
    }
}
