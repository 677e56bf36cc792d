use std::fmt::Write as _;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Ordered key/value report rendered as `key=value` lines and as JSON.
#[derive(Debug, Default)]
pub struct Report {
    fields: Map<String, Value>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    /// Floats print in shortest round-trip form so text and JSON agree bit
    /// for bit.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.fields {
            match v {
                Value::String(t) => {
                    let _ = writeln!(s, "{k}={t}");
                }
                Value::Object(_) | Value::Array(_) => {}
                other => {
                    let _ = writeln!(s, "{k}={other}");
                }
            }
        }
        s
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.fields.clone())
    }

    /// Prints the text form and writes JSON to `json` when given.
    pub fn emit(&self, json: Option<&Path>) -> CliResult<()> {
        print!("{}", self.to_text());
        if let Some(path) = json {
            write_json(path, &self.to_json())?;
        }
        Ok(())
    }
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// JSON number for a float; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_and_json_agree() {
        let mut r = Report::new();
        r.set("b", num(0.1 + 0.2)).set("a", "x").set("n", 3);
        assert_eq!(r.to_text(), "b=0.30000000000000004\na=x\nn=3\n");
        let back: f64 = r.to_json()["b"].as_f64().unwrap();
        assert_eq!(back, 0.1 + 0.2);
    }
}
