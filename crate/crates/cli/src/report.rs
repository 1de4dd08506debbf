use std::io::Write;

use serde::Serialize;
use serde_json::{Map, Value};

/// One invariant evaluated during a run.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable bound, e.g. `"< 1e-10"`.
    pub threshold: String,
    pub passed: bool,
}

impl Check {
    pub fn below(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold: format!("< {bound:e}"),
            passed: value < bound,
        }
    }

    pub fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold: format!(">= {bound:e}"),
            passed: value >= bound,
        }
    }

    pub fn within(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            threshold: format!("{target} ± {tolerance}"),
            passed: (value - target).abs() <= tolerance,
        }
    }

    pub fn holds(name: &str, value: f64, passed: bool, threshold: &str) -> Self {
        Check {
            name: name.into(),
            value,
            threshold: threshold.into(),
            passed,
        }
    }
}

/// A plot-ready table; numbers are written with 17 significant digits.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub parameters: Value,
    pub results: Map<String, Value>,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub passed: bool,
}

impl Report {
    pub fn new(command: &str, parameters: impl Serialize) -> Self {
        Report {
            command: command.into(),
            parameters: serde_json::to_value(parameters).unwrap_or(Value::Null),
            results: Map::new(),
            checks: Vec::new(),
            table: None,
            passed: true,
        }
    }

    pub fn result(&mut self, key: &str, value: impl Serialize) {
        self.results.insert(
            key.into(),
            serde_json::to_value(value).unwrap_or(Value::Null),
        );
    }

    pub fn check(&mut self, check: Check) {
        if !check.passed {
            log::warn!(
                "check {} failed: {} vs {}",
                check.name,
                check.value,
                check.threshold
            );
        }
        self.passed &= check.passed;
        self.checks.push(check);
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// Writes the table (or the flat results when there is none). Check
    /// outcomes go to stderr so the stream stays a single CSV document.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        match &self.table {
            Some(table) => {
                writeln!(out, "{}", table.columns.join(","))?;
                for row in &table.rows {
                    let cells: Vec<String> = row.iter().map(csv_cell).collect();
                    writeln!(out, "{}", cells.join(","))?;
                }
            }
            None => {
                let keys: Vec<&str> = self.results.keys().map(String::as_str).collect();
                writeln!(out, "{}", keys.join(","))?;
                let cells: Vec<String> = self.results.values().map(csv_cell).collect();
                writeln!(out, "{}", cells.join(","))?;
            }
        }
        for check in &self.checks {
            eprintln!(
                "check {} value={:.16e} threshold={:?} {}",
                check.name,
                check.value,
                check.threshold,
                if check.passed { "pass" } else { "FAIL" }
            );
        }
        Ok(())
    }
}

fn csv_cell(value: &Value) -> String {
    match value {
        Value::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:.16e}"),
            _ => n.to_string(),
        },
        Value::String(s) if s.contains([',', '"', '\n']) => {
            format!("\"{}\"", s.replace('"', "\"\""))
        }
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn num(value: f64) -> Value {
    serde_json::Number::from_f64(value)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_cells_use_full_precision() {
        assert_eq!(csv_cell(&num(0.1)), "1.0000000000000001e-1");
        assert_eq!(csv_cell(&Value::from(3u64)), "3");
        assert_eq!(csv_cell(&Value::from("a,b")), "\"a,b\"");
    }

    #[test]
    fn failing_check_fails_report() {
        let mut r = Report::new("x", ());
        r.check(Check::below("ok", 1.0, 2.0));
        assert!(r.passed);
        r.check(Check::below("bad", 3.0, 2.0));
        assert!(!r.passed);
        let mut buf = Vec::new();
        r.write_json(&mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 2);
        assert_eq!(v["passed"], Value::Bool(false));
    }
}
