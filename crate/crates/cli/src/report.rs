use serde::Serialize;
use serde_json::Value;

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    /// `|value - expect| <= tol`
    pub fn close(name: impl Into<String>, value: f64, expect: f64, tol: f64) -> Check {
        let err = (value - expect).abs();
        Check::new(name, err <= tol, format!("{value} vs {expect} (error {err:.3e}, tolerance {tol:e})"))
    }

    pub fn equal<T: PartialEq + std::fmt::Debug>(name: impl Into<String>, value: T, expect: T) -> Check {
        let passed = value == expect;
        Check::new(name, passed, format!("{value:?} vs {expect:?}"))
    }
}

/// Flat table for CSV and pretty output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(headers: &[&str]) -> Table {
        Table {
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for r in &self.rows {
            w.write_record(r).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    fn pretty(&self) -> String {
        let mut width: Vec<usize> = self.headers.iter().map(|h| h.len()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells
                .iter()
                .zip(&width)
                .map(|(c, &w)| format!("{c:<w$}"))
                .collect();
            parts.join("  ").trim_end().to_string()
        };
        let mut out = line(&self.headers);
        out.push('\n');
        let rule: Vec<String> = width.iter().map(|&w| "-".repeat(w)).collect();
        out.push_str(&rule.join("  "));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// What a command produces before it is wrapped into a [`Report`].
#[derive(Debug, Default)]
pub struct Outcome {
    pub results: serde_json::Map<String, Value>,
    pub validated_by: Vec<String>,
    pub checks: Vec<Check>,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn insert(&mut self, key: &str, value: impl Serialize) {
        self.results
            .insert(key.to_string(), serde_json::to_value(value).expect("result serializes"));
    }

    /// Records a check and names it as a validator of the results.
    pub fn check(&mut self, c: Check) {
        if !self.validated_by.contains(&c.name) {
            self.validated_by.push(c.name.clone());
        }
        self.checks.push(c);
    }
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub total_ms: f64,
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub config: RunConfig,
    pub results: Value,
    pub checks: Vec<Check>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(config: RunConfig, outcome: Outcome) -> Report {
        let mut results = outcome.results;
        results.insert(
            "validated_by".into(),
            serde_json::to_value(&outcome.validated_by).expect("strings serialize"),
        );
        let passed = outcome.checks.iter().all(|c| c.passed);
        Report {
            command: config.command.name().to_string(),
            config,
            results: Value::Object(results),
            checks: outcome.checks,
            passed,
            timings: None,
            table: outcome.table,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Rendered output, or an error message when the format does not apply.
    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                Ok(s)
            }
            Format::Csv => match &self.table {
                Some(t) => Ok(t.csv()),
                None => Err(format!(
                    "`{}` produces nested results; CSV output is only available for flat tables",
                    self.command
                )),
            },
            Format::Pretty => {
                let mut out = format!("{} ({})\n\n", self.command, self.config.group);
                match &self.table {
                    Some(t) => out.push_str(&t.pretty()),
                    None => {
                        let mut r = self.results.clone();
                        if let Value::Object(m) = &mut r {
                            m.remove("validated_by");
                        }
                        out.push_str(&serde_json::to_string_pretty(&r).expect("results serialize"));
                        out.push('\n');
                    }
                }
                out.push('\n');
                for c in &self.checks {
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    out.push_str(&format!("[{tag}] {}: {}\n", c.name, c.detail));
                }
                if let Some(t) = &self.timings {
                    out.push_str(&format!("total {:.1} ms\n", t.total_ms));
                }
                Ok(out)
            }
        }
    }
}
