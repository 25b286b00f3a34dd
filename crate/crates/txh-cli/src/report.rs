//! Deterministic report emission.
//!
//! Every report is a header block (tool version, command, echoed physical
//! parameters), a rectangular data section, and a list of discrepancy
//! flags. Nothing in the output depends on time, environment or thread
//! count, so repeated runs are byte-identical.
//!
//! CSV carries the header and flags as `#` comment lines, RFC-4180 quoting
//! for text fields and 17 significant digits for numbers (full f64
//! round-trip). JSON is one object with `params`, `columns`, `rows` and
//! `flags` arrays.

use std::io::Write;
use std::path::Path;

use crate::CliError;

/// One cell of the data section.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}
impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}
impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}
impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

/// A named discrepancy surfaced by the analysis: a quoted reference value
/// next to what direct computation gives.
#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub id: String,
    pub message: String,
    pub reference: f64,
    pub computed: f64,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    /// Ordered `(key, value)` pairs echoed into the header.
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub flags: Vec<Flag>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            params: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
            flags: Vec::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    pub fn param_num(&mut self, key: &str, value: f64) -> &mut Self {
        self.params.push((key.to_string(), format_number(value)));
        self
    }

    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.columns = names.iter().map(|s| s.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<Value>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.columns.len());
        self.rows.push(cells);
        self
    }

    pub fn flag(&mut self, id: &str, message: String, reference: f64, computed: f64) -> &mut Self {
        self.flags.push(Flag { id: id.to_string(), message, reference, computed });
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# txh {} report: {}\n",
            env!("CARGO_PKG_VERSION"),
            self.command
        ));
        for (key, value) in &self.params {
            out.push_str(&format!("# param: {key} = {value}\n"));
        }
        for flag in &self.flags {
            out.push_str(&format!(
                "# flag: {} | {} | reference={} computed={}\n",
                flag.id,
                flag.message,
                format_number(flag.reference),
                format_number(flag.computed)
            ));
        }
        out.push_str(&self.columns.iter().map(|c| quote_csv(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Value::Num(v) => format_number(*v),
                    Value::Int(v) => v.to_string(),
                    Value::Text(v) => quote_csv(v),
                })
                .collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let params: Vec<serde_json::Value> = self
            .params
            .iter()
            .map(|(k, v)| serde_json::json!([k, v]))
            .collect();
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                serde_json::Value::Array(
                    row.iter()
                        .map(|cell| match cell {
                            Value::Num(v) => serde_json::json!(v),
                            Value::Int(v) => serde_json::json!(v),
                            Value::Text(v) => serde_json::json!(v),
                        })
                        .collect(),
                )
            })
            .collect();
        let flags: Vec<serde_json::Value> = self
            .flags
            .iter()
            .map(|f| {
                serde_json::json!({
                    "id": f.id,
                    "message": f.message,
                    "reference": f.reference,
                    "computed": f.computed,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "tool": "txh",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "params": params,
            "columns": self.columns,
            "rows": rows,
            "flags": flags,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serialises");
        text.push('\n');
        text
    }

    /// Render in the requested format.
    pub fn render(&self, format: crate::cli::Format) -> String {
        match format {
            crate::cli::Format::Csv => self.to_csv(),
            crate::cli::Format::Json => self.to_json(),
        }
    }
}

/// 17 significant digits: enough to reconstruct the exact f64.
pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

fn quote_csv(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Write atomically: temp file in the target directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let io_err = |source| CliError::Io { path: path.display().to_string(), source };
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path)
        .map_err(|e| CliError::Io { path: path.display().to_string(), source: e.error })?;
    Ok(())
}
