//! Result tables, run records and their CSV/JSON emission.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::format::{fmt_g, round_g};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Set when evaluation stopped early; written as a trailing marker line.
    pub failure: Option<String>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.to_vec(),
            rows: Vec::new(),
            failure: None,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, precision: usize) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(x) => fmt_g(*x, precision),
                Cell::Text(s) => s.clone(),
                Cell::Empty => String::new(),
            }))
            .map_err(io)?;
        }
        let mut text = String::from_utf8(w.into_inner().map_err(|e| CliError::Io(e.to_string()))?)
            .map_err(|e| CliError::Io(e.to_string()))?;
        if let Some(msg) = &self.failure {
            text.push_str(&format!("# error: {}\n", msg.replace('\n', " ")));
        }
        Ok(text)
    }

    fn to_json(&self, precision: usize) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| match c {
                            Cell::Num(x) => number(*x, precision),
                            Cell::Text(s) => Value::String(s.clone()),
                            Cell::Empty => Value::Null,
                        })
                        .collect(),
                )
            })
            .collect();
        let mut obj = Map::new();
        obj.insert("columns".into(), json!(self.columns));
        obj.insert("rows".into(), Value::Array(rows));
        if let Some(msg) = &self.failure {
            obj.insert("error".into(), Value::String(msg.clone()));
        }
        Value::Object(obj)
    }
}

fn number(x: f64, precision: usize) -> Value {
    serde_json::Number::from_f64(round_g(x, precision))
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn round_numbers(v: &mut Value, precision: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            *v = number(n.as_f64().unwrap_or(f64::NAN), precision);
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_numbers(x, precision)),
        Value::Object(map) => map.values_mut().for_each(|x| round_numbers(x, precision)),
        _ => {}
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Partial,
    Failed,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Partial => "partial",
            Status::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoleInfo {
    pub e_r: f64,
    pub gamma: f64,
    pub source: &'static str,
}

/// Everything a subcommand produces; the first table is the primary output.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: &'static str,
    pub pole: Option<PoleInfo>,
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl Outcome {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            pole: None,
            tables: Vec::new(),
            summary: Map::new(),
            warnings: Vec::new(),
            error: None,
        }
    }

    pub fn status(&self) -> Status {
        if self.error.is_some() {
            Status::Failed
        } else if self.warnings.is_empty() {
            Status::Ok
        } else {
            Status::Partial
        }
    }

    pub fn record(&self, config: Value, precision: usize) -> Value {
        let mut summary = Value::Object(self.summary.clone());
        round_numbers(&mut summary, precision);
        let pole = match &self.pole {
            Some(p) => json!({
                "e_r": number(p.e_r, precision),
                "gamma": number(p.gamma, precision),
                "source": p.source,
            }),
            None => Value::Null,
        };
        let tables: Map<String, Value> = self
            .tables
            .iter()
            .map(|t| (t.name.to_string(), t.to_json(precision)))
            .collect();
        let mut record = json!({
            "tool": "gamow-thermo",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "status": self.status().as_str(),
            "config": config,
            "pole": pole,
            "tables": tables,
            "summary": summary,
            "warnings": self.warnings,
        });
        if let Some(e) = &self.error {
            record["error"] = Value::String(e.clone());
        }
        record
    }
}

pub fn record_text(record: &Value) -> String {
    let mut s = serde_json::to_string_pretty(record).expect("serialisable record");
    s.push('\n');
    s
}

/// File layout for `--out <path>` in CSV mode: the primary table at `path`,
/// the run record at `<stem>.json`, other tables at `<stem>.<name>.csv`.
pub struct CsvLayout {
    pub primary: PathBuf,
    pub record: PathBuf,
    stem: PathBuf,
}

impl CsvLayout {
    pub fn new(out: &Path) -> Result<Self, CliError> {
        let stem = out.with_extension("");
        let record = stem.with_extension("json");
        if record == out {
            return Err(CliError::Config(format!(
                "--out {}: a CSV output cannot use the .json extension of its run record",
                out.display()
            )));
        }
        Ok(Self {
            primary: out.to_path_buf(),
            record,
            stem,
        })
    }

    pub fn table(&self, name: &str) -> PathBuf {
        let mut s = self.stem.clone().into_os_string();
        s.push(format!(".{name}.csv"));
        PathBuf::from(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_rendering() {
        let mut t = Table::new("main", &["t", "p", "note"]);
        t.push(vec![0.0.into(), (1.0 / 3.0).into(), "a, b".into()]);
        t.push(vec![1.0.into(), Cell::Num(f64::NAN), Cell::Empty]);
        t.failure = Some("stopped".into());
        assert_eq!(
            t.to_csv(12).unwrap(),
            "t,p,note\n0,0.333333333333,\"a, b\"\n1,nan,\n# error: stopped\n"
        );
    }

    #[test]
    fn json_numbers_follow_precision() {
        let mut t = Table::new("main", &["x"]);
        t.push(vec![(1.0 / 3.0).into()]);
        let mut o = Outcome::new("pole");
        o.summary.insert("g".into(), json!(2.0f64 / 3.0));
        o.summary.insert("n".into(), json!(7));
        o.tables.push(t);
        let r = o.record(json!({}), 6);
        assert_eq!(r["tables"]["main"]["rows"][0][0], json!(0.333333));
        assert_eq!(r["summary"]["g"], json!(0.666667));
        assert_eq!(r["summary"]["n"], json!(7));
        assert_eq!(r["status"], json!("ok"));
    }

    #[test]
    fn layout() {
        let l = CsvLayout::new(Path::new("out/run.csv")).unwrap();
        assert_eq!(l.record, PathBuf::from("out/run.json"));
        assert_eq!(l.table("monotonicity"), PathBuf::from("out/run.monotonicity.csv"));
        let l = CsvLayout::new(Path::new("run")).unwrap();
        assert_eq!(l.record, PathBuf::from("run.json"));
        assert!(CsvLayout::new(Path::new("run.json")).is_err());
    }
}
