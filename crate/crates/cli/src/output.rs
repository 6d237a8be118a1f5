use crate::config::{ExperimentConfig, Format};
use crate::error::CliError;
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    U(u64),
    S(String),
    B(bool),
    Empty,
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::F(v) if v.is_infinite() && *v > 0.0 => "inf".into(),
            Cell::F(v) if v.is_infinite() => "-inf".into(),
            Cell::F(v) if v.is_nan() => "nan".into(),
            Cell::F(v) => format!("{v}"),
            Cell::U(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::F(v) if v.is_finite() => json!(v),
            Cell::F(_) => Value::Null,
            Cell::U(v) => json!(v),
            Cell::S(s) => json!(s),
            Cell::B(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::F)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::U(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::U(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

/// A result table plus key/value notes that go into the file header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), ..Default::default() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.notes.push((key.to_string(), value.to_string()));
    }
}

/// Provenance recorded at the top of every output.
pub fn provenance(command: &str, cfg: &ExperimentConfig) -> Vec<(String, String)> {
    let e = &cfg.engine;
    let engine = serde_json::to_value(e.engine).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
    vec![
        ("tool".into(), format!("outagelab {}", env!("CARGO_PKG_VERSION"))),
        ("command".into(), command.to_string()),
        ("config_hash".into(), cfg.hash()),
        ("seed".into(), cfg.seed.to_string()),
        (
            "engine".into(),
            format!(
                "{engine} gh_order={} mc_samples={} budget_ops={} complex_chain_rule={}",
                e.gh_order, e.mc_samples, e.budget_ops, e.complex_chain_rule
            ),
        ),
    ]
}

pub fn render(table: &Table, command: &str, cfg: &ExperimentConfig, format: Format) -> Result<Vec<u8>, CliError> {
    let meta = provenance(command, cfg);
    match format {
        Format::Csv => {
            let mut buf = Vec::new();
            for (k, v) in meta.iter().chain(&table.notes) {
                writeln!(buf, "# {k}: {v}")?;
            }
            let mut w = csv::Writer::from_writer(buf);
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::text))?;
            }
            w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))
        }
        Format::Json => {
            let mut m = Map::new();
            for (k, v) in &meta {
                m.insert(k.clone(), json!(v));
            }
            m.insert("config".into(), serde_json::to_value(cfg).map_err(|e| CliError::Runtime(e.to_string()))?);
            let notes: Map<String, Value> = table.notes.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Object(table.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect()))
                .collect();
            let doc = json!({ "meta": m, "notes": notes, "columns": table.columns, "rows": rows });
            let mut out = serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Runtime(e.to_string()))?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

pub fn write(bytes: &[u8], path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, bytes)?;
        }
        None => std::io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["a", "b", "c"]);
        t.push(vec![1.5.into(), f64::INFINITY.into(), "x".into()]);
        t.push(vec![Cell::Empty, 3usize.into(), true.into()]);
        t.note("theta_opt_deg", 27.5);
        t
    }

    #[test]
    fn csv_has_header_and_rows() {
        let cfg = ExperimentConfig::default();
        let text = String::from_utf8(render(&sample(), "sweep", &cfg, Format::Csv).unwrap()).unwrap();
        assert!(text.starts_with("# tool: outagelab "));
        assert!(text.contains(&format!("# config_hash: {}", cfg.hash())));
        assert!(text.contains("# theta_opt_deg: 27.5"));
        assert!(text.contains("a,b,c\n1.5,inf,x\n,3,true\n"));
    }

    #[test]
    fn json_maps_non_finite_to_null() {
        let cfg = ExperimentConfig::default();
        let v: Value = serde_json::from_slice(&render(&sample(), "sweep", &cfg, Format::Json).unwrap()).unwrap();
        assert_eq!(v["rows"][0]["b"], Value::Null);
        assert_eq!(v["rows"][1]["b"], json!(3));
        assert_eq!(v["meta"]["seed"], json!("1"));
        assert_eq!(v["notes"]["theta_opt_deg"], json!("27.5"));
    }
}
