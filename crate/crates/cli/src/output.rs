//! Tables and their CSV/JSON serialization.
//!
//! Exact rationals are written as `"p/q"` strings, floats in shortest
//! round-trip decimal form, and non-finite floats as `inf`, `-inf` or `nan`
//! (JSON strings, since JSON has no such numbers).

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Exact(String),
    Text(String),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => float_text(*x),
            Cell::Exact(s) | Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => match i64::try_from(*i) {
                Ok(v) => json!(v),
                Err(_) => json!(i.to_string()),
            },
            Cell::Float(x) if x.is_finite() => json!(x),
            Cell::Float(x) => json!(float_text(*x)),
            Cell::Exact(s) | Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

fn float_text(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x}")
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        // Signed zero would print as "-0".
        Cell::Float(if x == 0.0 { 0.0 } else { x })
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(i: $t) -> Self {
                Cell::Int(i as i128)
            }
        }
    )*};
}
int_cell!(u8, u32, u64, usize, i64);

impl From<u128> for Cell {
    fn from(i: u128) -> Self {
        i128::try_from(i).map(Cell::Int).unwrap_or_else(|_| Cell::Text(i.to_string()))
    }
}

impl From<&bcf_core::ExactRational> for Cell {
    fn from(r: &bcf_core::ExactRational) -> Self {
        Cell::Exact(r.to_string())
    }
}

impl From<&bcf_core::Mass> for Cell {
    fn from(m: &bcf_core::Mass) -> Self {
        match m {
            bcf_core::Mass::Exact(r) => Cell::Exact(r.to_string()),
            bcf_core::Mass::Approx(x) => Cell::Float(*x),
        }
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(o: Option<T>) -> Self {
        o.map(Into::into).unwrap_or(Cell::Empty)
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Run-level results that are not rows, such as a fit over all rows.
    pub summary: Option<Value>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Table {
        Table { columns: columns.to_vec(), rows: Vec::new(), summary: None }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn csv_bytes(table: &Table) -> io::Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

fn json_rows(table: &Table) -> Value {
    Value::Array(
        table
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, v) in table.columns.iter().zip(row) {
                    m.insert(c.to_string(), v.json());
                }
                Value::Object(m)
            })
            .collect(),
    )
}

fn manifest_with_summary(manifest: &Value, table: &Table) -> Value {
    let mut m = manifest.clone();
    if let (Some(obj), Some(s)) = (m.as_object_mut(), &table.summary) {
        obj.insert("summary".into(), s.clone());
    }
    m
}

/// Where the output goes: a file (CSV gets a `.manifest.json` sidecar) or
/// stdout (a CSV manifest goes to stderr as one JSON line).
pub fn resolve_path(out: Option<&Path>, out_dir: Option<&Path>, stem: &str, format: Format) -> Option<PathBuf> {
    match (out, out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.to_path_buf()),
        (None, Some(dir)) => Some(dir.join(format!("{stem}.{}", format.extension()))),
        (None, None) => None,
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

pub fn write(table: &Table, manifest: &Value, format: Format, path: Option<&Path>) -> io::Result<()> {
    let manifest = manifest_with_summary(manifest, table);
    let body = match format {
        Format::Csv => csv_bytes(table)?,
        Format::Json => {
            let doc = json!({ "manifest": manifest, "rows": json_rows(table) });
            let mut b = serde_json::to_vec_pretty(&doc)?;
            b.push(b'\n');
            b
        }
    };
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, &body)?;
            if format == Format::Csv {
                let mut m = serde_json::to_vec_pretty(&manifest)?;
                m.push(b'\n');
                fs::write(sidecar(p), m)?;
            }
        }
        None => {
            io::stdout().lock().write_all(&body)?;
            if format == Format::Csv {
                eprintln!("{}", serde_json::to_string(&manifest)?);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_lf_and_exact_strings() {
        let mut t = Table::new(&["n", "c", "x"]);
        t.push(vec![1u64.into(), Cell::Exact("1/3".into()), f64::INFINITY.into()]);
        let s = String::from_utf8(csv_bytes(&t).unwrap()).unwrap();
        assert_eq!(s, "n,c,x\n1,1/3,inf\n");
    }

    #[test]
    fn json_rows_keep_column_order() {
        let mut t = Table::new(&["z", "a"]);
        t.push(vec![0.5.into(), Cell::Empty]);
        assert_eq!(serde_json::to_string(&json_rows(&t)).unwrap(), r#"[{"z":0.5,"a":null}]"#);
    }

    #[test]
    fn output_paths() {
        let d = Path::new("/tmp/o");
        assert_eq!(resolve_path(None, Some(d), "thaler", Format::Csv), Some(d.join("thaler.csv")));
        assert_eq!(resolve_path(Some(Path::new("a.json")), Some(d), "x", Format::Json), Some(d.join("a.json")));
        assert_eq!(
            resolve_path(Some(Path::new("/abs.csv")), Some(d), "x", Format::Csv),
            Some(PathBuf::from("/abs.csv"))
        );
        assert_eq!(resolve_path(None, None, "x", Format::Csv), None);
        assert_eq!(sidecar(Path::new("r.csv")), PathBuf::from("r.csv.manifest.json"));
    }
}
