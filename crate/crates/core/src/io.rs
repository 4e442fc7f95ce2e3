//! JSON documents for grid sets and grid functions, digests, atomic writes.
//!
//! ```json
//! {"schema": 1, "kind": "grid_set", "n": 2, "L": 3, "encoding": "rle", "data": [5, 2, 57]}
//! {"schema": 1, "kind": "grid_function", "n": 1, "L": 2, "encoding": "dense", "data": [0, 1.5, "inf", 0]}
//! ```
//!
//! RLE data lists alternating run lengths over the row-major cells, starting
//! with a run of unset cells (possibly zero). Dense set data is a list of 0/1.
//! Function data is always dense; `"inf"` marks infinite values.

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::content::{ContentResult, CoverElement};
use crate::error::{Error, Result};
use crate::geometry::{Grid, GridFunction, GridSet};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Rle,
    Dense,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridDoc {
    schema: u32,
    kind: String,
    n: usize,
    #[serde(rename = "L")]
    level: u32,
    encoding: Encoding,
    data: Vec<Value>,
}

fn schema_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Schema(msg.into()))
}

fn parse_doc(v: &Value, kind: &str) -> Result<(Grid, GridDoc)> {
    let doc: GridDoc = serde_json::from_value(v.clone()).map_err(|e| Error::Schema(e.to_string()))?;
    if doc.schema != SCHEMA_VERSION {
        return schema_err(format!("unsupported schema version {}", doc.schema));
    }
    if doc.kind != kind {
        return schema_err(format!("expected kind `{kind}`, found `{}`", doc.kind));
    }
    let grid = Grid::new(doc.n, doc.level)?;
    Ok((grid, doc))
}

pub fn set_to_json(set: &GridSet, encoding: Encoding) -> Value {
    let g = set.grid();
    let data: Vec<Value> = match encoding {
        Encoding::Dense => set.cells().iter().map(|&b| json!(b as u8)).collect(),
        Encoding::Rle => {
            let mut runs = Vec::new();
            let mut current = false;
            let mut len = 0u64;
            for &b in set.cells() {
                if b != current {
                    runs.push(json!(len));
                    current = b;
                    len = 0;
                }
                len += 1;
            }
            runs.push(json!(len));
            runs
        }
    };
    json!({"schema": SCHEMA_VERSION, "kind": "grid_set", "n": g.n(), "L": g.level(),
           "encoding": encoding, "data": data})
}

pub fn set_from_json(v: &Value) -> Result<GridSet> {
    let (grid, doc) = parse_doc(v, "grid_set")?;
    let mut cells = Vec::with_capacity(grid.len());
    match doc.encoding {
        Encoding::Dense => {
            for d in &doc.data {
                match d.as_u64() {
                    Some(0) => cells.push(false),
                    Some(1) => cells.push(true),
                    _ => return schema_err("dense set data must be 0 or 1"),
                }
            }
        }
        Encoding::Rle => {
            let mut value = false;
            for d in &doc.data {
                let Some(len) = d.as_u64() else {
                    return schema_err("run lengths must be nonnegative integers");
                };
                if cells.len() as u64 + len > grid.len() as u64 {
                    return schema_err("runs exceed the grid size");
                }
                cells.extend(std::iter::repeat_n(value, len as usize));
                value = !value;
            }
        }
    }
    if cells.len() != grid.len() {
        return schema_err(format!("expected {} cells, got {}", grid.len(), cells.len()));
    }
    GridSet::from_cells(grid, cells)
}

pub fn function_to_json(f: &GridFunction) -> Value {
    let g = f.grid();
    let data: Vec<Value> = f
        .values()
        .iter()
        .map(|&v| if v.is_infinite() { json!("inf") } else { json!(v) })
        .collect();
    json!({"schema": SCHEMA_VERSION, "kind": "grid_function", "n": g.n(), "L": g.level(),
           "encoding": "dense", "data": data})
}

pub fn function_from_json(v: &Value) -> Result<GridFunction> {
    let (grid, doc) = parse_doc(v, "grid_function")?;
    if doc.encoding != Encoding::Dense {
        return schema_err("grid functions use dense encoding");
    }
    let mut values = Vec::with_capacity(doc.data.len());
    for d in &doc.data {
        match d {
            Value::Number(x) => values.push(x.as_f64().unwrap_or(f64::NAN)),
            Value::String(s) if s == "inf" => values.push(f64::INFINITY),
            _ => return schema_err("function values must be numbers or \"inf\""),
        }
    }
    GridFunction::from_values(grid, values)
}

/// Loads a grid function; a grid set is read as its indicator.
pub fn load_function_or_set(v: &Value) -> Result<GridFunction> {
    match v.get("kind").and_then(Value::as_str) {
        Some("grid_set") => Ok(set_from_json(v)?.indicator()),
        _ => function_from_json(v),
    }
}

fn sha_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of the compact RLE document.
pub fn set_digest(set: &GridSet) -> String {
    sha_hex(set_to_json(set, Encoding::Rle).to_string().as_bytes())
}

/// SHA-256 of the compact dense document.
pub fn function_digest(f: &GridFunction) -> String {
    sha_hex(function_to_json(f).to_string().as_bytes())
}

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Schema(format!("{}: {e}", path.display())))
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::Io(e)
    })
}

pub fn write_json(path: &Path, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn content_result_to_json(r: &ContentResult) -> Value {
    let cover: Vec<Value> = r
        .cover
        .iter()
        .map(|e| match e {
            CoverElement::Cube(q) => json!({"type": "cube", "level": q.level,
                                            "index": &q.index[..q.n], "side": q.side()}),
            CoverElement::Ball(b) => json!({"type": "ball", "center": b.center, "radius": b.radius}),
        })
        .collect();
    json!({"value": r.value, "lower": r.lower, "upper": r.upper, "delta": r.delta,
           "backend": r.backend, "certificate": cover,
           "certificate_cost": r.certificate_cost()})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_round_trip() {
        let g = Grid::new(2, 3).unwrap();
        for cells in [vec![], vec![0, 1, 2, 63], vec![5, 6, 40]] {
            let s = GridSet::from_indices(g, cells);
            for enc in [Encoding::Rle, Encoding::Dense] {
                assert_eq!(set_from_json(&set_to_json(&s, enc)).unwrap(), s);
            }
        }
        let s = GridSet::from_indices(g, [5, 6]);
        let v = set_to_json(&s, Encoding::Rle);
        assert_eq!(v["data"], json!([5, 2, 57]));
        assert_eq!(set_digest(&s), set_digest(&set_from_json(&v).unwrap()));
    }

    #[test]
    fn function_round_trip() {
        let g = Grid::new(1, 2).unwrap();
        let f = GridFunction::from_values(g, vec![0.0, 1.5, f64::INFINITY, 0.1]).unwrap();
        let v = function_to_json(&f);
        assert_eq!(v["data"][2], json!("inf"));
        let back = function_from_json(&v).unwrap();
        assert_eq!(back, f);
        assert_eq!(function_digest(&back), function_digest(&f));
    }

    #[test]
    fn schema_errors() {
        let bad = json!({"schema": 2, "kind": "grid_set", "n": 1, "L": 1, "encoding": "rle", "data": [2]});
        assert!(matches!(set_from_json(&bad), Err(Error::Schema(_))));
        let short = json!({"schema": 1, "kind": "grid_set", "n": 1, "L": 2, "encoding": "rle", "data": [2]});
        assert!(set_from_json(&short).is_err());
        let over = json!({"schema": 1, "kind": "grid_set", "n": 1, "L": 1, "encoding": "rle", "data": [1, 5]});
        assert!(set_from_json(&over).is_err());
        let nan = json!({"schema": 1, "kind": "grid_function", "n": 1, "L": 1, "encoding": "dense", "data": [1, "x"]});
        assert!(function_from_json(&nan).is_err());
    }

    #[test]
    fn atomic_write() {
        let dir = std::env::temp_dir().join(format!("hc-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join("out.json");
        write_json(&p, &json!({"a": 1})).unwrap();
        assert_eq!(read_json(&p).unwrap(), json!({"a": 1}));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
