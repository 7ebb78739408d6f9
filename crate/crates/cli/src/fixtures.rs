//! Regression fixtures: one JSONL line per case, keyed by the SHA-256 of the
//! command and its canonical (key-sorted, compact) parameters.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const FILE_NAME: &str = "derived.jsonl";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Fixture {
    pub key: String,
    pub command: String,
    pub params: Value,
    pub result: Value,
}

/// `v` with every object's keys sorted.
pub fn canonical(v: &Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: BTreeMap<&String, Value> = m.iter().map(|(k, x)| (k, canonical(x))).collect();
            Value::Object(sorted.into_iter().map(|(k, x)| (k.clone(), x)).collect())
        }
        Value::Array(a) => Value::Array(a.iter().map(canonical).collect()),
        other => other.clone(),
    }
}

pub fn key(command: &str, params: &Value) -> String {
    let mut h = Sha256::new();
    h.update(command.as_bytes());
    h.update(b"\n");
    h.update(canonical(params).to_string().as_bytes());
    hex::encode(h.finalize())
}

pub fn path(dir: &Path) -> PathBuf {
    dir.join(FILE_NAME)
}

/// Fixtures by key, or `None` when the file does not exist.
pub fn load(dir: &Path) -> io::Result<Option<BTreeMap<String, Fixture>>> {
    let file = match fs::File::open(path(dir)) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e),
    };
    let mut out = BTreeMap::new();
    for line in io::BufReader::new(file).lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Fixture = serde_json::from_str(&line).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        out.insert(f.key.clone(), f);
    }
    Ok(Some(out))
}

pub fn save(dir: &Path, fixtures: &[Fixture]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let mut w = io::BufWriter::new(fs::File::create(path(dir))?);
    for f in fixtures {
        serde_json::to_writer(&mut w, f)?;
        w.write_all(b"\n")?;
    }
    w.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn key_ignores_field_order() {
        let a = json!({ "x": 10, "c": "3/2", "nested": { "b": 1, "a": 2 } });
        let b = json!({ "nested": { "a": 2, "b": 1 }, "c": "3/2", "x": 10 });
        assert_eq!(key("census", &a), key("census", &b));
        assert_ne!(key("census", &a), key("squarefree", &a));
        assert_eq!(key("census", &a).len(), 64);
    }

    #[test]
    fn round_trip() {
        let dir = std::env::temp_dir().join(format!("psc-lab-fixtures-{}", std::process::id()));
        let f = Fixture { key: "k".into(), command: "c".into(), params: json!({}), result: json!({ "v": 1.25 }) };
        save(&dir, &[f]).unwrap();
        let back = load(&dir).unwrap().unwrap();
        assert_eq!(back["k"].result, json!({ "v": 1.25 }));
        fs::remove_dir_all(&dir).unwrap();
        assert!(load(&dir).unwrap().is_none());
    }
}
