use std::io::Write;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;

pub const TOOL_VERSION: &str = concat!("psc-lab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub params: Value,
    pub result: Value,
    pub tool_version: &'static str,
    pub elapsed_ms: u64,
}

/// Flattens nested objects and arrays into dotted keys (`type1.worst_k`, `bins.3`).
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

/// Single writer for every record, in emission order.
pub struct Sink<W: Write> {
    format: Format,
    out: W,
    header: Option<Vec<String>>,
}

impl<W: Write> Sink<W> {
    pub fn new(format: Format, out: W) -> Self {
        Sink { format, out, header: None }
    }

    pub fn emit(&mut self, rec: &RunRecord) -> std::io::Result<()> {
        match self.format {
            Format::Jsonl => {
                serde_json::to_writer(&mut self.out, rec)?;
                self.out.write_all(b"\n")?;
            }
            Format::Csv => {
                let mut cells = vec![("command".to_string(), rec.command.clone())];
                let result = match &rec.result {
                    Value::Object(_) => rec.result.clone(),
                    other => serde_json::json!({ "value": other }),
                };
                flatten("", &result, &mut cells);
                let keys: Vec<String> = cells.iter().map(|c| c.0.clone()).collect();
                let mut w = csv::WriterBuilder::new().flexible(true).from_writer(&mut self.out);
                // a new header whenever the columns change
                if self.header.as_ref() != Some(&keys) {
                    w.write_record(&keys)?;
                    self.header = Some(keys);
                }
                w.write_record(cells.iter().map(|c| c.1.as_str()))?;
                w.flush()?;
            }
        }
        self.out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn record(result: Value) -> RunRecord {
        RunRecord { command: "t".into(), params: json!({}), result, tool_version: TOOL_VERSION, elapsed_ms: 0 }
    }

    #[test]
    fn jsonl_field_order() {
        let mut buf = Vec::new();
        Sink::new(Format::Jsonl, &mut buf).emit(&record(json!({ "a": 1 }))).unwrap();
        let line = String::from_utf8(buf).unwrap();
        let keys = ["\"command\"", "\"params\"", "\"result\"", "\"tool_version\"", "\"elapsed_ms\""];
        let pos: Vec<usize> = keys.iter().map(|k| line.find(k).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
        assert!(line.ends_with("}\n"));
    }

    #[test]
    fn csv_flattens_and_quotes() {
        let mut buf = Vec::new();
        {
            let mut s = Sink::new(Format::Csv, &mut buf);
            s.emit(&record(json!({ "v": [1.5, -2], "m": { "k": "a,b" }, "n": null }))).unwrap();
            s.emit(&record(json!({ "v": [3, 4], "m": { "k": "q" }, "n": 1 }))).unwrap();
            s.emit(&record(json!({ "other": true }))).unwrap();
        }
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "command,v.0,v.1,m.k,n\nt,1.5,-2,\"a,b\",\nt,3,4,q,1\ncommand,other\nt,true\n");
    }
}
