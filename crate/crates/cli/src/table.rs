//! Output documents: a fixed column set plus rows of JSON values, emitted
//! as CSV (versioned header comment) or as a JSON object with the canonical
//! config echo. Both formats encode exactly the same row data.

use serde_json::Value;
use std::io::Write;

pub const FORMAT_VERSION_COMMENT: &str = "# moebius-expsum v1";

pub struct TableDoc {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl TableDoc {
    pub fn new(columns: Vec<&'static str>) -> Self {
        TableDoc {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "{FORMAT_VERSION_COMMENT}")?;
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn write_json(&self, config: &Value, out: &mut dyn Write) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: serde_json::Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.clone()))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let doc = serde_json::json!({ "config": config, "rows": rows });
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)
    }
}

/// CSV cell rendering: numbers and booleans as their JSON text (shortest
/// round-trip for floats), strings quoted only when they contain a
/// delimiter, null as the empty cell.
fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => {
            if s.contains([',', '"', '\n']) {
                format!("\"{}\"", s.replace('"', "\"\""))
            } else {
                s.clone()
            }
        }
        other => other.to_string(),
    }
}
