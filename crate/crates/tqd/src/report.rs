use serde_json::{Map, Value};

use crate::cli::{Format, OutputArgs};
use crate::{CliError, Outcome};

/// Version tag of the report layout; bumped whenever a field changes meaning.
pub const SCHEMA: &str = "tqd-report/1";

/// Top-level document: metadata keys followed by the command's result fields.
pub fn document(outcome: &Outcome, out: &OutputArgs) -> Value {
    let mut doc = Map::new();
    doc.insert("schema".into(), SCHEMA.into());
    doc.insert("command".into(), outcome.command.into());
    doc.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    doc.insert("seed".into(), out.seed.into());
    doc.insert("inputs".into(), outcome.inputs.clone());
    doc.insert("tolerances".into(), outcome.tolerances.clone());
    doc.insert("status".into(), if outcome.violations { "violations" } else { "ok" }.into());
    match &outcome.result {
        Value::Object(fields) => {
            for (k, v) in fields {
                doc.entry(k.clone()).or_insert_with(|| v.clone());
            }
        }
        other => {
            doc.insert("result".into(), other.clone());
        }
    }
    Value::Object(doc)
}

pub fn render(outcome: &Outcome, out: &OutputArgs) -> Result<String, CliError> {
    let doc = document(outcome, out);
    match out.format {
        Format::Json => Ok(serde_json::to_string_pretty(&doc)? + "\n"),
        Format::Csv => {
            let mut rows = Vec::new();
            flatten("", &doc, &mut rows);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["key", "value"]).map_err(|e| CliError::Io(e.to_string()))?;
            for (k, v) in rows {
                w.write_record([k, v]).map_err(|e| CliError::Io(e.to_string()))?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
        }
    }
}

/// Scalar leaves keyed by dotted path.
fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, x)| flatten(&join(k), x, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, x)| flatten(&join(&i.to_string()), x, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}
