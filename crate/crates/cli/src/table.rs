//! Plot-ready CSV projections of report tables.

use serde_json::Value;

use crate::CliError;

/// Writes the `table` rows of `report` as CSV with the requested columns.
///
/// Floats are printed with 17 significant digits so they round-trip.
pub fn emit_plot_table(report: &Value, columns: &[String]) -> Result<String, CliError> {
    let rows = report
        .get("table")
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Validation("report has no table".into()))?;
    if columns.is_empty() {
        return Err(CliError::Validation("no columns requested".into()));
    }
    let available = table_columns(report);
    if let Some(bad) = columns.iter().find(|c| !available.contains(c)) {
        return Err(CliError::Validation(format!(
            "unknown column `{bad}` (available: {})",
            available.join(", ")
        )));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(csv_error)?;
    for row in rows {
        let record: Vec<String> = columns
            .iter()
            .map(|c| format_cell(&row[c.as_str()]))
            .collect();
        w.write_record(&record).map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Column names in the order of the first table row.
pub fn table_columns(report: &Value) -> Vec<String> {
    report
        .get("table")
        .and_then(Value::as_array)
        .and_then(|rows| rows.first())
        .and_then(Value::as_object)
        .map(|row| row.keys().cloned().collect())
        .unwrap_or_default()
}

fn format_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                format!("{:.16e}", n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Validation(format!("csv: {e}"))
}
