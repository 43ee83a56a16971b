//! Fixed numeric formatting for the CSV and JSON emitters.
//!
//! Every numeric cell is printed with 17 significant digits in scientific
//! notation so independent implementations can be diffed byte for byte;
//! non-finite values become the explicit sentinels `inf`, `-inf`, `nan`.

use std::fmt::Write;

/// 17-significant-digit rendering with sentinels; −0 normalizes to 0.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Optional value: `None` renders as the `nan` sentinel.
pub fn g17_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => g17(v),
        None => "nan".to_string(),
    }
}

/// JSON mirror of the CSV sentinel policy: finite values stay numbers,
/// non-finite ones become the explicit sentinel strings.
pub fn json_number(x: f64) -> serde_json::Value {
    if x.is_finite() {
        serde_json::json!(x)
    } else {
        serde_json::Value::String(g17(x))
    }
}

/// `None` mirrors the `nan` sentinel.
pub fn json_number_opt(x: Option<f64>) -> serde_json::Value {
    match x {
        Some(v) => json_number(v),
        None => serde_json::Value::String("nan".to_string()),
    }
}

/// A CSV builder that owns its header and rejects ragged rows.
pub struct Csv {
    out: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &str) -> Self {
        let mut out = String::new();
        writeln!(out, "{header}").expect("string write");
        Self {
            out,
            columns: header.split(',').count(),
        }
    }

    pub fn row(&mut self, cells: &[String]) {
        assert_eq!(cells.len(), self.columns, "ragged CSV row");
        writeln!(self.out, "{}", cells.join(",")).expect("string write");
    }

    pub fn finish(self) -> String {
        self.out
    }
}
