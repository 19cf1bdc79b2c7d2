//! Output helpers: fixed-significance decimal formatting for tables and
//! JSON values that survive non-finite floats.

use serde_json::Value;

/// Format with 12 significant digits. Non-finite values print as `inf`,
/// `-inf`, or `nan`.
pub fn sig12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return "0".into();
    }
    // The exponent of the shortest round-trip form is exact, unlike log10.
    let sci = format!("{x:e}");
    let exponent: i32 = sci
        .split('e')
        .nth(1)
        .expect("{:e} always has an exponent")
        .parse()
        .expect("exponent is an integer");
    let decimals = (11 - exponent).clamp(0, 360) as usize;
    format!("{x:.decimals$}")
}

/// JSON representation of a float: a number when finite, otherwise the
/// strings "inf", "-inf", or "nan" (JSON has no non-finite numbers).
pub fn json_f64(x: f64) -> Value {
    if x.is_nan() {
        Value::String("nan".into())
    } else if x.is_infinite() {
        Value::String(if x > 0.0 { "inf" } else { "-inf" }.into())
    } else {
        serde_json::json!(x)
    }
}

/// Two-column key/value table with an aligned value column.
pub struct Table {
    rows: Vec<(String, String)>,
}

impl Table {
    pub fn new() -> Table {
        Table { rows: Vec::new() }
    }

    pub fn row(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.rows.push((key.into(), value.into()));
    }

    pub fn print(&self) {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (key, value) in &self.rows {
            println!("{key:<width$}  {value}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(23.0 / 13.0), "1.76923076923");
        assert_eq!(sig12(3.0), "3.00000000000");
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(1e-4), "0.000100000000000");
        assert_eq!(sig12(-1234.5), "-1234.50000000");
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(f64::NEG_INFINITY), "-inf");
        assert_eq!(sig12(f64::NAN), "nan");
    }

    #[test]
    fn json_floats_keep_full_precision() {
        let value = json_f64(23.0 / 13.0);
        assert_eq!(value.as_f64(), Some(23.0 / 13.0));
        assert_eq!(json_f64(f64::INFINITY), Value::String("inf".into()));
        assert_eq!(json_f64(f64::NEG_INFINITY), Value::String("-inf".into()));
        assert_eq!(json_f64(f64::NAN), Value::String("nan".into()));
    }
}
