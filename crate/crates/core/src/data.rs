//! Failure-time input: text parsing and the bundled device data set.

use crate::error::{Error, Result};

/// Failure and running times of 30 devices from a field-tracking study, in
/// the order they are usually printed. The repeated 3.00 readings are kept.
pub const DEVICES30: [f64; 30] = [
    2.75, 0.13, 1.47, 0.23, 1.81, 0.30, 0.65, 0.10, 3.00, 1.73, 1.06, 3.00, 3.00, 2.12, 3.00,
    3.00, 3.00, 0.02, 2.61, 2.93, 0.88, 2.47, 0.28, 1.43, 3.00, 0.23, 3.00, 0.80, 2.45, 2.66,
];

/// Names accepted after the `builtin:` prefix.
pub fn builtin(name: &str) -> Option<&'static [f64]> {
    match name {
        "devices30" => Some(&DEVICES30),
        _ => None,
    }
}

/// Parse newline- and/or comma-separated positive reals. Everything after a
/// `#` on a line is ignored; blank fields are skipped.
pub fn parse_times(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or("");
        for field in content.split([',', ';', ' ', '\t']) {
            let field = field.trim();
            if field.is_empty() {
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                Error::Domain(format!("line {}: cannot parse {field:?} as a number", lineno + 1))
            })?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!(
                    "line {}: failure times must be positive and finite, got {v}",
                    lineno + 1
                )));
            }
            out.push(v);
        }
    }
    if out.is_empty() {
        return Err(Error::Domain("no failure times found".into()));
    }
    Ok(out)
}
