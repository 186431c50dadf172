//! Stable text formatting for floats.

/// Formats `x` with 17 significant digits in scientific notation, which
/// round-trips every finite `f64`. Output is locale independent.
pub fn sig17(x: f64) -> String {
    if x == 0.0 {
        // Avoid "-0e0" drifting between platforms.
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    format!("{:.16e}", x)
}

/// A `serde_json` number carrying exactly the 17-digit rendering of `x`.
pub fn json_number(x: f64) -> serde_json::Value {
    if !x.is_finite() {
        return serde_json::Value::Null;
    }
    let text = sig17(x);
    // sig17 output is valid JSON number syntax.
    serde_json::from_str(&text).unwrap_or(serde_json::Value::Null)
}
