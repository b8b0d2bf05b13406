//! Fixed nine-decimal rendering shared by reports and documents.

use serde_json::value::RawValue;

/// `x` with exactly nine decimals; negative zero prints as zero.
pub fn fixed9(x: f64) -> String {
    let s = format!("{x:.9}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// JSON number literal with exactly nine decimals.
pub fn raw9(x: f64) -> Box<RawValue> {
    if !x.is_finite() {
        return RawValue::from_string("null".into()).expect("null is valid JSON");
    }
    RawValue::from_string(fixed9(x)).expect("fixed decimal is valid JSON")
}
