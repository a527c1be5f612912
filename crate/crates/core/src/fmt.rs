//! Number formatting shared by the CSV writers.

/// Twelve significant digits in scientific notation.
pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.11e}")
}
