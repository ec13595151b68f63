//! Stable numeric formatting for machine-readable output.

/// Formats a float with 17 significant digits in scientific notation,
/// locale-independent, so identical inputs always produce identical bytes.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
