/// Formats `v` in scientific notation with `digits` significant digits.
/// With 17 digits every f64 parses back to the identical value.
pub fn format_sig(v: f64, digits: usize) -> String {
    format!("{:.*e}", digits.saturating_sub(1), v)
}
