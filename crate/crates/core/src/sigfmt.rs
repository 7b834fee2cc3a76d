//! Fixed-significant-digit decimal formatting for reports and JSON output.
//!
//! All machine-readable output prints reals at 15 significant digits with a
//! '.' decimal separator, independent of locale.

/// Digits used by every serializer in this crate.
pub const SIG_DIGITS: usize = 15;

/// Format `x` in plain decimal with exactly `sig` significant digits.
///
/// Trailing zeros are kept so a column of numbers lines up at a fixed
/// precision: `format_sig(0.0009765625, 15)` is `"0.000976562500000"`.
pub fn format_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0.0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    // Round-trip through scientific notation so the significant-digit count
    // is exact regardless of magnitude.
    let sci = format!("{:.*e}", sig - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("e-format always has exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    let neg = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), sig);

    // Position of the decimal point relative to the digit string.
    let point = exp + 1;
    let body = if point <= 0 {
        format!("0.{}{}", "0".repeat(-point as usize), digits)
    } else if (point as usize) >= digits.len() {
        format!("{}{}.0", digits, "0".repeat(point as usize - digits.len()))
    } else {
        format!(
            "{}.{}",
            &digits[..point as usize],
            &digits[point as usize..]
        )
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// `format_sig` at the crate-wide default precision.
pub fn sig15(x: f64) -> String {
    format_sig(x, SIG_DIGITS)
}

/// JSON fragment for a 2x2 real matrix: `[[a,b],[c,d]]` at 15 digits.
pub fn json_mat2(rows: &[[f64; 2]; 2]) -> String {
    format!(
        "[[{},{}],[{},{}]]",
        sig15(rows[0][0]),
        sig15(rows[0][1]),
        sig15(rows[1][0]),
        sig15(rows[1][1])
    )
}

/// JSON array of reals at 15 digits.
pub fn json_f64_array(values: &[f64]) -> String {
    let items: Vec<String> = values.iter().map(|&v| sig15(v)).collect();
    format!("[{}]", items.join(","))
}
