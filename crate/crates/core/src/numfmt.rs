//! Shortest `%g`-style rendering with a fixed number of significant digits.
//!
//! Both the vector files and the phrase tables store reals this way, so a
//! value like `0.5` is written as `0.5` and `1e-05` keeps the C exponent form
//! that Moses tooling emits.

/// Significant digits used by every text format in this crate.
pub const SIGNIFICANT_DIGITS: usize = 6;

/// Render `x` like C's `printf("%.6g", x)`.
pub fn format_sig6(x: f64) -> String {
    format_sig(x, SIGNIFICANT_DIGITS)
}

/// Render `x` like C's `printf("%.*g", digits, x)`.
pub fn format_sig(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    // Round once in scientific form; the exponent of the rounded value
    // decides between fixed and exponent notation.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
