//! Deterministic significant-digit formatting for reports and tables.
//!
//! All user-facing numbers go through [`format_significant`], which mimics
//! C's `%g`: round to a given number of significant digits, drop trailing
//! zeros, and switch to exponent notation only when the magnitude makes
//! positional notation unwieldy. The output is a pure function of the value,
//! which keeps serialized artifacts byte-reproducible.

/// Format `x` with `digits` significant digits, `%g`-style.
///
/// Positional notation is used when the decimal exponent is in
/// `-4..digits`; otherwise exponent notation (`1.5e-7`). Trailing zeros and
/// a dangling decimal point are trimmed. Zero formats as `"0"`.
pub fn format_significant(x: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }

    // Rust's exponent formatting gives a normalized mantissa with exactly
    // `digits` significant digits; reassemble from there.
    let formatted = format!("{:.*e}", digits - 1, x);
    let (mantissa, exponent) = formatted
        .split_once('e')
        .expect("exponent formatting always contains 'e'");
    let exp: i32 = exponent.parse().expect("valid exponent");
    let negative = mantissa.starts_with('-');
    let digit_chars: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();

    let body = if exp >= -4 && (exp as i64) < digits as i64 {
        positional(&digit_chars, exp)
    } else {
        let trimmed = trim_fraction(&digit_chars);
        format!("{trimmed}e{exp}")
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

/// Lay out significant digits positionally for decimal exponent `exp`.
fn positional(digits: &str, exp: i32) -> String {
    if exp >= 0 {
        let int_len = exp as usize + 1;
        let (int_part, frac_part) = if digits.len() <= int_len {
            let padded = format!("{digits:0<int_len$}");
            (padded, String::new())
        } else {
            (
                digits[..int_len].to_string(),
                digits[int_len..].trim_end_matches('0').to_string(),
            )
        };
        if frac_part.is_empty() {
            int_part
        } else {
            format!("{int_part}.{frac_part}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        let frac = format!("{zeros}{digits}");
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            "0".to_string()
        } else {
            format!("0.{frac}")
        }
    }
}

/// Render significant digits as `d.ddd` with trailing zeros removed.
fn trim_fraction(digits: &str) -> String {
    let (head, tail) = digits.split_at(1);
    let tail = tail.trim_end_matches('0');
    if tail.is_empty() {
        head.to_string()
    } else {
        format!("{head}.{tail}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_and_specials() {
        assert_eq!(format_significant(0.0, 9), "0");
        assert_eq!(format_significant(-0.0, 9), "0");
        assert_eq!(format_significant(f64::NAN, 9), "nan");
        assert_eq!(format_significant(f64::INFINITY, 9), "inf");
        assert_eq!(format_significant(f64::NEG_INFINITY, 9), "-inf");
    }

    #[test]
    fn positional_range() {
        assert_eq!(format_significant(0.25, 9), "0.25");
        assert_eq!(format_significant(1.0, 9), "1");
        assert_eq!(format_significant(-1.5, 9), "-1.5");
        assert_eq!(format_significant(100.0, 3), "100");
        assert_eq!(format_significant(123456.789, 9), "123456.789");
        assert_eq!(format_significant(0.0001234, 9), "0.0001234");
        assert_eq!(format_significant(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_significant(2.0 / 3.0, 9), "0.666666667");
    }

    #[test]
    fn exponent_range() {
        assert_eq!(format_significant(123456.789, 4), "1.235e5");
        assert_eq!(format_significant(1.23e-7, 3), "1.23e-7");
        assert_eq!(format_significant(-9.999e-12, 2), "-1e-11");
        assert_eq!(format_significant(1e20, 9), "1e20");
    }

    #[test]
    fn rounding_carries_across_magnitude() {
        assert_eq!(format_significant(999.96, 4), "1000");
        assert_eq!(format_significant(0.99999, 3), "1");
        assert_eq!(format_significant(9.999e99, 2), "1e100");
    }

    #[test]
    fn twelve_digit_report_precision() {
        assert_eq!(
            format_significant(0.760943012470, 12),
            "0.76094301247"
        );
        assert_eq!(format_significant(0.5, 12), "0.5");
    }
}
