//! Stable numeric formatting for CSV and console output.
//!
//! All emitted numbers use a fixed number of significant digits so that
//! repeated runs produce byte-identical files.

/// Format with `sig` significant digits, `%g` style: plain decimal notation
/// for moderate exponents, scientific otherwise, trailing zeros trimmed.
pub fn fmt_sig(x: f64, sig: usize) -> String {
    assert!(sig >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", sig - 1, x);
    let (_, exp_str) = sci.split_once('e').expect("exponential format");
    let exp: i32 = exp_str.parse().expect("exponent");
    if exp < -4 || exp >= sig as i32 {
        let (mant, _) = sci.split_once('e').expect("exponential format");
        format!("{}e{}", trim_zeros(mant), exp)
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    }
}

/// Ten significant digits, the crate-wide convention for numeric output.
pub fn fmt10(x: f64) -> String {
    fmt_sig(x, 10)
}

fn trim_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    t.to_string()
}
