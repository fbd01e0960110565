//! Fixed-precision number formatting for text and CSV output.

/// Format `x` with 17 significant digits, which is enough to round-trip any `f64`.
///
/// Plain decimal notation is used for moderate exponents, scientific otherwise.
pub fn sig17(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0".into() } else { "0.0".into() };
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..=16).contains(&exp) {
        return sci;
    }
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    if exp < 0 {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp - 1) as usize));
        out.push_str(&digits);
    } else {
        let split = exp as usize + 1;
        out.push_str(&digits[..split]);
        out.push('.');
        let frac = &digits[split..];
        out.push_str(if frac.is_empty() { "0" } else { frac });
    }
    out
}
