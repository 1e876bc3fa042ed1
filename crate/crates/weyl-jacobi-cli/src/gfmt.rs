//! Shortest-faithful float formatting: the classic `%.17g` rendering, so
//! that reports and CSV files are byte-stable across runs and platforms
//! and every double survives a parse round trip.

/// Format with 17 significant digits, trailing zeros stripped, C-style
/// `%g` switch between fixed and scientific notation. Non-finite values
/// render as the sentinels `inf`, `-inf`, `nan`.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_owned();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf" } else { "inf" }.to_owned();
    }
    // The exponent after rounding to 17 significant digits picks the style.
    let sci = format!("{:.16e}", x);
    let epos = sci.find('e').expect("scientific form");
    let exp: i32 = sci[epos + 1..].parse().expect("exponent");
    if (-4..17).contains(&exp) {
        strip_zeros(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        let mantissa = strip_zeros(sci[..epos].to_owned());
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", mantissa, sign, exp.abs())
    }
}

fn strip_zeros(mut s: String) -> String {
    if s.contains('.') {
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    }
    s
}
