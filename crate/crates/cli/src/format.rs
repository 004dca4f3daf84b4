//! Fixed float formatting shared by every output file: six significant
//! digits, `%g` style.

pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let fixed = format!("{:.*}", (5 - exp) as usize, x);
        trim_zeros(&fixed).to_string()
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to six significant digits.
pub fn round6(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    sig6(x).parse().expect("sig6 output parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(-0.0), "0");
        assert_eq!(sig6(1.0), "1");
        assert_eq!(sig6(21.0), "21");
        assert_eq!(sig6(132.5739), "132.574");
        assert_eq!(sig6(1_492_992_000.0), "1.49299e9");
        assert_eq!(sig6(11_943_936_000.0), "1.19439e10");
        assert_eq!(sig6(-70.6554), "-70.6554");
        assert_eq!(sig6(0.000123456789), "0.000123457");
        assert_eq!(sig6(0.0000123456789), "1.23457e-5");
        assert_eq!(sig6(999_999.6), "1e6");
        assert_eq!(sig6(99_999.96), "100000");
        assert_eq!(sig6(0.1327104), "0.13271");
        assert_eq!(sig6(f64::INFINITY), "inf");
    }

    #[test]
    fn rounding() {
        assert_eq!(round6(1_492_992_000.0), 1_492_990_000.0);
        assert_eq!(round6(1038.0000000001), 1038.0);
    }
}
