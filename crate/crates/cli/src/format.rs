//! Deterministic number formatting: 12 significant digits, fixed notation
//! for |x| in [1e-3, 1e6], scientific otherwise, so identical requests
//! always produce byte-identical output.

pub fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".to_string()
        } else if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        };
    }
    let ax = x.abs();
    if (1e-3..=1e6).contains(&ax) {
        let magnitude = ax.log10().floor() as i32;
        let decimals = (11 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

#[cfg(test)]
mod tests {
    use super::sig12;

    #[test]
    fn fixed_range_keeps_twelve_significant_digits() {
        assert_eq!(sig12(0.5), "0.500000000000");
        assert_eq!(sig12(2.0 * std::f64::consts::LN_2), "1.38629436112");
        assert_eq!(sig12(-1.5), "-1.50000000000");
        assert_eq!(sig12(999999.25), "999999.250000");
        assert_eq!(sig12(0.001), "0.00100000000000");
        assert_eq!(sig12(1e6), "1000000.00000");
    }

    #[test]
    fn outside_range_is_scientific() {
        assert_eq!(sig12(1.5e-7), "1.50000000000e-7");
        assert_eq!(sig12(-2.5e8), "-2.50000000000e8");
        assert_eq!(sig12(9.999e-4), "9.99900000000e-4");
    }

    #[test]
    fn zero_and_non_finite() {
        assert_eq!(sig12(0.0), "0");
        assert_eq!(sig12(-0.0), "0");
        assert_eq!(sig12(f64::INFINITY), "inf");
        assert_eq!(sig12(f64::NAN), "nan");
    }
}
