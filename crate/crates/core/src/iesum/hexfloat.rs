//! Bit-exact hexadecimal float round-trip for the cache file (C99 `%a` form).

/// Format a finite `f64` as `[-]0x1.<13 hex digits>p<exp>` (or `0x0p+0`).
pub fn format_hex_f64(x: f64) -> String {
    assert!(x.is_finite(), "cache values must be finite");
    if x == 0.0 {
        return if x.is_sign_negative() {
            "-0x0p+0".into()
        } else {
            "0x0p+0".into()
        };
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (lead, exp, mantissa) = if biased == 0 {
        // subnormal: value = 0.frac * 2^-1022
        (0, -1022, frac)
    } else {
        (1, biased - 1023, frac)
    };
    format!("{sign}0x{lead}.{mantissa:013x}p{exp:+}")
}

/// Parse the formatter's output (and general C99 hex floats with up to 13
/// fractional hex digits).
pub fn parse_hex_f64(s: &str) -> Option<f64> {
    let (sign, rest) = match s.strip_prefix('-') {
        Some(r) => (-1.0, r),
        None => (1.0, s.strip_prefix('+').unwrap_or(s)),
    };
    let rest = rest.strip_prefix("0x").or_else(|| rest.strip_prefix("0X"))?;
    let p = rest.find(['p', 'P'])?;
    let (mant_str, exp_str) = (&rest[..p], &rest[p + 1..]);
    let exp: i32 = exp_str.parse().ok()?;
    let (int_str, frac_str) = match mant_str.find('.') {
        Some(d) => (&mant_str[..d], &mant_str[d + 1..]),
        None => (mant_str, ""),
    };
    if int_str.is_empty() && frac_str.is_empty() {
        return None;
    }
    let mut mant: u64 = if int_str.is_empty() {
        0
    } else {
        u64::from_str_radix(int_str, 16).ok()?
    };
    for c in frac_str.chars() {
        mant = mant.checked_mul(16)?.checked_add(c.to_digit(16)? as u64)?;
    }
    // value = mant * 2^(exp - 4*len(frac)); mant < 2^57 is exact in f64.
    let shift = exp - 4 * frac_str.len() as i32;
    Some(sign * mant as f64 * 2f64.powi(shift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_values() {
        assert_eq!(format_hex_f64(2.0), "0x1.0000000000000p+1");
        assert_eq!(format_hex_f64(1.0), "0x1.0000000000000p+0");
        assert_eq!(parse_hex_f64("0x1.0000000000000p+1"), Some(2.0));
        assert_eq!(parse_hex_f64("0x1.8p+1"), Some(3.0));
        assert_eq!(parse_hex_f64("-0x1.8p-1"), Some(-0.75));
        assert_eq!(parse_hex_f64("0x0p+0"), Some(0.0));
        assert!(parse_hex_f64("1.5").is_none());
        assert!(parse_hex_f64("0x1.zzp+0").is_none());
    }

    proptest! {
        #[test]
        fn roundtrip_is_bit_exact(bits in 0u64..(0x7ffu64 << 52)) {
            // Any finite positive bit pattern (exponent field below all-ones).
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let s = format_hex_f64(x);
            let back = parse_hex_f64(&s).unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits(), "{}", s);
        }
    }
}
