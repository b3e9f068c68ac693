//! Decimal rendering of floats with 17 significant digits, enough to
//! round-trip every `f64` exactly.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `%.17g`-style rendering: positional for moderate exponents, scientific
/// otherwise, trailing zeros trimmed.
pub fn sig17(x: f64) -> String {
    assert!(x.is_finite(), "cannot render non-finite value {x}");
    if x == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let negative = mantissa.starts_with('-');
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let sign = if negative { "-" } else { "" };
    if (-5..17).contains(&exp) {
        let body = if exp >= 0 {
            let split = exp as usize + 1;
            let (int, frac) = digits.split_at(split);
            let frac = frac.trim_end_matches('0');
            if frac.is_empty() {
                int.to_string()
            } else {
                format!("{int}.{frac}")
            }
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            format!("0.{zeros}{}", digits.trim_end_matches('0'))
        };
        format!("{sign}{body}")
    } else {
        let (lead, rest) = digits.split_at(1);
        let rest = rest.trim_end_matches('0');
        if rest.is_empty() {
            format!("{sign}{lead}e{exp}")
        } else {
            format!("{sign}{lead}.{rest}e{exp}")
        }
    }
}

/// Serializes as a JSON number rendered by [`sig17`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        RawValue::from_string(sig17(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_like_g17() {
        assert_eq!(sig17(1.0), "1");
        assert_eq!(sig17(-0.25), "-0.25");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(1e-7), "9.9999999999999995e-8");
        assert_eq!(sig17(1e20), "1e20");
        assert_eq!(sig17(4.0 / 3.0), "1.3333333333333333");
    }

    proptest! {
        #[test]
        fn round_trips(x in prop::num::f64::NORMAL) {
            let s = sig17(x);
            prop_assert_eq!(s.parse::<f64>().unwrap(), x);
            let v: serde_json::Value = serde_json::from_str(&s).unwrap();
            prop_assert_eq!(v.as_f64().unwrap(), x);
        }
    }
}
