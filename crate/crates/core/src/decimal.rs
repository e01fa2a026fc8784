//! Exact decimal reals.
//!
//! Dataset values are kept as the decimal digits that were read, never as
//! binary floats, so the numerals emitted into SMT-LIB denote exactly the
//! values in the source file.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use thiserror::Error;

/// Exponents beyond this magnitude are rejected instead of expanded.
const MAX_EXPONENT: i64 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecimalError {
    #[error("empty numeral")]
    Empty,
    #[error("invalid numeral `{0}`")]
    Invalid(String),
    #[error("exponent out of range in `{0}`")]
    ExponentRange(String),
}

/// A finite decimal number stored in normalized form.
///
/// `int_digits` has no leading zeros (it is `"0"` for values below one) and
/// `frac_digits` has no trailing zeros. Zero is never negative. With those
/// rules structural equality coincides with numeric equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DecimalReal {
    negative: bool,
    int_digits: String,
    frac_digits: String,
}

impl DecimalReal {
    pub fn zero() -> Self {
        DecimalReal {
            negative: false,
            int_digits: "0".to_string(),
            frac_digits: String::new(),
        }
    }

    pub fn from_int(v: i64) -> Self {
        let negative = v < 0;
        Self::from_parts(negative, &v.unsigned_abs().to_string(), "")
    }

    fn from_parts(negative: bool, int_digits: &str, frac_digits: &str) -> Self {
        let int = int_digits.trim_start_matches('0');
        let frac = frac_digits.trim_end_matches('0');
        let int = if int.is_empty() { "0" } else { int };
        let is_zero = int == "0" && frac.is_empty();
        DecimalReal {
            negative: negative && !is_zero,
            int_digits: int.to_string(),
            frac_digits: frac.to_string(),
        }
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    pub fn is_zero(&self) -> bool {
        self.int_digits == "0" && self.frac_digits.is_empty()
    }

    pub fn is_integer(&self) -> bool {
        self.frac_digits.is_empty()
    }

    pub fn int_digits(&self) -> &str {
        &self.int_digits
    }

    pub fn frac_digits(&self) -> &str {
        &self.frac_digits
    }

    pub fn neg(&self) -> Self {
        Self::from_parts(!self.negative, &self.int_digits, &self.frac_digits)
    }

    pub fn abs(&self) -> Self {
        Self::from_parts(false, &self.int_digits, &self.frac_digits)
    }

    /// Nearest binary float. Only used by numeric oracles, never by the encoder.
    pub fn to_f64(&self) -> f64 {
        self.to_string().parse().unwrap_or(f64::NAN)
    }

    /// Exact value as `numerator / 10^scale`, if the digits fit in 128 bits.
    pub fn to_scaled(&self) -> Option<(i128, u32)> {
        let digits = format!("{}{}", self.int_digits, self.frac_digits);
        let mag: i128 = digits.parse().ok()?;
        let scale = u32::try_from(self.frac_digits.len()).ok()?;
        10i128.checked_pow(scale)?;
        Some((if self.negative { -mag } else { mag }, scale))
    }

    /// SMT-LIB numeral: a decimal with an explicit fractional part, negatives
    /// wrapped as `(- x)` since SMT-LIB has no negative literals.
    pub fn to_smtlib(&self) -> String {
        let frac = if self.frac_digits.is_empty() {
            "0"
        } else {
            &self.frac_digits
        };
        let body = format!("{}.{}", self.int_digits, frac);
        if self.negative {
            format!("(- {body})")
        } else {
            body
        }
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        self.int_digits
            .len()
            .cmp(&other.int_digits.len())
            .then_with(|| self.int_digits.cmp(&other.int_digits))
            .then_with(|| {
                let width = self.frac_digits.len().max(other.frac_digits.len());
                let a = format!("{:0<width$}", self.frac_digits);
                let b = format!("{:0<width$}", other.frac_digits);
                a.cmp(&b)
            })
    }
}

impl Ord for DecimalReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.negative, other.negative) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_magnitude(other),
            (true, true) => other.cmp_magnitude(self),
        }
    }
}

impl PartialOrd for DecimalReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for DecimalReal {
    type Err = DecimalError;

    /// Accepts `[+-]digits[.digits][(e|E)[+-]digits]`, with digits required on
    /// at least one side of the point.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        if text.is_empty() {
            return Err(DecimalError::Empty);
        }
        let invalid = || DecimalError::Invalid(text.to_string());

        let (negative, rest) = match text.as_bytes()[0] {
            b'-' => (true, &text[1..]),
            b'+' => (false, &text[1..]),
            _ => (false, text),
        };
        let (mantissa, exponent) = match rest.find(['e', 'E']) {
            Some(pos) => (&rest[..pos], Some(&rest[pos + 1..])),
            None => (rest, None),
        };
        let (int_part, frac_part) = match mantissa.find('.') {
            Some(pos) => (&mantissa[..pos], &mantissa[pos + 1..]),
            None => (mantissa, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(invalid());
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
        {
            return Err(invalid());
        }

        let exp: i64 = match exponent {
            None => 0,
            Some(e) => {
                let digits = e.strip_prefix(['+', '-']).unwrap_or(e);
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(invalid());
                }
                let value: i64 = e
                    .parse()
                    .map_err(|_| DecimalError::ExponentRange(text.to_string()))?;
                if value.abs() > MAX_EXPONENT {
                    return Err(DecimalError::ExponentRange(text.to_string()));
                }
                value
            }
        };

        // Shift the decimal point by `exp` places over the full digit string.
        let digits = format!("{int_part}{frac_part}");
        let point = int_part.len() as i64 + exp;
        let (int_digits, frac_digits) = if point <= 0 {
            let zeros = "0".repeat(point.unsigned_abs() as usize);
            ("0".to_string(), format!("{zeros}{digits}"))
        } else if point as usize >= digits.len() {
            let zeros = "0".repeat(point as usize - digits.len());
            (format!("{digits}{zeros}"), String::new())
        } else {
            let (a, b) = digits.split_at(point as usize);
            (a.to_string(), b.to_string())
        };
        Ok(Self::from_parts(negative, &int_digits, &frac_digits))
    }
}

impl fmt::Display for DecimalReal {
    /// Plain decimal notation, e.g. `-0.092742` or `3`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            f.write_str("-")?;
        }
        f.write_str(&self.int_digits)?;
        if !self.frac_digits.is_empty() {
            write!(f, ".{}", self.frac_digits)?;
        }
        Ok(())
    }
}

impl Serialize for DecimalReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl From<i64> for DecimalReal {
    fn from(v: i64) -> Self {
        DecimalReal::from_int(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(s: &str) -> DecimalReal {
        s.parse().unwrap()
    }

    #[test]
    fn normalizes_forms() {
        assert_eq!(d("1.50"), d("1.5"));
        assert_eq!(d("-0"), DecimalReal::zero());
        assert_eq!(d("+007"), d("7"));
        assert_eq!(d(".5").to_string(), "0.5");
        assert_eq!(d("5.").to_string(), "5");
        assert_eq!(d("1e-3").to_string(), "0.001");
        assert_eq!(d("-1.25E2").to_string(), "-125");
        assert_eq!(d("12.5e1").to_string(), "125");
        assert_eq!(d("0.0e5").to_string(), "0");
    }

    #[test]
    fn rejects_garbage() {
        for bad in ["", "a", "1.2.3", "-", ".", "1e", "1e+", "nan", "inf", "1,5", "--1", "1e99999"] {
            assert!(bad.parse::<DecimalReal>().is_err(), "{bad}");
        }
    }

    #[test]
    fn smtlib_numerals() {
        assert_eq!(DecimalReal::zero().to_smtlib(), "0.0");
        assert_eq!(d("0.051267").to_smtlib(), "0.051267");
        assert_eq!(d("-0.092742").to_smtlib(), "(- 0.092742)");
        assert_eq!(d("1").to_smtlib(), "1.0");
        assert_eq!(d("-1").to_smtlib(), "(- 1.0)");
    }

    #[test]
    fn ordering() {
        assert!(d("-0.092742") < d("0"));
        assert!(d("-1") < d("-0.5"));
        assert!(d("0.1") < d("0.10001"));
        assert!(d("9.99") < d("10"));
        assert_eq!(d("2.50").cmp(&d("2.5")), Ordering::Equal);
    }

    #[test]
    fn scaled() {
        assert_eq!(d("-1.25").to_scaled(), Some((-125, 2)));
        assert_eq!(d("3").to_scaled(), Some((3, 0)));
    }

    fn smt_to_plain(s: &str) -> String {
        match s.strip_prefix("(- ").and_then(|r| r.strip_suffix(')')) {
            Some(inner) => format!("-{inner}"),
            None => s.to_string(),
        }
    }

    proptest! {
        #[test]
        fn display_round_trips(neg in any::<bool>(), int in 0u64..1_000_000, frac in "[0-9]{0,8}") {
            let text = format!("{}{}.{}", if neg { "-" } else { "" }, int, frac);
            let v = d(&text);
            prop_assert_eq!(d(&v.to_string()), v.clone());
            prop_assert_eq!(d(&smt_to_plain(&v.to_smtlib())), v);
        }

        #[test]
        fn order_matches_float(a in -1000i32..1000, b in -1000i32..1000) {
            let x = d(&format!("{}", a as f64 / 100.0));
            let y = d(&format!("{}", b as f64 / 100.0));
            prop_assert_eq!(x.cmp(&y), a.cmp(&b));
        }
    }
}
