//! Property parameters: `key=value` pairs supplied on the command line or in
//! a params file.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::PropertyError;
use crate::decimal::DecimalReal;
use crate::smt::Term;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParamValue {
    Int(i64),
    Decimal(DecimalReal),
    /// `p/q` with `q > 0`.
    Fraction(i64, u64),
}

impl ParamValue {
    /// Exact value as `(numerator, denominator)`, not necessarily reduced.
    pub fn to_rational(&self) -> Option<(i128, u128)> {
        match self {
            ParamValue::Int(v) => Some((*v as i128, 1)),
            ParamValue::Fraction(p, q) => Some((*p as i128, *q as u128)),
            ParamValue::Decimal(d) => {
                let (num, scale) = d.to_scaled()?;
                Some((num, 10u128.checked_pow(scale)?))
            }
        }
    }

    pub fn to_decimal(&self) -> Option<DecimalReal> {
        match self {
            ParamValue::Int(v) => Some(DecimalReal::from_int(*v)),
            ParamValue::Decimal(d) => Some(d.clone()),
            ParamValue::Fraction(..) => None,
        }
    }

    pub fn to_integer(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            ParamValue::Decimal(d) if d.is_integer() => d.to_string().parse().ok(),
            _ => None,
        }
    }

    pub fn is_integral(&self) -> bool {
        self.to_integer().is_some()
    }

    /// Numeral of integer sort. Only meaningful when `is_integral()`.
    pub fn int_term(&self) -> Option<Term> {
        self.to_integer().map(|v| Term::Int(v as i128))
    }

    /// Numeral of real sort.
    pub fn real_term(&self) -> Term {
        match self {
            ParamValue::Int(v) => Term::real(DecimalReal::from_int(*v)),
            ParamValue::Decimal(d) => Term::real(d.clone()),
            ParamValue::Fraction(p, q) => Term::App(
                "/",
                vec![Term::real(DecimalReal::from_int(*p)), Term::real(DecimalReal::from_int(*q as i64))],
            ),
        }
    }
}

impl FromStr for ParamValue {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: i64 = p.trim().parse().map_err(|_| format!("invalid fraction `{s}`"))?;
            let q: u64 = q.trim().parse().map_err(|_| format!("invalid fraction `{s}`"))?;
            if q == 0 {
                return Err(format!("zero denominator in `{s}`"));
            }
            return Ok(ParamValue::Fraction(p, q));
        }
        if let Ok(v) = s.parse::<i64>() {
            return Ok(ParamValue::Int(v));
        }
        s.parse::<DecimalReal>()
            .map(ParamValue::Decimal)
            .map_err(|e| e.to_string())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Decimal(d) => write!(f, "{d}"),
            ParamValue::Fraction(p, q) => write!(f, "{p}/{q}"),
        }
    }
}

pub type ParamMap = BTreeMap<String, ParamValue>;

fn is_identifier(key: &str) -> bool {
    let mut chars = key.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Parses a single `key=value` assignment.
pub fn parse_assignment(text: &str) -> Result<(String, ParamValue), PropertyError> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| PropertyError::InvalidParam {
            name: text.to_string(),
            reason: "expected key=value".into(),
        })?;
    let key = key.trim();
    if !is_identifier(key) {
        return Err(PropertyError::InvalidParam {
            name: key.to_string(),
            reason: "keys must be bare identifiers".into(),
        });
    }
    let value = value.parse().map_err(|reason| PropertyError::InvalidParam {
        name: key.to_string(),
        reason,
    })?;
    Ok((key.to_string(), value))
}

/// Parses a params file: one `key=value` per line, `#` starts a comment.
pub fn parse_params(text: &str) -> Result<ParamMap, PropertyError> {
    let mut map = ParamMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = parse_assignment(line)?;
        map.insert(k, v);
    }
    Ok(map)
}
