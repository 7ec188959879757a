//! Nonnegative extended reals `[0, ∞]`.
//!
//! Arithmetic follows the measure-theoretic conventions: `x + ∞ = ∞`,
//! `c · ∞ = ∞` for `c > 0` and `0 · ∞ = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use serde::{Serialize, Serializer};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtReal(f64);

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("not a nonnegative extended real: {0}")]
pub struct ExtRealError(pub String);

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal(0.0);
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);

    /// Panics on negative or NaN input; use [`ExtReal::try_new`] for untrusted values.
    pub fn new(x: f64) -> Self {
        Self::try_new(x).expect("ExtReal must be nonnegative and not NaN")
    }

    pub fn try_new(x: f64) -> Result<Self, ExtRealError> {
        if x.is_nan() || x < 0.0 {
            Err(ExtRealError(x.to_string()))
        } else {
            Ok(ExtReal(x))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }
}

/// Product with the convention `0 · ∞ = 0`; inputs are assumed nonnegative.
pub fn mul0(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        a * b
    }
}

/// Quotient used by ratio checks: `0/0` is `None` (skipped), `x/0` is `∞` for `x > 0`,
/// and `∞/∞` is `None` as well since both sides sit past the blow-up point.
pub fn ratio(num: f64, den: f64) -> Option<f64> {
    match (num == 0.0, den == 0.0) {
        (true, true) => None,
        (false, true) => Some(f64::INFINITY),
        _ if num.is_infinite() && den.is_infinite() => None,
        _ => Some(num / den),
    }
}

/// Formats a float, writing `inf` for `+∞`.
pub fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x}")
    }
}

/// Parses a decimal literal or `inf`.
pub fn parse_f64(s: &str) -> Option<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "Inf" | "INF" | "infinity" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => {
            let lower = t.to_ascii_lowercase();
            // reject nan, hex and the like; only plain decimal/scientific literals
            if lower.contains("nan") || lower.starts_with("0x") || t.is_empty() {
                return None;
            }
            t.parse::<f64>().ok()
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;
    fn add(self, rhs: ExtReal) -> ExtReal {
        ExtReal(self.0 + rhs.0)
    }
}

impl Mul for ExtReal {
    type Output = ExtReal;
    fn mul(self, rhs: ExtReal) -> ExtReal {
        ExtReal(mul0(self.0, rhs.0))
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl From<ExtReal> for f64 {
    fn from(x: ExtReal) -> f64 {
        x.0
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_f64(self.0))
    }
}

impl FromStr for ExtReal {
    type Err = ExtRealError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let x = parse_f64(s).ok_or_else(|| ExtRealError(s.to_string()))?;
        ExtReal::try_new(x)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serialize_f64(&self.0, s)
    }
}

/// JSON has no infinity; extended reals are written as numbers or the string `"inf"`.
pub fn serialize_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&fmt_f64(*x))
    }
}

pub fn serialize_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => serialize_f64(v, s),
        None => s.serialize_none(),
    }
}

pub fn serialize_vec_f64<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        if x.is_finite() {
            seq.serialize_element(x)?;
        } else {
            seq.serialize_element(&fmt_f64(*x))?;
        }
    }
    seq.end()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conventions() {
        let inf = ExtReal::INFINITY;
        assert_eq!(ExtReal::new(3.0) + inf, inf);
        assert_eq!(ExtReal::new(2.0) * inf, inf);
        assert_eq!(ExtReal::ZERO * inf, ExtReal::ZERO);
        assert_eq!(inf * ExtReal::ZERO, ExtReal::ZERO);
    }

    #[test]
    fn rejects_negative_and_nan() {
        assert!(ExtReal::try_new(-1.0).is_err());
        assert!(ExtReal::try_new(f64::NAN).is_err());
        assert!("nan".parse::<ExtReal>().is_err());
        assert!("-2".parse::<ExtReal>().is_err());
    }

    #[test]
    fn parse_and_display_round_trip() {
        let x: ExtReal = "inf".parse().unwrap();
        assert!(x.is_infinite());
        assert_eq!(x.to_string(), "inf");
        let y: ExtReal = "2.5e-3".parse().unwrap();
        assert_eq!(y.value(), 2.5e-3);
    }

    #[test]
    fn ratio_rules() {
        assert_eq!(ratio(0.0, 0.0), None);
        assert_eq!(ratio(1.0, 0.0), Some(f64::INFINITY));
        assert_eq!(ratio(f64::INFINITY, f64::INFINITY), None);
        assert_eq!(ratio(4.0, 2.0), Some(2.0));
    }
}
