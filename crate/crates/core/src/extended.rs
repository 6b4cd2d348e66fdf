//! Reals extended with a `+∞` marker.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A real number or `+∞`. Never NaN, never `−∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    pub const ZERO: ExtendedReal = ExtendedReal::Finite(0.0);

    /// Converts a float, mapping `f64::INFINITY` to the marker.
    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() {
            Err(Error::NotANumber("extended real"))
        } else if value == f64::INFINITY {
            Ok(ExtendedReal::PosInf)
        } else if value == f64::NEG_INFINITY {
            Err(Error::Domain {
                what: "extended real",
                expected: "greater than -inf",
                value,
            })
        } else {
            Ok(ExtendedReal::Finite(value))
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The float view; `+∞` becomes `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => v,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::PosInf => None,
        }
    }

    pub fn scale(self, factor: f64) -> Result<Self> {
        match self {
            ExtendedReal::Finite(v) => ExtendedReal::new(v * factor),
            ExtendedReal::PosInf if factor > 0.0 => Ok(ExtendedReal::PosInf),
            ExtendedReal::PosInf if factor == 0.0 => Ok(ExtendedReal::ZERO),
            ExtendedReal::PosInf => Err(Error::Domain {
                what: "scale factor for +inf",
                expected: "nonnegative",
                value: factor,
            }),
        }
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedReal::PosInf, ExtendedReal::PosInf) => Ordering::Equal,
            (ExtendedReal::PosInf, _) => Ordering::Greater,
            (_, ExtendedReal::PosInf) => Ordering::Less,
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.total_cmp(b),
        }
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => {
                // a + b of two finite floats can overflow to +inf but never NaN.
                let s = a + b;
                if s == f64::INFINITY {
                    ExtendedReal::PosInf
                } else {
                    ExtendedReal::Finite(s)
                }
            }
            _ => ExtendedReal::PosInf,
        }
    }
}

impl From<ExtendedReal> for f64 {
    fn from(v: ExtendedReal) -> f64 {
        v.to_f64()
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::PosInf => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("+inf") {
            return Ok(ExtendedReal::PosInf);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("not a number: {t:?}")))?;
        ExtendedReal::new(v)
    }
}
