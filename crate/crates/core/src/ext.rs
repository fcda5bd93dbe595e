//! Extended reals: the codomain of every Rockafellian.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linrat::{format_rational, Rational};

/// A value in `R ∪ {-inf, +inf}` over a finite scalar type `T`.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtReal<T = f64> {
    NegInf,
    Finite(T),
    PosInf,
}

impl<T> ExtReal<T> {
    pub fn is_finite(&self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(&self) -> Option<&T> {
        match self {
            ExtReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> ExtReal<U> {
        match self {
            ExtReal::NegInf => ExtReal::NegInf,
            ExtReal::Finite(v) => ExtReal::Finite(f(v)),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }

    pub fn neg(self) -> ExtReal<T>
    where
        T: std::ops::Neg<Output = T>,
    {
        match self {
            ExtReal::NegInf => ExtReal::PosInf,
            ExtReal::Finite(v) => ExtReal::Finite(-v),
            ExtReal::PosInf => ExtReal::NegInf,
        }
    }
}

impl<T: Add<Output = T>> ExtReal<T> {
    /// `(+inf) + (-inf)` is rejected; every other sum follows the usual rules.
    pub fn checked_add(self, other: ExtReal<T>) -> Result<ExtReal<T>> {
        use ExtReal::*;
        match (self, other) {
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::IndeterminateSum),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
        }
    }

    pub fn add_finite(self, r: T) -> ExtReal<T> {
        self.map(|v| v + r)
    }
}

impl<T: PartialOrd> PartialOrd for ExtReal<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        use ExtReal::*;
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) | (_, PosInf) => Some(Ordering::Less),
            (_, NegInf) | (PosInf, _) => Some(Ordering::Greater),
            (Finite(a), Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl ExtReal<f64> {
    /// Maps infinities of an `f64` onto the extended variants.
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else if v == f64::NEG_INFINITY {
            ExtReal::NegInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => *v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl ExtReal<Rational> {
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match self {
            ExtReal::NegInf => f64::NEG_INFINITY,
            ExtReal::Finite(v) => v.to_f64().unwrap_or(f64::NAN),
            ExtReal::PosInf => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtReal<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

impl fmt::Display for ExtReal<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::NegInf => f.write_str("-inf"),
            ExtReal::Finite(v) => f.write_str(&format_rational(v)),
            ExtReal::PosInf => f.write_str("+inf"),
        }
    }
}

// Reports carry extended reals as strings so that infinities survive JSON.
impl Serialize for ExtReal<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Serialize for ExtReal<Rational> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
