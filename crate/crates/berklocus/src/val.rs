//! Exact rational valuations and log-radii.
//!
//! Valuations of tower elements, Newton polygon slopes and type-2 log-radii
//! (rlog = log_p r) are all small exact rationals; `Val` is the shared alias.

use num_rational::Ratio;
use std::fmt;

pub type Val = Ratio<i64>;

pub fn val_int(n: i64) -> Val {
    Val::from_integer(n)
}

/// A rational valuation or +infinity (the valuation of exact zero).
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum ValOrInf {
    Finite(Val),
    Infinite,
}

impl ValOrInf {
    pub fn finite(self) -> Option<Val> {
        match self {
            ValOrInf::Finite(v) => Some(v),
            ValOrInf::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ValOrInf::Infinite)
    }

    pub fn min(self, other: ValOrInf) -> ValOrInf {
        match (self, other) {
            (ValOrInf::Infinite, o) => o,
            (s, ValOrInf::Infinite) => s,
            (ValOrInf::Finite(a), ValOrInf::Finite(b)) => ValOrInf::Finite(a.min(b)),
        }
    }
}

impl PartialOrd for ValOrInf {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ValOrInf {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (ValOrInf::Infinite, ValOrInf::Infinite) => Equal,
            (ValOrInf::Infinite, _) => Greater,
            (_, ValOrInf::Infinite) => Less,
            (ValOrInf::Finite(a), ValOrInf::Finite(b)) => a.cmp(b),
        }
    }
}

impl fmt::Debug for ValOrInf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValOrInf::Finite(v) => write!(f, "{v}"),
            ValOrInf::Infinite => write!(f, "inf"),
        }
    }
}

/// Render a rational as "a" or "a/b" (never a float).
pub fn fmt_val(v: Val) -> String {
    if v.denom() == &1 {
        format!("{}", v.numer())
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}
