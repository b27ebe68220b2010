//! Extended integers: `ℤ ∪ {-∞, +∞}`.
//!
//! Used for constraint values, edge weights and distances. The only undefined
//! sum is `-∞ + +∞`, which is a domain error and never a silent saturation.

use core::cmp::Ordering;
use core::fmt;

use crate::Time;

/// An element of `ℤ ∪ {-∞, +∞}`.
///
/// The derived order is total: `NegInf < Finite(n) < PosInf` for every `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtendedDelta {
    NegInf,
    Finite(i64),
    PosInf,
}

pub use ExtendedDelta::{Finite, NegInf, PosInf};

impl ExtendedDelta {
    pub fn from_time(t: Time) -> Self {
        Finite(t as i64)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    /// Finite value, or `None` for either infinity.
    pub fn finite(self) -> Option<i64> {
        match self {
            Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Sum in the extended domain. `None` exactly for `-∞ + +∞`.
    pub fn checked_add(self, other: Self) -> Option<Self> {
        match (self, other) {
            (NegInf, PosInf) | (PosInf, NegInf) => None,
            (NegInf, _) | (_, NegInf) => Some(NegInf),
            (PosInf, _) | (_, PosInf) => Some(PosInf),
            (Finite(a), Finite(b)) => Some(Finite(a + b)),
        }
    }

    /// Sum that panics on the undefined `-∞ + +∞` combination.
    ///
    /// Shortest-path code is structured so the combination cannot arise
    /// (pairs with a `+∞` constraint contribute no edge); this is the
    /// loud failure mode should that invariant ever break.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Self) -> Self {
        self.checked_add(other).expect("undefined sum: -inf + +inf")
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Ord for ExtendedDelta {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (NegInf, NegInf) | (PosInf, PosInf) => Ordering::Equal,
            (NegInf, _) | (_, PosInf) => Ordering::Less,
            (_, NegInf) | (PosInf, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for ExtendedDelta {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExtendedDelta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NegInf => write!(f, "-inf"),
            PosInf => write!(f, "+inf"),
            Finite(v) => write!(f, "{v}"),
        }
    }
}
