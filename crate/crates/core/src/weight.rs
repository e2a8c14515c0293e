//! Extended integer weights: finite values in a 62-bit signed range plus the
//! two infinities.
//!
//! Both infinities are sentinels that sit outside the finite range, so the
//! derived ordering is the natural one (`-inf < finite < +inf`) and a stray
//! arithmetic result can never masquerade as infinity.

use std::fmt;
use std::str::FromStr;

use crate::error::{ApspError, Result};

/// Largest finite value, `2^61 - 1`.
pub const FINITE_MAX: i64 = (1 << 61) - 1;
/// Smallest finite value, `-2^61`.
pub const FINITE_MIN: i64 = -(1 << 61);

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(i64);

impl Weight {
    pub const INF: Weight = Weight(i64::MAX);
    pub const NEG_INF: Weight = Weight(i64::MIN);
    pub const ZERO: Weight = Weight(0);

    /// A finite weight, or `None` if `v` is outside the finite range.
    #[inline]
    pub const fn finite(v: i64) -> Option<Weight> {
        if v >= FINITE_MIN && v <= FINITE_MAX {
            Some(Weight(v))
        } else {
            None
        }
    }

    /// Finite weight from a value the caller knows to be in range.
    ///
    /// Panics if `v` is out of range.
    #[inline]
    pub fn of(v: i64) -> Weight {
        Weight::finite(v).unwrap_or_else(|| panic!("weight {v} outside the finite range"))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0 != i64::MAX && self.0 != i64::MIN
    }

    #[inline]
    pub fn is_inf(self) -> bool {
        self.0 == i64::MAX
    }

    #[inline]
    pub fn is_neg_inf(self) -> bool {
        self.0 == i64::MIN
    }

    /// The finite value, if any.
    #[inline]
    pub fn value(self) -> Option<i64> {
        if self.is_finite() {
            Some(self.0)
        } else {
            None
        }
    }

    /// Raw storage value. The infinities map to `i64::MAX` / `i64::MIN`,
    /// which is also the binary dump encoding.
    #[inline]
    pub fn to_raw(self) -> i64 {
        self.0
    }

    pub fn from_raw(raw: i64) -> Result<Weight> {
        match raw {
            i64::MAX => Ok(Weight::INF),
            i64::MIN => Ok(Weight::NEG_INF),
            v => Weight::finite(v)
                .ok_or_else(|| ApspError::Overflow(format!("raw value {v} outside finite range"))),
        }
    }

    /// True when finite and `|self| <= cap`.
    #[inline]
    pub fn within(self, cap: i64) -> bool {
        self.is_finite() && self.0.unsigned_abs() <= cap as u64
    }

    /// Sum with `+inf` absorbing finite operands. Any `-inf` operand is a
    /// contract violation; the finite result is range checked.
    pub fn checked_add(self, other: Weight) -> Result<Weight> {
        if self.is_neg_inf() || other.is_neg_inf() {
            return Err(ApspError::Contract("arithmetic on -inf".into()));
        }
        if self.is_inf() || other.is_inf() {
            return Ok(Weight::INF);
        }
        let sum = self.0 + other.0;
        Weight::finite(sum).ok_or_else(|| ApspError::Overflow(format!("{} + {}", self.0, other.0)))
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            i64::MAX => f.write_str("inf"),
            i64::MIN => f.write_str("-inf"),
            v => write!(f, "{v}"),
        }
    }
}

impl FromStr for Weight {
    type Err = ApspError;

    fn from_str(s: &str) -> Result<Weight> {
        match s.trim() {
            "inf" | "+inf" => Ok(Weight::INF),
            "-inf" => Ok(Weight::NEG_INF),
            t => {
                let v: i64 = t
                    .parse()
                    .map_err(|e| ApspError::Parse { line: 0, msg: format!("bad weight {t:?}: {e}") })?;
                Weight::finite(v).ok_or_else(|| ApspError::Overflow(format!("weight {v}")))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_places_infinities_outside() {
        assert!(Weight::NEG_INF < Weight::of(FINITE_MIN));
        assert!(Weight::of(FINITE_MAX) < Weight::INF);
        assert!(Weight::of(-3) < Weight::of(2));
    }

    #[test]
    fn finite_range_is_62_bits() {
        assert!(Weight::finite(FINITE_MAX).is_some());
        assert!(Weight::finite(FINITE_MAX + 1).is_none());
        assert!(Weight::finite(FINITE_MIN - 1).is_none());
    }

    #[test]
    fn add_rules() {
        assert_eq!(Weight::INF.checked_add(Weight::of(-5)).unwrap(), Weight::INF);
        assert_eq!(Weight::of(2).checked_add(Weight::of(3)).unwrap(), Weight::of(5));
        assert!(matches!(
            Weight::of(FINITE_MAX).checked_add(Weight::of(1)),
            Err(ApspError::Overflow(_))
        ));
        assert!(matches!(Weight::NEG_INF.checked_add(Weight::of(1)), Err(ApspError::Contract(_))));
    }

    #[test]
    fn text_round_trip() {
        for w in [Weight::INF, Weight::NEG_INF, Weight::of(-7), Weight::ZERO] {
            assert_eq!(w.to_string().parse::<Weight>().unwrap(), w);
        }
        assert_eq!(Weight::from_raw(Weight::INF.to_raw()).unwrap(), Weight::INF);
    }
}
