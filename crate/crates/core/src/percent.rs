//! Percentages rounded half-up to one decimal place.
//!
//! Values are kept as integer tenths of a percent so that printing and
//! comparison are exact. `Percent::of(18_205, 54_763)` prints as `33.2%`.

use std::fmt;

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Percent {
    tenths: u64,
}

impl Percent {
    /// `numerator / denominator` as a percentage, rounded half-up to one
    /// decimal. Returns `None` when the denominator is zero.
    pub fn of(numerator: u64, denominator: u64) -> Option<Percent> {
        if denominator == 0 {
            return None;
        }
        // round(n * 1000 / d) with ties going up, in exact integer arithmetic
        let num = numerator as u128 * 2000 + denominator as u128;
        let den = denominator as u128 * 2;
        Some(Percent {
            tenths: (num / den) as u64,
        })
    }

    pub fn from_tenths(tenths: u64) -> Percent {
        Percent { tenths }
    }

    pub fn tenths(self) -> u64 {
        self.tenths
    }

    pub fn as_f64(self) -> f64 {
        self.tenths as f64 / 10.0
    }
}

impl fmt::Display for Percent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}%", self.tenths / 10, self.tenths % 10)
    }
}

impl Serialize for Percent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Formats an optional percentage, printing absent values as an empty field.
pub fn display_opt(p: Option<Percent>) -> String {
    p.map(|p| p.to_string()).unwrap_or_default()
}
