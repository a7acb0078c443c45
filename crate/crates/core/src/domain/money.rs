//! Exact money arithmetic.
//!
//! Every cost coefficient in the model is a multiple of 0.25 (regular hour
//! 1, overtime hour 1.5, pause hour 0.5, welfare weight 0.75), so amounts
//! are stored as integer counts of quarter units. Objective bookkeeping
//! stays exact; conversion to `f64` happens once, at the solver boundary.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// A money amount as an exact number of quarter cost units.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
#[serde(transparent)]
pub struct Cost {
    quarters: i64,
}

impl Cost {
    pub const ZERO: Cost = Cost { quarters: 0 };

    pub const fn from_quarters(quarters: i64) -> Cost {
        Cost { quarters }
    }

    pub const fn from_units(units: i64) -> Cost {
        Cost { quarters: units * 4 }
    }

    pub const fn quarters(self) -> i64 {
        self.quarters
    }

    pub fn as_f64(self) -> f64 {
        self.quarters as f64 / 4.0
    }

    pub fn is_negative(self) -> bool {
        self.quarters < 0
    }
}

impl Add for Cost {
    type Output = Cost;
    fn add(self, rhs: Cost) -> Cost {
        Cost::from_quarters(self.quarters + rhs.quarters)
    }
}

impl AddAssign for Cost {
    fn add_assign(&mut self, rhs: Cost) {
        self.quarters += rhs.quarters;
    }
}

impl Sub for Cost {
    type Output = Cost;
    fn sub(self, rhs: Cost) -> Cost {
        Cost::from_quarters(self.quarters - rhs.quarters)
    }
}

impl Neg for Cost {
    type Output = Cost;
    fn neg(self) -> Cost {
        Cost::from_quarters(-self.quarters)
    }
}

impl Mul<i64> for Cost {
    type Output = Cost;
    fn mul(self, rhs: i64) -> Cost {
        Cost::from_quarters(self.quarters * rhs)
    }
}

impl Sum for Cost {
    fn sum<I: Iterator<Item = Cost>>(iter: I) -> Cost {
        iter.fold(Cost::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Cost {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.quarters < 0 { "-" } else { "" };
        let q = self.quarters.unsigned_abs();
        match q % 4 {
            0 => write!(f, "{sign}{}", q / 4),
            1 => write!(f, "{sign}{}.25", q / 4),
            2 => write!(f, "{sign}{}.5", q / 4),
            _ => write!(f, "{sign}{}.75", q / 4),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_is_exact() {
        let a = Cost::from_units(8);
        let b = Cost::from_quarters(6); // 1.5
        assert_eq!((a + b).as_f64(), 9.5);
        assert_eq!((a + b * 2).quarters(), 44);
        assert_eq!((a - a).quarters(), 0);
        assert_eq!((-b).as_f64(), -1.5);
    }

    #[test]
    fn display_renders_quarters() {
        assert_eq!(Cost::from_quarters(3).to_string(), "0.75");
        assert_eq!(Cost::from_quarters(42).to_string(), "10.5");
        assert_eq!(Cost::from_quarters(-5).to_string(), "-1.25");
        assert_eq!(Cost::from_units(11).to_string(), "11");
    }

    #[test]
    fn serde_round_trip() {
        let c = Cost::from_quarters(43);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(json, "43");
        let back: Cost = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }
}
