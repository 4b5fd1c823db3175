use serde::{Deserialize, Serialize};
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

/// A rational number with denominator 1 or 2, stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);

    pub fn from_twice(twice: i64) -> Self {
        HalfInteger(twice)
    }

    pub fn from_int(k: i64) -> Self {
        HalfInteger(2 * k)
    }

    pub fn twice(self) -> i64 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `(numerator, denominator)` in lowest terms, denominator 1 or 2.
    pub fn num_den(self) -> (i64, i64) {
        if self.is_integer() {
            (self.0 / 2, 1)
        } else {
            (self.0, 2)
        }
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.num_den() {
            (n, 1) => write!(f, "{n}"),
            (n, d) => write!(f, "{n}/{d}"),
        }
    }
}

impl Add for HalfInteger {
    type Output = HalfInteger;
    fn add(self, o: Self) -> Self {
        HalfInteger(self.0 + o.0)
    }
}

impl AddAssign for HalfInteger {
    fn add_assign(&mut self, o: Self) {
        self.0 += o.0;
    }
}

impl Sub for HalfInteger {
    type Output = HalfInteger;
    fn sub(self, o: Self) -> Self {
        HalfInteger(self.0 - o.0)
    }
}

impl Neg for HalfInteger {
    type Output = HalfInteger;
    fn neg(self) -> Self {
        HalfInteger(-self.0)
    }
}

impl Sum for HalfInteger {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(HalfInteger::ZERO, |a, b| a + b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_parts() {
        assert_eq!(HalfInteger::from_twice(3).to_string(), "3/2");
        assert_eq!(HalfInteger::from_twice(-4).to_string(), "-2");
        assert_eq!(HalfInteger::from_twice(-1).num_den(), (-1, 2));
        assert_eq!(HalfInteger::from_int(2) + HalfInteger::from_twice(1), HalfInteger::from_twice(5));
    }
}
