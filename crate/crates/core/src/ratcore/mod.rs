//! Exact rational arithmetic and the scalar constants everything else is
//! measured against: harmonic numbers, the partial sums `t_m`, and rational
//! enclosures of `λ = 1 - log 2`.

mod constants;
mod lcm;

pub use constants::{
    harmonic, telescoping_check, lambda_cmp, lambda_enclosure, partial_sum_t, Enclosure,
};
pub use lcm::LcmBasis;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RatError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("cannot parse {input:?} as a rational: {reason}")]
    Parse { input: String, reason: &'static str },
    #[error("{0}")]
    Domain(&'static str),
}

/// An arbitrary-precision rational, always in lowest terms with a positive
/// denominator. Serializes as `"p/q"` (integers as `"p/1"`).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(BigRational);

impl Rat {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rat, RatError> {
        let den = den.into();
        if den.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat(BigRational::new(num.into(), den)))
    }

    /// Small literal constructor for constants known to be valid.
    ///
    /// Panics on a zero denominator.
    pub fn of(num: i64, den: i64) -> Rat {
        Rat::new(num, den).expect("literal rational with zero denominator")
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Rat {
        Rat(BigRational::from_integer(n.into()))
    }

    /// Caller guarantees `den > 0` and `gcd(num, den) = 1`.
    pub(crate) fn from_reduced(num: BigInt, den: BigInt) -> Rat {
        debug_assert!(den.is_positive());
        Rat(BigRational::new_raw(num, den))
    }

    pub fn zero() -> Rat {
        Rat(BigRational::zero())
    }

    pub fn one() -> Rat {
        Rat(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Result<Rat, RatError> {
        if self.is_zero() {
            return Err(RatError::ZeroDenominator);
        }
        Ok(Rat(self.0.recip()))
    }

    /// Largest integer `<= self` (toward negative infinity).
    pub fn floor(&self) -> BigInt {
        self.numer().div_floor(self.denom())
    }

    /// Smallest integer `>= self`.
    pub fn ceil(&self) -> BigInt {
        self.numer().div_ceil(self.denom())
    }

    /// `self - floor(self)`, always in `[0, 1)`.
    pub fn fract(&self) -> Rat {
        let r = self.numer().mod_floor(self.denom());
        Rat::from_reduced(r, self.denom().clone())
    }

    pub fn mul_int(&self, k: impl Into<BigInt>) -> Rat {
        Rat(&self.0 * BigRational::from_integer(k.into()))
    }

    /// Renders `digits` decimal places, rounded to nearest with ties away
    /// from zero.
    pub fn to_decimal(&self, digits: usize) -> String {
        let scale = num_traits::pow(BigInt::from(10), digits);
        let scaled = self.abs().0 * BigRational::from_integer(scale.clone());
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let rounded = (scaled + half).floor().to_integer();
        let (int_part, frac_part) = rounded.div_rem(&scale);
        let sign = if self.is_negative() && !rounded.is_zero() {
            "-"
        } else {
            ""
        };
        if digits == 0 {
            format!("{sign}{int_part}")
        } else {
            format!(
                "{sign}{int_part}.{:0>width$}",
                frac_part.to_string(),
                width = digits
            )
        }
    }

    /// Lossy conversion for display and heuristics only.
    pub fn to_f64(&self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self.0).unwrap_or(f64::NAN)
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

/// Builds `num/den` in lowest terms.
pub fn rat(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Rat, RatError> {
    Rat::new(num, den)
}

pub fn floor_rat(x: &Rat) -> BigInt {
    x.floor()
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = RatError;

    /// Accepts `p/q`, `p`, and finite decimals `p.ddd` (converted exactly).
    fn from_str(s: &str) -> Result<Rat, RatError> {
        let input = s.trim();
        let bad = |reason| RatError::Parse {
            input: s.to_string(),
            reason,
        };
        if input.is_empty() {
            return Err(bad("empty input"));
        }
        let int = |t: &str| -> Result<BigInt, RatError> {
            if t.is_empty()
                || !t
                    .trim_start_matches(['+', '-'])
                    .bytes()
                    .all(|b| b.is_ascii_digit())
            {
                return Err(bad("expected an integer"));
            }
            t.parse::<BigInt>().map_err(|_| bad("expected an integer"))
        };
        if let Some((p, q)) = input.split_once('/') {
            let (p, q) = (int(p.trim())?, int(q.trim())?);
            return Rat::new(p, q);
        }
        if let Some((whole, digits)) = input.split_once('.') {
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad("malformed decimal fraction"));
            }
            let negative = whole.starts_with('-');
            let whole = match whole.trim_start_matches(['+', '-']) {
                "" => BigInt::zero(),
                w => int(w)?,
            };
            let scale = num_traits::pow(BigInt::from(10), digits.len());
            let frac = int(digits)?;
            let magnitude = whole * &scale + frac;
            let num = if negative { -magnitude } else { magnitude };
            return Rat::new(num, scale);
        }
        Ok(Rat::from_integer(int(input)?))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Rat {
        Rat::from_integer(n)
    }
}

impl From<BigInt> for Rat {
    fn from(n: BigInt) -> Rat {
        Rat::from_integer(n)
    }
}

impl PartialEq<i64> for Rat {
    fn eq(&self, other: &i64) -> bool {
        self.is_integer() && *self.numer() == BigInt::from(*other)
    }
}

impl PartialOrd<i64> for Rat {
    fn partial_cmp(&self, other: &i64) -> Option<Ordering> {
        Some(self.0.cmp(&BigRational::from_integer(BigInt::from(*other))))
    }
}

macro_rules! forward_binop {
    ($imp:ident, $method:ident) => {
        impl $imp<&Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $imp<Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat(self.0.$method(rhs.0))
            }
        }
        impl $imp<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat(self.0.$method(&rhs.0))
            }
        }
        impl $imp<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                Rat((&self.0).$method(rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);

impl Div<&Rat> for &Rat {
    type Output = Rat;

    /// Panics when dividing by zero; use [`Rat::recip`] for a checked path.
    fn div(self, rhs: &Rat) -> Rat {
        assert!(!rhs.is_zero(), "division of a rational by zero");
        Rat(&self.0 / &rhs.0)
    }
}

impl Div<Rat> for Rat {
    type Output = Rat;
    fn div(self, rhs: Rat) -> Rat {
        &self / &rhs
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl std::iter::Sum for Rat {
    fn sum<I: Iterator<Item = Rat>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, x| acc + x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn constructor_reduces() {
        assert_eq!(rat(2, 4).unwrap(), Rat::of(1, 2));
        assert_eq!(rat(3, -6).unwrap().to_string(), "-1/2");
        assert_eq!(rat(0, 7).unwrap().to_string(), "0/1");
        assert_eq!(rat(1, 0), Err(RatError::ZeroDenominator));
    }

    #[test]
    fn floor_is_not_truncation() {
        assert_eq!(floor_rat(&Rat::of(7, 2)), BigInt::from(3));
        assert_eq!(floor_rat(&Rat::of(-1, 2)), BigInt::from(-1));
        assert_eq!(floor_rat(&Rat::of(5, 1)), BigInt::from(5));
        assert_eq!(Rat::of(-1, 2).fract(), Rat::of(1, 2));
        assert_eq!(Rat::of(-7, 3).ceil(), BigInt::from(-2));
    }

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!("3/4".parse::<Rat>().unwrap(), Rat::of(3, 4));
        assert_eq!(" -6/8 ".parse::<Rat>().unwrap(), Rat::of(-3, 4));
        assert_eq!("17".parse::<Rat>().unwrap(), Rat::of(17, 1));
        assert_eq!("0.125".parse::<Rat>().unwrap(), Rat::of(1, 8));
        assert_eq!("-0.5".parse::<Rat>().unwrap(), Rat::of(-1, 2));
        assert_eq!("-.25".parse::<Rat>().unwrap(), Rat::of(-1, 4));
        assert_eq!("1/0".parse::<Rat>(), Err(RatError::ZeroDenominator));
        for bad in ["", "abc", "1/", "/2", "1.", "1.2.3", "1/2/3", "0x10", "1e5"] {
            assert!(bad.parse::<Rat>().is_err(), "{bad:?} should not parse");
        }
    }

    #[test]
    fn decimal_rendering_rounds_to_nearest() {
        assert_eq!(Rat::of(1, 3).to_decimal(5), "0.33333");
        assert_eq!(Rat::of(2, 3).to_decimal(5), "0.66667");
        assert_eq!(Rat::of(-1, 8).to_decimal(2), "-0.13");
        assert_eq!(Rat::of(5, 2).to_decimal(0), "3");
        assert_eq!(Rat::of(-1, 1000).to_decimal(2), "0.00");
        assert_eq!(Rat::of(29, 20).to_decimal(3), "1.450");
    }

    #[test]
    fn serde_uses_p_over_q_strings() {
        let v = serde_json::to_string(&Rat::of(-1, 2)).unwrap();
        assert_eq!(v, "\"-1/2\"");
        let back: Rat = serde_json::from_str("\"4/15\"").unwrap();
        assert_eq!(back, Rat::of(4, 15));
        assert!(serde_json::from_str::<Rat>("\"1/0\"").is_err());
    }

    fn any_rat() -> impl Strategy<Value = Rat> {
        (any::<i64>(), 1i64..=i64::MAX).prop_map(|(p, q)| Rat::new(p, q).unwrap())
    }

    proptest! {
        #[test]
        fn floor_brackets_value(x in any_rat()) {
            let fl = Rat::from_integer(floor_rat(&x));
            prop_assert!(fl <= x);
            prop_assert!(x < fl + Rat::one());
        }

        #[test]
        fn lowest_terms_and_positive_denominator(p in any::<i64>(), q in any::<i64>()) {
            prop_assume!(q != 0);
            let r = rat(p, q).unwrap();
            prop_assert!(r.denom().is_positive());
            prop_assert!(r.numer().gcd(r.denom()).is_one());
        }

        #[test]
        fn display_round_trips(x in any_rat()) {
            prop_assert_eq!(x.to_string().parse::<Rat>().unwrap(), x);
        }

        #[test]
        fn order_agrees_with_cross_multiplication(a in any_rat(), b in any_rat()) {
            let lhs = a.numer() * b.denom();
            let rhs = b.numer() * a.denom();
            prop_assert_eq!(a.cmp(&b), lhs.cmp(&rhs));
        }
    }
}
