//! Exact rational scalars.
//!
//! Values that fit in a reduced `i64/i64` fraction stay on an allocation-free
//! fast path; anything larger is promoted to a `BigRational` and demoted again
//! as soon as it fits. The representation is therefore canonical, which lets
//! equality and hashing work structurally.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::{Product, Sum};
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

#[derive(Clone, Debug)]
enum Repr {
    /// Reduced fraction with positive denominator.
    Small(i64, i64),
    /// Only used when the value does not fit in `Small`.
    Big(BigRational),
}

/// An arbitrary-precision rational number, always stored in lowest terms.
#[derive(Clone, Debug)]
pub struct ExactScalar(Repr);

fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i128
}

impl ExactScalar {
    pub fn zero() -> Self {
        ExactScalar(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        ExactScalar(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        ExactScalar(Repr::Small(n, 1))
    }

    /// Builds `num/den`, failing on a zero denominator.
    pub fn new(num: i64, den: i64) -> Result<Self, Error> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::from_i128(num as i128, den as i128))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Self::from_big(BigRational::from_integer(n))
    }

    pub fn from_big_ratio(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::from_big(BigRational::new(num, den)))
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = gcd_i128(num, den);
        let (mut n, mut d) = if g > 1 { (num / g, den / g) } else { (num, den) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(n), Ok(d)) => ExactScalar(Repr::Small(n, d)),
            _ => ExactScalar(Repr::Big(BigRational::new(BigInt::from(n), BigInt::from(d)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        // BigRational keeps itself reduced with a positive denominator.
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            return ExactScalar(Repr::Small(n, d));
        }
        ExactScalar(Repr::Big(r))
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small(_, d) => *d == 1,
            Repr::Big(r) => r.is_integer(),
        }
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    /// Integer value, if this scalar is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn inv(&self) -> Result<Self, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(r) => Self::from_big(r.recip()),
        })
    }

    /// Residue modulo `p`, or `None` when the denominator vanishes mod `p`.
    pub fn to_modp(&self, p: u64) -> Option<u64> {
        let reduce = |x: &BigInt| -> u64 {
            let m = BigInt::from(p);
            let r = x.mod_floor(&m);
            r.to_u64().expect("residue fits in u64")
        };
        let (n, d) = match &self.0 {
            Repr::Small(n, d) => {
                let pm = p as i128;
                ((*n as i128).rem_euclid(pm) as u64, (*d as i128).rem_euclid(pm) as u64)
            }
            Repr::Big(r) => (reduce(r.numer()), reduce(r.denom())),
        };
        if d == 0 {
            return None;
        }
        let dinv = super::modp::inv_mod(d, p)?;
        Some(super::modp::mul_mod(n, dinv, p))
    }

    /// Size proxy used for pivot tie-breaking: bit length of numerator plus denominator.
    pub fn height(&self) -> u64 {
        match &self.0 {
            Repr::Small(n, d) => {
                (64 - n.unsigned_abs().leading_zeros()) as u64
                    + (64 - d.unsigned_abs().leading_zeros()) as u64
            }
            Repr::Big(r) => r.numer().bits() + r.denom().bits(),
        }
    }
}

impl Default for ExactScalar {
    fn default() -> Self {
        Self::zero()
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for ExactScalar {}

impl Hash for ExactScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(r) => {
                1u8.hash(state);
                r.hash(state);
            }
        }
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                ((*a as i128) * (*d as i128)).cmp(&((*c as i128) * (*b as i128)))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl Add<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn add(self, rhs: &ExactScalar) -> ExactScalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) => rhs.clone(),
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    ExactScalar::from_i128(a + c, b)
                } else {
                    ExactScalar::from_i128(a * d + c * b, b * d)
                }
            }
            _ => ExactScalar::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl Sub<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn sub(self, rhs: &ExactScalar) -> ExactScalar {
        match (&self.0, &rhs.0) {
            (_, Repr::Small(0, _)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                if b == d {
                    ExactScalar::from_i128(a - c, b)
                } else {
                    ExactScalar::from_i128(a * d - c * b, b * d)
                }
            }
            _ => ExactScalar::from_big(self.to_big() - rhs.to_big()),
        }
    }
}

impl Mul<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn mul(self, rhs: &ExactScalar) -> ExactScalar {
        match (&self.0, &rhs.0) {
            (Repr::Small(0, _), _) | (_, Repr::Small(0, _)) => ExactScalar::zero(),
            (Repr::Small(1, 1), _) => rhs.clone(),
            (_, Repr::Small(1, 1)) => self.clone(),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                ExactScalar::from_i128(a * c, b * d)
            }
            _ => ExactScalar::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl Div<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    /// Panics on division by zero, like integer division.
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        assert!(!rhs.is_zero(), "division by zero");
        match (&self.0, &rhs.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                ExactScalar::from_i128(a * d, b * c)
            }
            _ => ExactScalar::from_big(self.to_big() / rhs.to_big()),
        }
    }
}

impl Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match &self.0 {
            Repr::Small(n, d) => ExactScalar::from_i128(-(*n as i128), *d as i128),
            Repr::Big(r) => ExactScalar::from_big(-r.clone()),
        }
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $atr:ident, $am:ident) => {
        impl $tr<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: &ExactScalar) -> ExactScalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $m(self, rhs: ExactScalar) -> ExactScalar {
                self.$m(&rhs)
            }
        }
        impl $atr<ExactScalar> for ExactScalar {
            fn $am(&mut self, rhs: ExactScalar) {
                *self = (&*self).$m(&rhs);
            }
        }
        impl<'a> $atr<&'a ExactScalar> for ExactScalar {
            fn $am(&mut self, rhs: &ExactScalar) {
                *self = (&*self).$m(rhs);
            }
        }
    };
}

forward_binop!(Add, add, AddAssign, add_assign);
forward_binop!(Sub, sub, SubAssign, sub_assign);
forward_binop!(Mul, mul, MulAssign, mul_assign);
forward_binop!(Div, div, DivAssign, div_assign);

impl Sum for ExactScalar {
    fn sum<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a ExactScalar> for ExactScalar {
    fn sum<I: Iterator<Item = &'a ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::zero(), |acc, x| acc + x)
    }
}

impl Product for ExactScalar {
    fn product<I: Iterator<Item = ExactScalar>>(iter: I) -> Self {
        iter.fold(ExactScalar::one(), |acc, x| acc * x)
    }
}

impl From<i64> for ExactScalar {
    fn from(n: i64) -> Self {
        ExactScalar::from_int(n)
    }
}

impl From<i32> for ExactScalar {
    fn from(n: i32) -> Self {
        ExactScalar::from_int(n as i64)
    }
}

impl From<u64> for ExactScalar {
    fn from(n: u64) -> Self {
        ExactScalar::from_bigint(BigInt::from(n))
    }
}

impl From<BigInt> for ExactScalar {
    fn from(n: BigInt) -> Self {
        ExactScalar::from_bigint(n)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl FromStr for ExactScalar {
    type Err = Error;

    /// Parses `"p"` or `"p/q"` with arbitrary-size integers.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || Error::Parse(format!("malformed rational {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        if num.is_empty() || den.is_empty() || den.starts_with(['+', '-']) && den.len() == 1 {
            return Err(bad());
        }
        let n: BigInt = num.parse().map_err(|_| bad())?;
        let d: BigInt = den.parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        ExactScalar::from_big_ratio(n, d)
    }
}

impl Zero for ExactScalar {
    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
}

impl One for ExactScalar {
    fn one() -> Self {
        ExactScalar::one()
    }
}
