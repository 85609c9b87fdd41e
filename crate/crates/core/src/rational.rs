//! Exact rational numbers.
//!
//! Values are always kept in lowest terms with a positive denominator. A value
//! whose numerator and denominator both fit in an `i64` is stored inline; all
//! other values fall back to arbitrary-precision integers. The representation
//! is canonical (small values are never stored in the big form), so derived
//! equality and hashing agree with numeric equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Clone)]
pub struct Rational(Repr);

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(Box<(BigInt, BigInt)>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal `{0}`")]
    Invalid(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
    #[error("rational literal `{0}` is not in lowest terms")]
    NotReduced(String),
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }

    pub fn from_int(v: i64) -> Self {
        Rational(Repr::Small(v, 1))
    }

    /// Builds `num/den`, reducing to lowest terms. Panics if `den == 0`.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    pub fn from_bigints(num: BigInt, den: BigInt) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = num.gcd(&den);
        let (mut n, mut d) = (num / &g, den / &g);
        if d.is_negative() {
            n = -n;
            d = -d;
        }
        Self::normalize_big(n, d)
    }

    fn normalize_big(n: BigInt, d: BigInt) -> Self {
        match (n.to_i64(), d.to_i64()) {
            (Some(a), Some(b)) => Rational(Repr::Small(a, b)),
            _ => Rational(Repr::Big(Box::new((n, d)))),
        }
    }

    /// Reduces an i128 fraction; den must be nonzero.
    fn from_i128(num: i128, den: i128) -> Self {
        if num == 0 {
            return Self::zero();
        }
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs());
        // g >= 1 and divides both; dividing cannot overflow unless g == 1 and value is i128::MIN
        let (mut n, mut d) = if g == 1 {
            (num, den)
        } else {
            let g = g as i128;
            (num / g, den / g)
        };
        if d < 0 {
            match (n.checked_neg(), d.checked_neg()) {
                (Some(a), Some(b)) => {
                    n = a;
                    d = b;
                }
                _ => return Self::from_bigints(BigInt::from(num), BigInt::from(den)),
            }
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Rational(Repr::Small(a, b)),
            _ => Rational(Repr::Big(Box::new((BigInt::from(n), BigInt::from(d))))),
        }
    }

    fn to_big(&self) -> (BigInt, BigInt) {
        match &self.0 {
            Repr::Small(n, d) => (BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (b.0.clone(), b.1.clone()),
        }
    }

    pub fn numer(&self) -> BigInt {
        self.to_big().0
    }

    pub fn denom(&self) -> BigInt {
        self.to_big().1
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
            Repr::Big(b) => b.1.is_one(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small(n, _) => n.signum() as i32,
            Repr::Big(b) => {
                if b.0.is_positive() {
                    1
                } else if b.0.is_negative() {
                    -1
                } else {
                    0
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(b) => Self::from_bigints(b.1.clone(), b.0.clone()),
        }
    }

    pub fn floor(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(n.div_euclid(*d), 1)),
            Repr::Big(b) => Self::normalize_big(b.0.div_floor(&b.1), BigInt::one()),
        }
    }

    pub fn ceil(&self) -> Self {
        -(-self).floor()
    }

    /// The fractional part `self - floor(self)`, in `[0, 1)`.
    pub fn fract(&self) -> Self {
        self - &self.floor()
    }

    /// Returns the value as an `i64` when it is an integer that fits.
    pub fn to_i64(&self) -> Option<i64> {
        match &self.0 {
            Repr::Small(n, 1) => Some(*n),
            _ => None,
        }
    }

    /// Lossy conversion, for progress display only.
    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => {
                b.0.to_f64().unwrap_or(f64::NAN) / b.1.to_f64().unwrap_or(f64::NAN)
            }
        }
    }

    /// Parses `p` or `p/q`, rejecting literals that are not in lowest terms
    /// or carry a non-positive denominator.
    pub fn parse_reduced(s: &str) -> Result<Self, ParseRationalError> {
        let (num, den) = split_literal(s)?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        if den.is_negative() || !num.gcd(&den).is_one() && !(num.is_zero() && den.is_one()) {
            return Err(ParseRationalError::NotReduced(s.to_string()));
        }
        if s.contains('/') && den.is_one() {
            return Err(ParseRationalError::NotReduced(s.to_string()));
        }
        Ok(Self::normalize_big(num, den))
    }
}

fn split_literal(s: &str) -> Result<(BigInt, BigInt), ParseRationalError> {
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let bad = || ParseRationalError::Invalid(s.to_string());
    let int = |t: &str| -> Result<BigInt, ParseRationalError> {
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<BigInt>().map_err(|_| bad())
    };
    match s.split_once('/') {
        None => Ok((int(s)?, BigInt::one())),
        Some((p, q)) => Ok((int(p)?, int(q)?)),
    }
}

impl FromStr for Rational {
    type Err = ParseRationalError;

    /// Lenient parse: accepts non-reduced fractions and normalizes them.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, den) = split_literal(s.trim())?;
        if den.is_zero() {
            return Err(ParseRationalError::ZeroDenominator(s.to_string()));
        }
        Ok(Self::from_bigints(num, den))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(v: i64) -> Self {
        Self::from_int(v)
    }
}

impl From<i32> for Rational {
    fn from(v: i32) -> Self {
        Self::from_int(v as i64)
    }
}

impl From<usize> for Rational {
    fn from(v: usize) -> Self {
        match i64::try_from(v) {
            Ok(v) => Self::from_int(v),
            Err(_) => Self::normalize_big(BigInt::from(v), BigInt::one()),
        }
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) if b.1.is_one() => write!(f, "{}", b.0),
            Repr::Big(b) => write!(f, "{}/{}", b.0, b.1),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                0u8.hash(state);
                n.hash(state);
                d.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.0.hash(state);
                b.1.hash(state);
            }
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => {
                let (a, b) = self.to_big();
                let (c, d) = other.to_big();
                (a * d).cmp(&(c * b))
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn add_impl(x: &Rational, y: &Rational) -> Rational {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        if *b == 1 && *d == 1 {
            if let Some(s) = a.checked_add(*c) {
                return Rational(Repr::Small(s, 1));
            }
        }
        let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
        if b == d {
            return Rational::from_i128(a + c, b);
        }
        if let Some(n) = (a * d).checked_add(c * b) {
            return Rational::from_i128(n, b * d);
        }
    }
    let (a, b) = x.to_big();
    let (c, d) = y.to_big();
    Rational::from_bigints(a * &d + c * &b, b * d)
}

fn mul_impl(x: &Rational, y: &Rational) -> Rational {
    if let (Repr::Small(a, b), Repr::Small(c, d)) = (&x.0, &y.0) {
        if *a == 0 || *c == 0 {
            return Rational::zero();
        }
        if *b == 1 && *d == 1 {
            if let Some(p) = a.checked_mul(*c) {
                return Rational(Repr::Small(p, 1));
            }
        }
        return Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128);
    }
    let (a, b) = x.to_big();
    let (c, d) = y.to_big();
    Rational::from_bigints(a * c, b * d)
}

fn neg_impl(x: &Rational) -> Rational {
    match &x.0 {
        Repr::Small(n, d) => match n.checked_neg() {
            Some(m) => Rational(Repr::Small(m, *d)),
            None => Rational::from_bigints(-BigInt::from(*n), BigInt::from(*d)),
        },
        Repr::Big(b) => Rational::normalize_big(-b.0.clone(), b.1.clone()),
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $body:expr) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(self, rhs)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(&self, &rhs)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                $body(&self, rhs)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                $body(self, &rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_impl);
forward_binop!(Sub, sub, |x: &Rational, y: &Rational| add_impl(x, &neg_impl(y)));
forward_binop!(Mul, mul, mul_impl);
forward_binop!(Div, div, |x: &Rational, y: &Rational| mul_impl(x, &y.recip()));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(&self)
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        neg_impl(self)
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, rhs);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, rhs: Rational) {
        *self = add_impl(self, &rhs);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = add_impl(self, &neg_impl(rhs));
    }
}

impl SubAssign<Rational> for Rational {
    fn sub_assign(&mut self, rhs: Rational) {
        *self = add_impl(self, &neg_impl(&rhs));
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, rhs: &Rational) {
        *self = mul_impl(self, rhs);
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}

impl<'a> Sum<&'a Rational> for Rational {
    fn sum<I: Iterator<Item = &'a Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, v| acc + v)
    }
}
