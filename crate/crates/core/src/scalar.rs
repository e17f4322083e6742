//! Exact scalars: rationals (real mode) and Gaussian rationals (complex mode).
//!
//! [`Rational`] keeps a machine-word representation while numerator and
//! denominator fit in an `i64` and falls back to a boxed `BigRational`
//! otherwise. The representation is canonical (reduced, positive
//! denominator, small whenever it fits), so structural equality is value
//! equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Error;

#[derive(Clone)]
enum Repr {
    Small { num: i64, den: i64 },
    Big(Box<BigRational>),
}

/// An exact rational number.
#[derive(Clone)]
pub struct Rational(Repr);

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    if a == 0 {
        return b;
    }
    if b == 0 {
        return a;
    }
    if (a | b) >> 64 == 0 {
        return (a as u64).gcd(&(b as u64)) as u128;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small { num: 0, den: 1 })
    }

    pub fn one() -> Self {
        Rational(Repr::Small { num: 1, den: 1 })
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Repr::Small { num: n, den: 1 })
    }

    /// `num / den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        debug_assert!(den != 0);
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut n, mut d) = if g > 1 { (num / g, den / g) } else { (num, den) };
        if d < 0 {
            n = -n;
            d = -d;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(num), Ok(den)) => Rational(Repr::Small { num, den }),
            _ => Rational(Repr::Big(Box::new(BigRational::new_raw(
                BigInt::from(n),
                BigInt::from(d),
            )))),
        }
    }

    /// Wraps an already-reduced big rational, demoting it when it fits.
    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(num), Some(den)) => Rational(Repr::Small { num, den }),
            _ => Rational(Repr::Big(Box::new(r))),
        }
    }

    pub fn from_bigint_ratio(num: BigInt, den: BigInt) -> Result<Self, Error> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Self::from_big(BigRational::new(num, den)))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small { num, den } => BigRational::new_raw(BigInt::from(*num), BigInt::from(*den)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small { num, .. } => BigInt::from(*num),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small { den, .. } => BigInt::from(*den),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small { num: 0, .. })
    }

    pub fn is_integer(&self) -> bool {
        match &self.0 {
            Repr::Small { den, .. } => *den == 1,
            Repr::Big(b) => b.is_integer(),
        }
    }

    pub fn signum(&self) -> i32 {
        match &self.0 {
            Repr::Small { num, .. } => num.signum() as i32,
            Repr::Big(b) => {
                if b.is_negative() {
                    -1
                } else if b.is_zero() {
                    0
                } else {
                    1
                }
            }
        }
    }

    pub fn abs(&self) -> Self {
        if self.signum() < 0 {
            -self.clone()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        match &self.0 {
            Repr::Small { num, den } => Self::from_i128(*den as i128, *num as i128),
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    /// Multiplies by `2^k` (`k` may be negative).
    pub fn mul_pow2(&self, k: i32) -> Self {
        if let Repr::Small { num, den } = self.0 {
            if (0..=62).contains(&k) {
                return Self::from_i128((num as i128) << k, den as i128);
            }
            if (-62..0).contains(&k) {
                return Self::from_i128(num as i128, (den as i128) << (-k));
            }
        }
        let factor = if k >= 0 {
            Rational::from_big(BigRational::from_integer(BigInt::one() << (k as usize)))
        } else {
            Rational::from_big(BigRational::new_raw(BigInt::one(), BigInt::one() << ((-k) as usize)))
        };
        self * &factor
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small { num, den } => {
                if *den == 1 {
                    *num as f64
                } else {
                    // Both fit in 2^53 in the common case; otherwise go through BigRational.
                    if num.unsigned_abs() < (1 << 53) && (*den as u64) < (1 << 53) {
                        *num as f64 / *den as f64
                    } else {
                        self.to_big().to_f64().unwrap_or(f64::NAN)
                    }
                }
            }
            Repr::Big(b) => b.to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Exact conversion of a finite float.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_big)
    }

    /// Exact square root when `self` is the square of a rational.
    pub fn sqrt_exact(&self) -> Option<Self> {
        if self.signum() < 0 {
            return None;
        }
        let (n, d) = (self.numer(), self.denom());
        let (rn, rd) = (n.sqrt(), d.sqrt());
        if &rn * &rn == n && &rd * &rd == d {
            Some(Self::from_big(BigRational::new_raw(rn, rd)))
        } else {
            None
        }
    }

    /// Integer power (negative exponents allowed for nonzero values).
    pub fn pow(&self, e: i32) -> Self {
        let base = if e < 0 { self.recip() } else { self.clone() };
        let mut acc = Rational::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }
}

impl PartialEq for Rational {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => a == c && b == d,
            (Repr::Big(a), Repr::Big(b)) => a == b,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.0 {
            Repr::Small { num, den } => {
                0u8.hash(state);
                num.hash(state);
                den.hash(state);
            }
            Repr::Big(b) => {
                1u8.hash(state);
                b.hash(state);
            }
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128))
            }
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl From<i32> for Rational {
    fn from(n: i32) -> Self {
        Rational::from_integer(n as i64)
    }
}

impl<'a> Add<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                if b == d {
                    Rational::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    Rational::from_i128(
                        *a as i128 * *d as i128 + *c as i128 * *b as i128,
                        *b as i128 * *d as i128,
                    )
                }
            }
            _ => Rational::from_big(self.to_big() + rhs.to_big()),
        }
    }
}

impl<'a> Sub<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        self + &(-rhs.clone())
    }
}

impl<'a> Mul<&'a Rational> for &'a Rational {
    type Output = Rational;
    fn mul(self, rhs: &Rational) -> Rational {
        match (&self.0, &rhs.0) {
            (Repr::Small { num: 0, .. }, _) | (_, Repr::Small { num: 0, .. }) => Rational::zero(),
            (Repr::Small { num: a, den: b }, Repr::Small { num: c, den: d }) => {
                Rational::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Rational::from_big(self.to_big() * rhs.to_big()),
        }
    }
}

impl<'a> Div<&'a Rational> for &'a Rational {
    type Output = Rational;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &Rational) -> Rational {
        self * &rhs.recip()
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        match self.0 {
            Repr::Small { num, den } if num != i64::MIN => Rational(Repr::Small { num: -num, den }),
            _ => Rational::from_big(-self.to_big()),
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -self.clone()
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: Rational) -> Rational {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, rhs: &Rational) -> Rational {
                (&self).$m(rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, rhs: &Rational) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, rhs: &Rational) {
        *self = &*self - rhs;
    }
}

impl Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small { num, den: 1 } => write!(f, "{num}"),
            Repr::Small { num, den } => write!(f, "{num}/{den}"),
            Repr::Big(b) if b.is_integer() => write!(f, "{}", b.numer()),
            Repr::Big(b) => write!(f, "{}/{}", b.numer(), b.denom()),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `"p/q"` and `"p"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let n: BigInt = n.parse().map_err(|_| bad())?;
        let d: BigInt = d.parse().map_err(|_| bad())?;
        Rational::from_bigint_ratio(n, d)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

struct RationalVisitor;

impl Visitor<'_> for RationalVisitor {
    type Value = Rational;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a rational as \"p/q\" or an integer")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
        Ok(Rational::from_integer(v))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
        i64::try_from(v)
            .map(Rational::from_integer)
            .map_err(|_| E::custom("integer out of range"))
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        deserializer.deserialize_any(RationalVisitor)
    }
}

/// A Gaussian rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct ComplexRational {
    pub re: Rational,
    pub im: Rational,
}

impl ComplexRational {
    pub fn new(re: Rational, im: Rational) -> Self {
        ComplexRational { re, im }
    }
}

impl fmt::Debug for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i)", self.re, self.im)
    }
}

impl fmt::Display for ComplexRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for ComplexRational {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        ComplexRational::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for ComplexRational {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        ComplexRational::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for ComplexRational {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.mul_ref(&rhs)
    }
}

impl Neg for ComplexRational {
    type Output = Self;
    fn neg(self) -> Self {
        ComplexRational::new(-self.re, -self.im)
    }
}

/// The ground field: every operation in the crate is generic over it.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Serialize
    + for<'de> Deserialize<'de>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const COMPLEX: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(r: Rational) -> Self;
    fn add_ref(&self, rhs: &Self) -> Self;
    fn sub_ref(&self, rhs: &Self) -> Self;
    fn mul_ref(&self, rhs: &Self) -> Self;
    fn scale_rational(&self, r: &Rational) -> Self;
    /// Multiplicative inverse; panics on zero.
    fn inverse(&self) -> Self;
    fn conj(&self) -> Self;
    /// `|x|^2`, always exact.
    fn modulus_sq(&self) -> Rational;
    /// `|x|` when it is rational.
    fn modulus_exact(&self) -> Option<Rational>;
    fn modulus_f64(&self) -> f64;
    /// The real part as a rational.
    fn real_part(&self) -> Rational;
    /// Builds a scalar from integer parts; the imaginary part is ignored in real mode.
    fn from_parts(re: Rational, im: Rational) -> Self;

    fn mul_pow2(&self, k: i32) -> Self {
        self.scale_rational(&Rational::one().mul_pow2(k))
    }
}

impl Scalar for Rational {
    const COMPLEX: bool = false;

    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn scale_rational(&self, r: &Rational) -> Self {
        self * r
    }
    fn inverse(&self) -> Self {
        self.recip()
    }
    fn conj(&self) -> Self {
        self.clone()
    }
    fn modulus_sq(&self) -> Rational {
        self * self
    }
    fn modulus_exact(&self) -> Option<Rational> {
        Some(self.abs())
    }
    fn modulus_f64(&self) -> f64 {
        self.to_f64().abs()
    }
    fn real_part(&self) -> Rational {
        self.clone()
    }
    fn from_parts(re: Rational, _im: Rational) -> Self {
        re
    }
    fn mul_pow2(&self, k: i32) -> Self {
        Rational::mul_pow2(self, k)
    }
}

impl Scalar for ComplexRational {
    const COMPLEX: bool = true;

    fn zero() -> Self {
        ComplexRational::new(Rational::zero(), Rational::zero())
    }
    fn one() -> Self {
        ComplexRational::new(Rational::one(), Rational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn from_rational(r: Rational) -> Self {
        ComplexRational::new(r, Rational::zero())
    }
    fn add_ref(&self, rhs: &Self) -> Self {
        ComplexRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
    fn sub_ref(&self, rhs: &Self) -> Self {
        ComplexRational::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
    fn mul_ref(&self, rhs: &Self) -> Self {
        ComplexRational::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
    fn scale_rational(&self, r: &Rational) -> Self {
        ComplexRational::new(&self.re * r, &self.im * r)
    }
    fn inverse(&self) -> Self {
        self.conj().scale_rational(&self.modulus_sq().recip())
    }
    fn conj(&self) -> Self {
        ComplexRational::new(self.re.clone(), -self.im.clone())
    }
    fn modulus_sq(&self) -> Rational {
        &(&self.re * &self.re) + &(&self.im * &self.im)
    }
    fn modulus_exact(&self) -> Option<Rational> {
        if self.im.is_zero() {
            Some(self.re.abs())
        } else if self.re.is_zero() {
            Some(self.im.abs())
        } else {
            self.modulus_sq().sqrt_exact()
        }
    }
    fn modulus_f64(&self) -> f64 {
        self.re.to_f64().hypot(self.im.to_f64())
    }
    fn real_part(&self) -> Rational {
        self.re.clone()
    }
    fn from_parts(re: Rational, im: Rational) -> Self {
        ComplexRational::new(re, im)
    }
}

/// A norm exponent `p ∈ [1, ∞]`, rational when finite.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Exponent {
    Finite(Rational),
    Infinite,
}

impl Exponent {
    pub fn new(p: Rational) -> Result<Self, Error> {
        if p < Rational::one() {
            return Err(Error::NotANormExponent(p.to_string()));
        }
        Ok(Exponent::Finite(p))
    }

    pub fn integer(p: i64) -> Self {
        Exponent::new(Rational::from_integer(p)).expect("integer exponent below 1")
    }

    pub fn one() -> Self {
        Exponent::integer(1)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Exponent::Finite(p) if *p == Rational::one())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// True for the exponents where norms of exact data are exact.
    pub fn is_exact(&self) -> bool {
        self.is_one() || self.is_infinite()
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Exponent::Finite(p) => p.to_f64(),
            Exponent::Infinite => f64::INFINITY,
        }
    }

    /// The conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn conjugate(&self) -> Exponent {
        match self {
            Exponent::Infinite => Exponent::one(),
            Exponent::Finite(p) if *p == Rational::one() => Exponent::Infinite,
            Exponent::Finite(p) => {
                let q = p / &(p - &Rational::one());
                Exponent::Finite(q)
            }
        }
    }

    /// `1/p`, with `1/∞ = 0`.
    pub fn reciprocal(&self) -> Rational {
        match self {
            Exponent::Finite(p) => p.recip(),
            Exponent::Infinite => Rational::zero(),
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Exponent::Infinite),
            other => Exponent::new(other.parse()?),
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = deserializer.deserialize_any(ExponentVisitor)?;
        Ok(r)
    }
}

struct ExponentVisitor;

impl Visitor<'_> for ExponentVisitor {
    type Value = Exponent;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("an exponent such as \"2\", \"3/2\" or \"inf\"")
    }

    fn visit_str<E: de::Error>(self, v: &str) -> Result<Exponent, E> {
        v.parse().map_err(E::custom)
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> Result<Exponent, E> {
        let p = i64::try_from(v).map_err(|_| E::custom("exponent out of range"))?;
        Exponent::new(Rational::from_integer(p)).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> Result<Exponent, E> {
        Exponent::new(Rational::from_integer(v)).map_err(E::custom)
    }
}
