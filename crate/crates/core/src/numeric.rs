//! Exact scalars: rationals, real quadratic surds `a + b√d`, and binary floats.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// `a + b√d` with `b ≠ 0` and `d ≥ 2` squarefree.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Surd {
    a: BigRational,
    b: BigRational,
    d: u64,
}

impl Surd {
    pub fn a(&self) -> &BigRational {
        &self.a
    }
    pub fn b(&self) -> &BigRational {
        &self.b
    }
    pub fn d(&self) -> u64 {
        self.d
    }
}

#[derive(Clone, Debug)]
pub enum Number {
    Rational(BigRational),
    Surd(Surd),
    Float(f64),
}

/// Structural key for exact numbers, usable in hash sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExactKey {
    Rational(BigRational),
    Surd(Surd),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn sign_of(r: &BigRational) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

/// Sign of `a + b√d`, decided by rational sign tests.
fn surd_sign(a: &BigRational, b: &BigRational, d: u64) -> Ordering {
    use Ordering::*;
    match (sign_of(a), sign_of(b)) {
        (s, Equal) => s,
        (Equal, s) => s,
        (Greater, Greater) => Greater,
        (Less, Less) => Less,
        (Greater, Less) => (a * a).cmp(&(b * b * BigInt::from(d))),
        (Less, Greater) => (b * b * BigInt::from(d)).cmp(&(a * a)),
    }
}

/// `n = s²·d` with `d` squarefree.
fn squarefree_split(mut n: u64) -> (u64, u64) {
    if n == 0 {
        return (0, 1);
    }
    let mut s = 1u64;
    let mut d = 1u64;
    let mut p = 2u64;
    while p.saturating_mul(p).saturating_mul(p) <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    // at most two prime factors remain
    let r = n.sqrt();
    if r * r == n {
        s *= r;
    } else {
        d *= n;
    }
    (s, d)
}

impl Number {
    pub fn zero() -> Self {
        Number::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Number::Rational(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Number::Rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Number::Rational(rat(n, d))
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Number::Rational(BigRational::from_integer(n))
    }

    pub fn float(x: f64) -> Self {
        Number::Float(x)
    }

    /// Normalized `a + b√d` for any positive `d`.
    pub fn surd(a: BigRational, b: BigRational, d: u64) -> Result<Self> {
        if d == 0 {
            return Ok(Number::Rational(a));
        }
        let (s, d) = squarefree_split(d);
        let b = b * BigInt::from(s);
        if d == 1 {
            return Ok(Number::Rational(a + b));
        }
        if b.is_zero() {
            return Ok(Number::Rational(a));
        }
        Ok(Number::Surd(Surd { a, b, d }))
    }

    /// `√r` for a nonnegative rational.
    pub fn sqrt_rational(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::InvalidArgument("square root of a negative number".into()));
        }
        let pq = r.numer() * r.denom();
        let pq = pq
            .to_u64()
            .ok_or_else(|| Error::InvalidArgument("radicand too large".into()))?;
        let (s, d) = squarefree_split(pq);
        let coeff = BigRational::new(BigInt::from(s), r.denom().clone());
        Number::surd(BigRational::zero(), coeff, d)
    }

    /// `p + q√d` with small integer coefficients.
    pub fn quad(p: i64, q: i64, d: u64) -> Self {
        Number::surd(rat(p, 1), rat(q, 1), d).expect("valid surd")
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Number::Float(_))
    }

    pub fn is_float(&self) -> bool {
        matches!(self, Number::Float(_))
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, Number::Rational(_))
    }

    /// Radicand of the quadratic field, if any.
    pub fn field(&self) -> Option<u64> {
        match self {
            Number::Surd(s) => Some(s.d),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Number::Rational(r) => Some(r),
            _ => None,
        }
    }

    pub fn exact_key(&self) -> Option<ExactKey> {
        match self {
            Number::Rational(r) => Some(ExactKey::Rational(r.clone())),
            Number::Surd(s) => Some(ExactKey::Surd(s.clone())),
            Number::Float(_) => None,
        }
    }

    /// Same kind of number (exact/float) as `self`, with value `v`.
    pub fn like(&self, v: i64) -> Number {
        if self.is_float() {
            Number::Float(v as f64)
        } else {
            Number::int(v)
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Number::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
            Number::Float(x) => *x,
            Number::Surd(s) => {
                let af = s.a.to_f64().unwrap_or(f64::NAN);
                let bf = s.b.to_f64().unwrap_or(f64::NAN);
                let root = (s.d as f64).sqrt();
                if s.a.is_zero() || s.a.is_positive() == s.b.is_positive() {
                    af + bf * root
                } else {
                    // cancellation: use the conjugate form
                    // a² − b²d over a common denominator, left unreduced
                    let (p, q) = (s.a.numer(), s.a.denom());
                    let (r, t) = (s.b.numer(), s.b.denom());
                    let num = p * p * t * t - r * r * q * q * BigInt::from(s.d);
                    let norm = BigRational::new_raw(num, q * q * t * t);
                    norm.to_f64().unwrap_or(f64::NAN) / (af - bf * root)
                }
            }
        }
    }

    /// Float value with an absolute error bound, for exact numbers of moderate size.
    fn enclosure(&self) -> Option<(f64, f64)> {
        const REL: f64 = 1e-13;
        let (v, mag) = match self {
            Number::Rational(r) => {
                let v = r.to_f64()?;
                (v, v.abs())
            }
            Number::Surd(s) => {
                let (a, b) = (s.a.to_f64()?, s.b.to_f64()?);
                let root = (s.d as f64).sqrt();
                (a + b * root, a.abs() + b.abs() * root)
            }
            Number::Float(_) => return None,
        };
        let ok = v.is_finite() && mag < 1e300 && (mag == 0.0 || mag > 1e-300);
        ok.then_some((v, mag * REL))
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Number::Rational(r) => sign_of(r),
            Number::Surd(s) => surd_sign(&s.a, &s.b, s.d),
            Number::Float(x) => x.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    pub fn is_positive(&self) -> bool {
        self.signum() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.signum() == Ordering::Less
    }

    pub fn abs(&self) -> Number {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Exact floor (float values are floored directly).
    pub fn floor(&self) -> BigInt {
        match self {
            Number::Rational(r) => r.numer().div_floor(r.denom()),
            Number::Float(x) => BigInt::from_f64(x.floor()).unwrap_or_default(),
            Number::Surd(_) => {
                let mut k = BigInt::from_f64(self.to_f64().floor()).unwrap_or_default();
                loop {
                    let kn = Number::from_bigint(k.clone());
                    if *self < kn {
                        k -= 1;
                        continue;
                    }
                    let k1 = Number::from_bigint(&k + 1);
                    if *self >= k1 {
                        k += 1;
                        continue;
                    }
                    return k;
                }
            }
        }
    }

    /// `self − floor(self)`.
    pub fn fract(&self) -> Number {
        match self {
            Number::Float(x) => Number::Float(x - x.floor()),
            _ => self - &Number::from_bigint(self.floor()),
        }
    }

    pub fn recip(&self) -> Result<Number> {
        Number::one().arith(self, Op::Div)
    }

    pub fn arith(&self, other: &Number, op: Op) -> Result<Number> {
        use Number::*;
        if self.is_float() || other.is_float() {
            let (x, y) = (self.to_f64(), other.to_f64());
            return Ok(Float(match op {
                Op::Add => x + y,
                Op::Sub => x - y,
                Op::Mul => x * y,
                Op::Div => {
                    if y == 0.0 {
                        return Err(Error::DivisionByZero);
                    }
                    x / y
                }
            }));
        }
        let (a1, b1, d1) = self.parts();
        let (a2, b2, d2) = other.parts();
        let d = match (d1, d2) {
            (0, d) | (d, 0) => d,
            (x, y) if x == y => x,
            (x, y) => return Err(Error::MixedSurdFields(x, y)),
        };
        let dd = BigInt::from(d);
        // d is already squarefree here
        let reduced = |a: BigRational, b: BigRational| {
            Ok(if d == 0 || b.is_zero() {
                Number::Rational(a)
            } else {
                Number::Surd(crate::numeric::Surd { a, b, d })
            })
        };
        match op {
            Op::Add => reduced(a1 + a2, b1 + b2),
            Op::Sub => reduced(a1 - a2, b1 - b2),
            Op::Mul => reduced(&a1 * &a2 + &b1 * &b2 * &dd, &a1 * &b2 + &a2 * &b1),
            Op::Div => {
                let norm = &a2 * &a2 - &b2 * &b2 * &dd;
                if norm.is_zero() {
                    return Err(Error::DivisionByZero);
                }
                // (a1 + b1√d)(a2 − b2√d) / norm
                let na = (&a1 * &a2 - &b1 * &b2 * &dd) / &norm;
                let nb = (&b1 * &a2 - &a1 * &b2) / &norm;
                reduced(na, nb)
            }
        }
    }

    fn parts(&self) -> (BigRational, BigRational, u64) {
        match self {
            Number::Rational(r) => (r.clone(), BigRational::zero(), 0),
            Number::Surd(s) => (s.a.clone(), s.b.clone(), s.d),
            Number::Float(_) => unreachable!("float has no exact parts"),
        }
    }

    /// Total order on non-NaN numbers; exact for exact operands, even across fields.
    pub fn compare(&self, other: &Number) -> Ordering {
        if self.is_float() || other.is_float() {
            return self
                .to_f64()
                .partial_cmp(&other.to_f64())
                .unwrap_or(Ordering::Equal);
        }
        if let (Some((x, ex)), Some((y, ey))) = (self.enclosure(), other.enclosure()) {
            if (x - y).abs() > ex + ey {
                return x.partial_cmp(&y).unwrap_or(Ordering::Equal);
            }
        }
        match self.arith(other, Op::Sub) {
            Ok(diff) => diff.signum(),
            Err(_) => {
                // a1 + b1√d1 − b2√d2 with d1 ≠ d2
                let (a1, b1, d1) = self.parts();
                let (a2, b2, d2) = other.parts();
                let p = a1 - a2;
                let sa = surd_sign(&p, &b1, d1);
                let sb = sign_of(&b2).reverse();
                use Ordering::*;
                match (sa, sb) {
                    (s, Equal) | (Equal, s) => s,
                    (x, y) if x == y => x,
                    (sa, _) => {
                        // compare squares: A² − B²
                        let d1b = BigInt::from(d1);
                        let ra = &p * &p + &b1 * &b1 * &d1b - &b2 * &b2 * BigInt::from(d2);
                        let rb = BigRational::from_integer(BigInt::from(2)) * &p * &b1;
                        let s = surd_sign(&ra, &rb, d1);
                        if sa == Greater {
                            s
                        } else {
                            s.reverse()
                        }
                    }
                }
            }
        }
    }

    pub fn min(&self, other: &Number) -> Number {
        if self.compare(other) == Ordering::Greater {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn max(&self, other: &Number) -> Number {
        if self.compare(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    /// Equality: structural for exact numbers, within `tol` once floats are involved.
    pub fn approx_eq(&self, other: &Number, tol: f64) -> bool {
        if self.is_exact() && other.is_exact() {
            self.compare(other) == Ordering::Equal
        } else {
            (self.to_f64() - other.to_f64()).abs() <= tol
        }
    }

    pub fn to_float(&self) -> Number {
        Number::Float(self.to_f64())
    }
}

impl From<i64> for Number {
    fn from(n: i64) -> Self {
        Number::int(n)
    }
}

impl From<f64> for Number {
    fn from(x: f64) -> Self {
        Number::Float(x)
    }
}

impl From<BigRational> for Number {
    fn from(r: BigRational) -> Self {
        Number::Rational(r)
    }
}

impl PartialEq for Number {
    fn eq(&self, other: &Self) -> bool {
        self.partial_cmp(other) == Some(Ordering::Equal)
    }
}

impl PartialOrd for Number {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.is_float() && self.to_f64().is_nan() || other.is_float() && other.to_f64().is_nan()
        {
            return None;
        }
        Some(self.compare(other))
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:expr) => {
        impl $tr<&Number> for &Number {
            type Output = Number;
            fn $m(self, rhs: &Number) -> Number {
                self.arith(rhs, $op).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Number> for Number {
            type Output = Number;
            fn $m(self, rhs: Number) -> Number {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Number> for Number {
            type Output = Number;
            fn $m(self, rhs: &Number) -> Number {
                (&self).$m(rhs)
            }
        }
        impl $tr<Number> for &Number {
            type Output = Number;
            fn $m(self, rhs: Number) -> Number {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, Op::Add);
binop!(Sub, sub, Op::Sub);
binop!(Mul, mul, Op::Mul);
binop!(Div, div, Op::Div);

impl Neg for &Number {
    type Output = Number;
    fn neg(self) -> Number {
        match self {
            Number::Rational(r) => Number::Rational(-r),
            Number::Float(x) => Number::Float(-x),
            Number::Surd(s) => Number::Surd(Surd {
                a: -&s.a,
                b: -&s.b,
                d: s.d,
            }),
        }
    }
}

impl Neg for Number {
    type Output = Number;
    fn neg(self) -> Number {
        -&self
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Number::Rational(r) => write!(f, "{}", fmt_rational(r)),
            Number::Float(x) => write!(f, "{x:?}"),
            Number::Surd(s) => {
                if !s.a.is_zero() {
                    write!(f, "{}", fmt_rational(&s.a))?;
                    if s.b.is_positive() {
                        write!(f, "+")?;
                    }
                }
                let babs = s.b.abs();
                if s.b.is_negative() {
                    write!(f, "-")?;
                }
                if babs.is_one() {
                    write!(f, "sqrt({})", s.d)
                } else {
                    write!(f, "{}*sqrt({})", fmt_rational(&babs), s.d)
                }
            }
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self) -> Error {
        Error::Parse(String::from_utf8_lossy(self.s).into_owned())
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err())
        }
    }

    fn expr(&mut self) -> Result<Number> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = acc.arith(&rhs, if c == b'+' { Op::Add } else { Op::Sub })?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Number> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = acc.arith(&rhs, if c == b'*' { Op::Mul } else { Op::Div })?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Number> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Number> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(b')')?;
                Ok(v)
            }
            Some(b's') => {
                if !self.s[self.pos..].starts_with(b"sqrt") {
                    return Err(self.err());
                }
                self.pos += 4;
                self.expect(b'(')?;
                let v = self.expr()?;
                self.expect(b')')?;
                match v {
                    Number::Rational(r) => Number::sqrt_rational(&r),
                    Number::Float(x) if x >= 0.0 => Ok(Number::Float(x.sqrt())),
                    _ => Err(self.err()),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.literal(),
            _ => Err(self.err()),
        }
    }

    fn literal(&mut self) -> Result<Number> {
        let start = self.pos;
        let mut is_float = false;
        while self.pos < self.s.len() {
            let c = self.s[self.pos];
            if c.is_ascii_digit() {
                self.pos += 1;
            } else if c == b'.' {
                is_float = true;
                self.pos += 1;
            } else if c == b'e' || c == b'E' {
                is_float = true;
                self.pos += 1;
                if matches!(self.s.get(self.pos), Some(b'+' | b'-')) {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
        let text = std::str::from_utf8(&self.s[start..self.pos]).map_err(|_| self.err())?;
        if is_float {
            text.parse::<f64>().map(Number::Float).map_err(|_| self.err())
        } else {
            text.parse::<BigInt>()
                .map(Number::from_bigint)
                .map_err(|_| self.err())
        }
    }
}

impl FromStr for Number {
    type Err = Error;

    /// Accepts `3/8`, `sqrt(2)-1`, `(1-3+sqrt(8))/2`, `0.7071`, `1e-5`.
    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            s: s.as_bytes(),
            pos: 0,
        };
        let v = p.expr()?;
        if p.peek().is_some() {
            return Err(p.err());
        }
        Ok(v)
    }
}

impl Serialize for Number {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Number {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn n(s: &str) -> Number {
        s.parse().unwrap()
    }

    #[test]
    fn square_of_silver_conjugate() {
        let x = n("sqrt(2)-1");
        let y = &x * &x;
        assert_eq!(y.exact_key(), Number::quad(3, -2, 2).exact_key());
    }

    #[test]
    fn identities() {
        let x = n("sqrt(5)/2+1/3");
        assert_eq!((&x + &Number::zero()).exact_key(), x.exact_key());
        assert_eq!(n("3/8").recip().unwrap().exact_key(), n("8/3").exact_key());
        assert_eq!(Number::zero().recip(), Err(Error::DivisionByZero));
    }

    #[test]
    fn floors_and_comparisons() {
        assert_eq!(n("8/3").floor(), BigInt::from(2));
        assert_eq!(n("1/(sqrt(2)-1)").floor(), BigInt::from(2));
        assert_eq!(n("-8/3").floor(), BigInt::from(-3));
        assert_eq!(n("sqrt(2)-1").compare(&n("1/2")), Ordering::Less);
        assert_eq!(n("sqrt(2)").compare(&n("sqrt(3)")), Ordering::Less);
        assert_eq!(n("1+sqrt(2)").compare(&n("sqrt(5)")), Ordering::Greater);
        assert_eq!(n("3-sqrt(2)").compare(&n("sqrt(3)-1/10")), Ordering::Less);
    }

    #[test]
    fn mixed_fields_are_an_error() {
        assert_eq!(
            n("sqrt(2)").arith(&n("sqrt(3)"), Op::Add),
            Err(Error::MixedSurdFields(2, 3))
        );
        assert!(n("sqrt(2)+0.5").is_float());
    }

    #[test]
    fn parser_forms() {
        assert_eq!(n("(1-3+sqrt(8))/2").exact_key(), n("sqrt(2)-1").exact_key());
        assert_eq!(n("sqrt(1/2)").exact_key(), n("sqrt(2)/2").exact_key());
        assert!(matches!(n("0.7071"), Number::Float(x) if x == 0.7071));
        assert!(matches!(n("1e-5"), Number::Float(x) if x == 1e-5));
        assert!("sqrt(".parse::<Number>().is_err());
        assert!("2 3".parse::<Number>().is_err());
        assert!("sqrt(-2)".parse::<Number>().is_err());
    }

    #[test]
    fn display_round_trips() {
        for s in ["3/8", "-2", "sqrt(2)-1", "1/2+3/7*sqrt(5)", "-sqrt(3)", "0.25", "1e-7"] {
            let x = n(s);
            let back: Number = x.to_string().parse().unwrap();
            assert_eq!(back.exact_key(), x.exact_key(), "{s}");
            assert_eq!(back.to_f64(), x.to_f64());
        }
    }

    #[test]
    fn conjugate_form_keeps_precision() {
        // 1e8+1 - sqrt(1e16+2e8) is about 5e-9 · ... cancellation-heavy
        let x = Number::quad(100_000_001, -1, 10_000_000_200_000_000);
        let exact = 1.0 / (100_000_001.0 + (1e16f64 + 2e8).sqrt());
        assert!((x.to_f64() / exact - 1.0).abs() < 1e-12);
    }

    #[test]
    fn squarefree_split_works() {
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(49), (7, 1));
        assert_eq!(squarefree_split(1_000_000_007 * 3), (1, 3_000_000_021));
        assert_eq!(squarefree_split(999_983u64 * 999_983), (999_983, 1));
    }

    fn surd_strategy() -> impl Strategy<Value = Number> {
        (-50i64..50, 1i64..20, -50i64..50, 1i64..20, prop::sample::select(vec![2u64, 3, 5, 7]))
            .prop_map(|(p, q, r, s, d)| {
                Number::surd(rat(p, q), rat(r, s), d).unwrap()
            })
    }

    fn big_float(x: &Number) -> f64 {
        // independent evaluation through high-precision integer square roots
        match x {
            Number::Surd(s) => {
                let scale = BigInt::from(10u64).pow(40);
                let root = (BigInt::from(s.d) * &scale * &scale).sqrt();
                let v = BigRational::from_integer(s.a.numer() * &scale) / s.a.denom()
                    + BigRational::new(s.b.numer() * root, s.b.denom().clone());
                (v / BigRational::from_integer(scale)).to_f64().unwrap()
            }
            other => other.to_f64(),
        }
    }

    proptest! {
        #[test]
        fn to_float_matches_high_precision(x in surd_strategy()) {
            let f = x.to_f64();
            let g = big_float(&x);
            prop_assert!((f - g).abs() <= 1e-15 * g.abs().max(1.0));
        }

        #[test]
        fn floor_brackets(x in surd_strategy()) {
            let k = Number::from_bigint(x.floor());
            prop_assert!(k <= x);
            prop_assert!(x < &k + &Number::one());
        }

        #[test]
        fn field_axioms(x in surd_strategy(), y in surd_strategy(), z in surd_strategy()) {
            let (x, y, z) = match (x.field(), y.field(), z.field()) {
                (Some(a), Some(b), Some(c)) if a == b && b == c => (x, y, z),
                _ => return Ok(()),
            };
            prop_assert_eq!(((&x + &y) + &z).exact_key(), (&x + (&y + &z)).exact_key());
            prop_assert_eq!(((&x * &y) * &z).exact_key(), (&x * (&y * &z)).exact_key());
            prop_assert_eq!((&x * (&y + &z)).exact_key(), (&x * &y + &x * &z).exact_key());
            if !y.is_zero() {
                prop_assert_eq!(((&x / &y) * &y).exact_key(), x.exact_key());
            }
        }

        #[test]
        fn compare_agrees_with_floats(x in surd_strategy(), y in surd_strategy()) {
            let (fx, fy) = (big_float(&x), big_float(&y));
            if (fx - fy).abs() > 1e-9 {
                prop_assert_eq!(x.compare(&y), fx.partial_cmp(&fy).unwrap());
            }
        }
    }
}
