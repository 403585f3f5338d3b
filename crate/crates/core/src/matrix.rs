//! Integer 2×2 matrices.

use std::fmt;
use std::ops::Mul;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::Number;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    #[serde(with = "dec")]
    pub m11: BigInt,
    #[serde(with = "dec")]
    pub m12: BigInt,
    #[serde(with = "dec")]
    pub m21: BigInt,
    #[serde(with = "dec")]
    pub m22: BigInt,
}

/// Big integers as decimal strings.
pub(crate) mod dec {
    use num_bigint::BigInt;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

impl Mat2 {
    pub fn new(m11: i64, m12: i64, m21: i64, m22: i64) -> Self {
        Mat2 {
            m11: m11.into(),
            m12: m12.into(),
            m21: m21.into(),
            m22: m22.into(),
        }
    }

    pub fn identity() -> Self {
        Mat2::new(1, 0, 0, 1)
    }

    pub fn det(&self) -> BigInt {
        &self.m11 * &self.m22 - &self.m12 * &self.m21
    }

    pub fn apply(&self, v: &[BigInt; 2]) -> [BigInt; 2] {
        [
            &self.m11 * &v[0] + &self.m12 * &v[1],
            &self.m21 * &v[0] + &self.m22 * &v[1],
        ]
    }

    /// ‖M·v‖₁ for a nonnegative vector.
    pub fn norm1_of(&self, v: [i64; 2]) -> BigInt {
        let [x, y] = self.apply(&[v[0].into(), v[1].into()]);
        x.abs() + y.abs()
    }

    pub fn col_sums(&self) -> (BigInt, BigInt) {
        (&self.m11 + &self.m21, &self.m12 + &self.m22)
    }

    /// max of absolute column sums.
    pub fn norm1(&self) -> BigInt {
        let a = self.m11.abs() + self.m21.abs();
        let b = self.m12.abs() + self.m22.abs();
        a.max(b)
    }

    /// max of absolute row sums.
    pub fn norm_inf(&self) -> BigInt {
        let a = self.m11.abs() + self.m12.abs();
        let b = self.m21.abs() + self.m22.abs();
        a.max(b)
    }

    pub fn is_nonnegative(&self) -> bool {
        [&self.m11, &self.m12, &self.m21, &self.m22]
            .iter()
            .all(|x| !x.is_negative())
    }

    pub fn min_col_sum(&self) -> BigInt {
        let (a, b) = self.col_sums();
        a.min(b)
    }

    /// Inverse of a unimodular matrix.
    pub fn inverse_unimodular(&self) -> Option<Mat2> {
        let d = self.det();
        if d.is_one() {
            Some(Mat2 {
                m11: self.m22.clone(),
                m12: -&self.m12,
                m21: -&self.m21,
                m22: self.m11.clone(),
            })
        } else if d == -BigInt::one() {
            Some(Mat2 {
                m11: -&self.m22,
                m12: self.m12.clone(),
                m21: self.m21.clone(),
                m22: -&self.m11,
            })
        } else {
            None
        }
    }

    pub fn to_f64(&self) -> [[f64; 2]; 2] {
        let f = |x: &BigInt| x.to_f64().unwrap_or(f64::INFINITY);
        [[f(&self.m11), f(&self.m12)], [f(&self.m21), f(&self.m22)]]
    }

    /// Möbius action `(m11 x + m12)/(m21 x + m22)`.
    pub fn mobius(&self, x: &Number) -> crate::Result<Number> {
        let c = |v: &BigInt| {
            if x.is_float() {
                Number::Float(v.to_f64().unwrap_or(f64::NAN))
            } else {
                Number::from_bigint(v.clone())
            }
        };
        let num = &c(&self.m11) * x + c(&self.m12);
        let den = &c(&self.m21) * x + c(&self.m22);
        if den.is_zero() {
            return Err(crate::Error::DivisionByZero);
        }
        Ok(num / den)
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.m11, &self.m12, &self.m21, &self.m22]
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|x| x.is_zero())
    }
}

impl Mul for &Mat2 {
    type Output = Mat2;
    fn mul(self, o: &Mat2) -> Mat2 {
        Mat2 {
            m11: &self.m11 * &o.m11 + &self.m12 * &o.m21,
            m12: &self.m11 * &o.m12 + &self.m12 * &o.m22,
            m21: &self.m21 * &o.m11 + &self.m22 * &o.m21,
            m22: &self.m21 * &o.m12 + &self.m22 * &o.m22,
        }
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        &self * &o
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.m11, self.m12, self.m21, self.m22)
    }
}
