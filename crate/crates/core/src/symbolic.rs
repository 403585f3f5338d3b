//! Words over {a,b}, substitutions, limit words and tower statistics.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::cfrac::{self, IntervalParam};
use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::pet::Param;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Letter {
    A,
    B,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::A => 'a',
            Letter::B => 'b',
        }
    }
}

/// Packed word; bit set means `b`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Word {
    bits: Vec<u64>,
    len: usize,
}

impl Word {
    pub fn new() -> Self {
        Word::default()
    }

    pub fn with_capacity(n: usize) -> Self {
        Word {
            bits: Vec::with_capacity(n.div_ceil(64)),
            len: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn push(&mut self, l: Letter) {
        if self.len % 64 == 0 {
            self.bits.push(0);
        }
        if l == Letter::B {
            self.bits[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    pub fn get(&self, i: usize) -> Letter {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        if self.bits[i / 64] >> (i % 64) & 1 == 1 {
            Letter::B
        } else {
            Letter::A
        }
    }

    pub fn first(&self) -> Option<Letter> {
        (!self.is_empty()).then(|| self.get(0))
    }

    pub fn iter(&self) -> impl Iterator<Item = Letter> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn extend_from(&mut self, w: &Word) {
        if self.len % 64 == 0 {
            self.bits.extend_from_slice(&w.bits);
            self.len += w.len;
            return;
        }
        for l in w.iter() {
            self.push(l);
        }
    }

    pub fn truncate(&mut self, n: usize) {
        if n >= self.len {
            return;
        }
        self.len = n;
        self.bits.truncate(n.div_ceil(64));
        if n % 64 != 0 {
            let last = self.bits.len() - 1;
            self.bits[last] &= (1u64 << (n % 64)) - 1;
        }
    }

    pub fn prefix(&self, n: usize) -> Word {
        let mut w = self.clone();
        w.truncate(n);
        w
    }

    pub fn count_b(&self) -> usize {
        self.bits.iter().map(|x| x.count_ones() as usize).sum()
    }

    pub fn count_a(&self) -> usize {
        self.len - self.count_b()
    }

    pub fn rotate_left(&self, k: usize) -> Word {
        if self.is_empty() {
            return self.clone();
        }
        let k = k % self.len;
        (k..self.len).chain(0..k).map(|i| self.get(i)).collect()
    }

    /// Bits of the factor at `i` of length `n ≤ 64`, packed little-endian.
    pub fn factor_key(&self, i: usize, n: usize) -> u64 {
        debug_assert!(n <= 64 && i + n <= self.len);
        if n == 0 {
            return 0;
        }
        let (w, o) = (i / 64, i % 64);
        let mut v = self.bits[w] >> o;
        if o != 0 && w + 1 < self.bits.len() {
            v |= self.bits[w + 1] << (64 - o);
        }
        if n == 64 {
            v
        } else {
            v & ((1u64 << n) - 1)
        }
    }

    pub fn factor(&self, i: usize, n: usize) -> Word {
        (i..i + n).map(|k| self.get(k)).collect()
    }

    /// Smallest period p such that w[i] = w[i+p] for all valid i.
    pub fn smallest_period(&self) -> usize {
        (1..=self.len)
            .find(|&p| (0..self.len - p).all(|i| self.get(i) == self.get(i + p)))
            .unwrap_or(self.len)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(it: I) -> Self {
        let mut w = Word::new();
        for l in it {
            w.push(l);
        }
        w
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(Letter::as_char).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                'a' => Ok(Letter::A),
                'b' => Ok(Letter::B),
                _ => Err(Error::Parse(s.to_string())),
            })
            .collect()
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Substitution {
    pub image_a: Word,
    pub image_b: Word,
}

impl Substitution {
    pub fn new(image_a: Word, image_b: Word) -> Self {
        Substitution { image_a, image_b }
    }

    pub fn identity() -> Self {
        Substitution::new("a".parse().unwrap(), "b".parse().unwrap())
    }

    pub fn image(&self, l: Letter) -> &Word {
        match l {
            Letter::A => &self.image_a,
            Letter::B => &self.image_b,
        }
    }

    pub fn apply(&self, w: &Word) -> Word {
        let mut out = Word::new();
        for l in w.iter() {
            out.extend_from(self.image(l));
        }
        out
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &Substitution) -> Substitution {
        Substitution::new(self.apply(&inner.image_a), self.apply(&inner.image_b))
    }

    /// Column j counts the letters of the image of the j-th letter.
    pub fn abelianization(&self) -> Mat2 {
        let c = |w: &Word| (w.count_a() as i64, w.count_b() as i64);
        let (a1, b1) = c(&self.image_a);
        let (a2, b2) = c(&self.image_b);
        Mat2::new(a1, a2, b1, b2)
    }
}

pub fn apply(s: &Substitution, w: &Word) -> Word {
    s.apply(w)
}

pub fn compose(s1: &Substitution, s2: &Substitution) -> Substitution {
    s1.compose(s2)
}

/// Number of distinct factors of length `n`.
pub fn complexity(w: &Word, n: usize) -> Result<usize> {
    let needed = 20 * n.max(1);
    if w.len() < needed {
        return Err(Error::WindowTooShort {
            needed,
            have: w.len(),
        });
    }
    let count = w.len() - n + 1;
    if n <= 64 {
        let keys: HashSet<u64> = (0..count).map(|i| w.factor_key(i, n)).collect();
        Ok(keys.len())
    } else {
        let keys: HashSet<Word> = (0..count).map(|i| w.factor(i, n)).collect();
        Ok(keys.len())
    }
}

/// Accelerated substitutions 𝛔 along the expansion of `p`, to depth `depth`.
pub fn accelerated_levels(p: &Param, depth: usize) -> Result<Vec<cfrac::Accel>> {
    let mut x = IntervalParam::from_param(p);
    let mut out = Vec::with_capacity(depth);
    for k in 0..depth {
        let acc = cfrac::accel(&x).map_err(|e| match e {
            Error::Terminal(_) => Error::Terminal(k),
            e => e,
        })?;
        x = IntervalParam::new(acc.y.clone())?;
        out.push(acc);
    }
    Ok(out)
}

/// Prefix of length `len` of the limit word u_ω.
pub fn limit_word(p: &Param, len: usize) -> Result<Word> {
    // depth until the image of `a` is long enough
    let mut levels = Vec::new();
    let mut x = IntervalParam::from_param(p);
    let mut size_a = BigInt::from(1);
    let target = BigInt::from(len.max(1));
    let mut prod = Mat2::identity();
    while size_a < target || levels.is_empty() {
        let acc = cfrac::accel(&x).map_err(|e| match e {
            Error::Terminal(_) => Error::Terminal(levels.len()),
            e => e,
        })?;
        prod = &prod * &acc.m_bold;
        size_a = prod.col_sums().0;
        x = IntervalParam::new(acc.y.clone())?;
        levels.push(acc.sigma_bold);
        if levels.len() > 100_000 {
            return Err(Error::NotTerminated(levels.len()));
        }
    }
    let mut w: Word = "a".parse()?;
    for s in levels.iter().rev() {
        let mut next = Word::with_capacity(len);
        for l in w.iter() {
            next.extend_from(s.image(l));
            if next.len() >= len {
                break;
            }
        }
        next.truncate(len);
        w = next;
    }
    Ok(w)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TowerStats {
    pub l: usize,
    #[serde(with = "crate::matrix::dec")]
    pub n_a: BigInt,
    #[serde(with = "crate::matrix::dec")]
    pub n_b: BigInt,
    #[serde(with = "crate::matrix::dec")]
    pub n: BigInt,
    pub alpha: f64,
    pub beta: f64,
    pub blocks: usize,
    pub prefix_len: usize,
}

impl TowerStats {
    pub const CSV_HEADER: &'static str = "l,Na,Nb,N,alpha,beta,blocks,prefix_len";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{:e},{:e},{},{}",
            self.l, self.n_a, self.n_b, self.n, self.alpha, self.beta, self.blocks, self.prefix_len
        )
    }
}

/// Product 𝐌^{(ℓ)} of ℓ accelerated matrices.
pub fn accelerated_product(levels: &[cfrac::Accel]) -> Mat2 {
    levels
        .iter()
        .fold(Mat2::identity(), |acc, a| &acc * &a.m_bold)
}

/// Depth-ℓ tower counts and block measures from a prefix of u_ω.
pub fn tower_stats(p: &Param, l: usize, prefix_len: usize) -> Result<TowerStats> {
    let levels = accelerated_levels(p, l)?;
    let m = accelerated_product(&levels);
    let (n_a, n_b) = m.col_sums();
    let n = &n_a + &n_b;
    let la = n_a.to_usize().unwrap_or(usize::MAX);
    let lb = n_b.to_usize().unwrap_or(usize::MAX);
    // level-ℓ letters of the prefix: u_ω = 𝛔^{(ℓ)}(u_{𝐒^ℓ ω})
    let deep = {
        let x = IntervalParam::new(match levels.last() {
            Some(a) => a.y.clone(),
            None => IntervalParam::from_param(p).x().clone(),
        })?;
        let budget = prefix_len / la.min(lb).max(1) + 2;
        limit_word(&x.to_param(), budget)?
    };
    let (mut total, mut count_a, mut count_b) = (0usize, 0usize, 0usize);
    for letter in deep.iter() {
        let size = if letter == Letter::A { la } else { lb };
        if total.saturating_add(size) > prefix_len {
            break;
        }
        total += size;
        match letter {
            Letter::A => count_a += 1,
            Letter::B => count_b += 1,
        }
    }
    let blocks = count_a + count_b;
    if blocks < 100 {
        return Err(Error::PrefixTooShort(blocks));
    }
    Ok(TowerStats {
        l,
        n_a,
        n_b,
        n,
        alpha: count_a as f64 / total as f64,
        beta: count_b as f64 / total as f64,
        blocks,
        prefix_len: total,
    })
}

/// Depth-ℓ approximation of the frequency of `a` in u_ω.
pub fn letter_frequency(p: &Param, l: usize) -> Result<f64> {
    let levels = accelerated_levels(p, l)?;
    let m = accelerated_product(&levels);
    let a = m.m11.to_f64().unwrap_or(f64::NAN);
    let b = m.m21.to_f64().unwrap_or(f64::NAN);
    Ok(if a.is_finite() && b.is_finite() {
        a / (a + b)
    } else {
        // huge entries: compare via logs of the big integers
        let (la, lb) = (big_ln(&m.m11), big_ln(&m.m21));
        1.0 / (1.0 + (lb - la).exp())
    })
}

pub fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}
