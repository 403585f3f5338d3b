//! The square-rectangle exchange T_ω on X_θ = C ∪ R_θ.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::numeric::{ExactKey, Number};
use crate::renorm;
use crate::symbolic::{Letter, Word};

/// Float tolerance for orbit equality.
pub const FLOAT_EQ_TOL: f64 = 1e-12;
/// Float tolerance for snapping segment endpoints.
pub const FLOAT_SNAP_TOL: f64 = 1e-13;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Eps {
    Minus,
    Plus,
}

impl Eps {
    pub fn from_sign(s: i64) -> Result<Eps> {
        match s {
            -1 => Ok(Eps::Minus),
            1 => Ok(Eps::Plus),
            _ => Err(Error::InvalidArgument(format!("eps must be ±1, got {s}"))),
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Eps::Minus => -1,
            Eps::Plus => 1,
        }
    }

    /// (−1)^{n+1}
    pub fn from_branch(n: u64) -> Eps {
        if n % 2 == 1 {
            Eps::Plus
        } else {
            Eps::Minus
        }
    }
}

impl Serialize for Eps {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.sign())
    }
}

impl<'de> Deserialize<'de> for Eps {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Eps::from_sign(i64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// ω = (θ, ε) with 0 ≤ θ < 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    theta: Number,
    eps: Eps,
}

impl Param {
    pub fn new(theta: Number, eps: Eps) -> Result<Param> {
        if theta.is_negative() || theta >= Number::one() {
            return Err(Error::InvalidArgument(format!("theta = {theta} not in [0,1)")));
        }
        Ok(Param { theta, eps })
    }

    pub fn theta(&self) -> &Number {
        &self.theta
    }

    pub fn eps(&self) -> Eps {
        self.eps
    }

    pub fn is_exact(&self) -> bool {
        self.theta.is_exact()
    }

    /// f_ε(x): x for ε = −1, 1 − x for ε = +1.
    pub fn f_eps(&self, x: &Number) -> Number {
        match self.eps {
            Eps::Minus => x.clone(),
            Eps::Plus => &self.theta.like(1) - x,
        }
    }

    pub fn one(&self) -> Number {
        self.theta.like(1)
    }

    pub fn zero(&self) -> Number {
        self.theta.like(0)
    }

    /// 1 + θ
    pub fn width(&self) -> Number {
        &self.one() + &self.theta
    }

    /// x = θ + (ε+1)/2 ∈ [0,2).
    pub fn interval(&self) -> Number {
        match self.eps {
            Eps::Minus => self.theta.clone(),
            Eps::Plus => &self.theta + &self.one(),
        }
    }

    pub fn from_interval(x: &Number) -> Result<Param> {
        let one = x.like(1);
        if x.is_negative() || *x >= x.like(2) {
            return Err(Error::InvalidArgument(format!("x = {x} not in [0,2)")));
        }
        if *x < one {
            Param::new(x.clone(), Eps::Minus)
        } else {
            Param::new(x - &one, Eps::Plus)
        }
    }

    pub fn to_float(&self) -> Param {
        Param {
            theta: self.theta.to_float(),
            eps: self.eps,
        }
    }

    pub fn exact_key(&self) -> Option<(ExactKey, Eps)> {
        self.theta.exact_key().map(|k| (k, self.eps))
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.theta, self.eps.sign())
    }
}

impl FromStr for Param {
    type Err = Error;

    /// `"theta,eps"` or `"x=value"`.
    fn from_str(s: &str) -> Result<Param> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("x=") {
            return Param::from_interval(&rest.parse()?);
        }
        let (t, e) = s
            .rsplit_once(',')
            .ok_or_else(|| Error::Parse(s.to_string()))?;
        let eps: i64 = e.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
        Param::new(t.parse()?, Eps::from_sign(eps)?)
    }
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: Number,
    pub y: Number,
}

impl Point {
    pub fn new(x: Number, y: Number) -> Point {
        Point { x, y }
    }

    pub fn approx_eq(&self, o: &Point, tol: f64) -> bool {
        self.x.approx_eq(&o.x, tol) && self.y.approx_eq(&o.y, tol)
    }

    /// max(|Δx|, |Δy|) as a float, exactly zero for equal exact points.
    pub fn distance_inf(&self, o: &Point) -> f64 {
        let d = |a: &Number, b: &Number| match a.arith(b, crate::numeric::Op::Sub) {
            Ok(v) => v.to_f64().abs(),
            Err(_) => (a.to_f64() - b.to_f64()).abs(),
        };
        d(&self.x, &o.x).max(d(&self.y, &o.y))
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64(), self.y.to_f64())
    }
}

impl FromStr for Point {
    type Err = Error;
    fn from_str(s: &str) -> Result<Point> {
        let (x, y) = s.split_once(',').ok_or_else(|| Error::Parse(s.to_string()))?;
        Ok(Point::new(x.parse()?, y.parse()?))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "H")]
    Horizontal,
    #[serde(rename = "V")]
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: Point,
    pub length: Number,
    pub axis: Axis,
}

impl Segment {
    pub fn end(&self) -> Point {
        match self.axis {
            Axis::Horizontal => Point::new(&self.start.x + &self.length, self.start.y.clone()),
            Axis::Vertical => Point::new(self.start.x.clone(), &self.start.y + &self.length),
        }
    }

    /// `SEG x y len H|V`
    pub fn to_line(&self) -> String {
        let tag = match self.axis {
            Axis::Horizontal => "H",
            Axis::Vertical => "V",
        };
        format!("SEG {} {} {} {}", self.start.x, self.start.y, self.length, tag)
    }

    pub fn from_line(line: &str) -> Result<Segment> {
        let err = || Error::Parse(line.to_string());
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 5 || f[0] != "SEG" {
            return Err(err());
        }
        let axis = match f[4] {
            "H" => Axis::Horizontal,
            "V" => Axis::Vertical,
            _ => return Err(err()),
        };
        Ok(Segment {
            start: Point::new(f[1].parse()?, f[2].parse()?),
            length: f[3].parse()?,
            axis,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x: Number,
    pub y: Number,
    pub width: Number,
    pub height: Number,
}

impl Rect {
    pub fn new(x: Number, y: Number, width: Number, height: Number) -> Rect {
        Rect {
            x,
            y,
            width,
            height,
        }
    }

    pub fn from_corners(a: &Point, b: &Point) -> Rect {
        let x0 = a.x.min(&b.x);
        let y0 = a.y.min(&b.y);
        let w = (&a.x - &b.x).abs();
        let h = (&a.y - &b.y).abs();
        Rect::new(x0, y0, w, h)
    }

    pub fn x1(&self) -> Number {
        &self.x + &self.width
    }

    pub fn y1(&self) -> Number {
        &self.y + &self.height
    }

    pub fn area(&self) -> Number {
        &self.width * &self.height
    }

    pub fn center(&self) -> Point {
        let two = self.x.like(2);
        Point::new(
            &self.x + &(&self.width / &two),
            &self.y + &(&self.height / &two),
        )
    }

    pub fn contains_open(&self, z: &Point) -> bool {
        z.x > self.x && z.x < self.x1() && z.y > self.y && z.y < self.y1()
    }

    pub fn contains_closed(&self, z: &Point) -> bool {
        z.x >= self.x && z.x <= self.x1() && z.y >= self.y && z.y <= self.y1()
    }

    /// Point at fractional position (s, t) ∈ [0,1]².
    pub fn at(&self, s: &Number, t: &Number) -> Point {
        Point::new(&self.x + &(&self.width * s), &self.y + &(&self.height * t))
    }

    pub fn corners(&self) -> (Point, Point) {
        (
            Point::new(self.x.clone(), self.y.clone()),
            Point::new(self.x1(), self.y1()),
        )
    }

    pub fn to_f64(&self) -> [f64; 4] {
        [
            self.x.to_f64(),
            self.y.to_f64(),
            self.width.to_f64(),
            self.height.to_f64(),
        ]
    }
}

/// Periodic cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub rect: Rect,
    pub code_period: Word,
    pub orbit_period: u64,
}

impl Cell {
    pub fn period(&self) -> usize {
        self.code_period.len()
    }

    /// `CELL x y side period code`
    pub fn to_line(&self) -> String {
        format!(
            "CELL {} {} {} {} {}",
            self.rect.x,
            self.rect.y,
            self.rect.width,
            self.period(),
            self.code_period
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Piece {
    Square,
    Rectangle,
}

impl Piece {
    pub fn letter(self) -> Letter {
        match self {
            Piece::Square => Letter::A,
            Piece::Rectangle => Letter::B,
        }
    }
}

/// Which branch z belongs to.
pub fn locate(p: &Param, z: &Point) -> Result<Piece> {
    let (zero, one) = (p.zero(), p.one());
    let w = p.width();
    if z.y < zero || z.y > one || z.x < zero || z.x > w {
        return Err(Error::OutOfDomain);
    }
    if z.y == zero || z.y == one || z.x == zero || z.x == one || z.x == w {
        return Err(Error::OnDiscontinuity { step: 0 });
    }
    Ok(if z.x < one {
        Piece::Square
    } else {
        Piece::Rectangle
    })
}

/// Isometry `(u, v) ↦ (sx·u + tx, sy·v + ty)` where `(u, v)` is `z` or its swap.
#[derive(Clone, Debug)]
pub(crate) struct Iso {
    swap: bool,
    sx: i8,
    sy: i8,
    tx: Number,
    ty: Number,
}

impl Iso {
    pub(crate) fn branch(p: &Param, piece: Piece) -> Iso {
        match piece {
            Piece::Square => {
                let (sy, ty) = match p.eps {
                    Eps::Minus => (1, p.zero()),
                    Eps::Plus => (-1, p.one()),
                };
                Iso {
                    swap: true,
                    sx: -1,
                    sy,
                    tx: p.width(),
                    ty,
                }
            }
            Piece::Rectangle => Iso {
                swap: false,
                sx: 1,
                sy: -1,
                tx: -p.one(),
                ty: p.one(),
            },
        }
    }

    pub(crate) fn apply(&self, z: &Point) -> Point {
        let (u, v) = if self.swap { (&z.y, &z.x) } else { (&z.x, &z.y) };
        let s = |sg: i8, w: &Number, t: &Number| if sg > 0 { w + t } else { t - w };
        Point::new(s(self.sx, u, &self.tx), s(self.sy, v, &self.ty))
    }

    pub(crate) fn apply_rect(&self, r: &Rect) -> Rect {
        let (a, b) = r.corners();
        Rect::from_corners(&self.apply(&a), &self.apply(&b))
    }
}

pub fn step(p: &Param, z: &Point) -> Result<Point> {
    let piece = locate(p, z)?;
    Ok(Iso::branch(p, piece).apply(z))
}

pub fn step_inverse(p: &Param, z: &Point) -> Result<Point> {
    let (zero, one) = (p.zero(), p.one());
    let w = p.width();
    if z.y < zero || z.y > one || z.x < zero || z.x > w {
        return Err(Error::OutOfDomain);
    }
    if z.y == zero || z.y == one || z.x == zero || z.x == w || z.x == p.theta {
        return Err(Error::OnDiscontinuity { step: 0 });
    }
    Ok(if z.x > p.theta {
        // T(C): (f_ε(y), 1+θ−x)
        Point::new(p.f_eps(&z.y), &w - &z.x)
    } else {
        Point::new(&z.x + &one, &one - &z.y)
    })
}

/// Sym_ω(x, y) = (1+θ−x, f_ε(y)).
pub fn sym(p: &Param, z: &Point) -> Point {
    Point::new(&p.width() - &z.x, p.f_eps(&z.y))
}

pub fn step_rect(p: &Param, r: &Rect) -> Result<Rect> {
    let piece = locate(p, &r.center())?;
    Ok(Iso::branch(p, piece).apply_rect(r))
}

pub fn orbit(p: &Param, z: &Point, n: usize) -> Result<Vec<Point>> {
    let mut out = Vec::with_capacity(n + 1);
    let mut cur = z.clone();
    out.push(cur.clone());
    for k in 0..n {
        cur = step(p, &cur).map_err(|e| with_step(e, k))?;
        out.push(cur.clone());
    }
    Ok(out)
}

fn with_step(e: Error, k: usize) -> Error {
    match e {
        Error::OnDiscontinuity { .. } => Error::OnDiscontinuity { step: k },
        e => e,
    }
}

/// Letters of z, Tz, …, T^{n−1}z.
pub fn code_orbit(p: &Param, z: &Point, n: usize) -> Result<Word> {
    let mut w = Word::with_capacity(n);
    let mut cur = z.clone();
    for k in 0..n {
        let piece = locate(p, &cur).map_err(|e| with_step(e, k))?;
        w.push(piece.letter());
        cur = Iso::branch(p, piece).apply(&cur);
    }
    Ok(w)
}

/// Smallest k ≤ max_n with T^k z = z.
pub fn detect_period(p: &Param, z: &Point, max_n: usize) -> Result<Option<usize>> {
    let mut cur = z.clone();
    for k in 1..=max_n {
        cur = step(p, &cur).map_err(|e| with_step(e, k - 1))?;
        if cur.approx_eq(z, FLOAT_EQ_TOL) {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

struct LevelCell {
    rect: Rect,
    code: Word,
    orbit_period: u64,
}

fn seeds(w: &Param) -> Vec<LevelCell> {
    let (zero, one) = (w.zero(), w.one());
    let th = w.theta.clone();
    if th.is_zero() {
        return vec![LevelCell {
            rect: Rect::new(zero, w.zero(), one.clone(), one),
            code: "a".parse().unwrap(),
            orbit_period: if w.eps == Eps::Minus { 4 } else { 2 },
        }];
    }
    match w.eps {
        Eps::Minus => vec![LevelCell {
            rect: Rect::new(th.clone(), th.clone(), &one - &th, &one - &th),
            code: "a".parse().unwrap(),
            orbit_period: 4,
        }],
        Eps::Plus => vec![
            LevelCell {
                rect: Rect::new(zero.clone(), zero, th.clone(), th.clone()),
                code: "ab".parse().unwrap(),
                orbit_period: 8,
            },
            LevelCell {
                rect: Rect::new(one.clone(), &one - &th, th.clone(), th),
                code: "ba".parse().unwrap(),
                orbit_period: 8,
            },
        ],
    }
}

/// Level cap for the renormalization descent in `islands`.
pub const ISLAND_LEVEL_CAP: usize = 10_000;

/// Periodic cells of period ≤ `max_period` (all cells if `None`).
pub fn islands(p: &Param, max_period: Option<u64>) -> Result<Vec<Cell>> {
    let mut levels = vec![p.clone()];
    let mut mats = vec![Mat2::identity()];
    loop {
        let cur = levels.last().unwrap();
        if cur.theta.is_zero() {
            break;
        }
        if let Some(mp) = max_period {
            if mats.last().unwrap().min_col_sum() > mp.into() {
                break;
            }
        }
        if levels.len() > ISLAND_LEVEL_CAP {
            return Err(Error::NotTerminated(ISLAND_LEVEL_CAP));
        }
        let m = renorm::incidence_matrix(cur)?;
        let next = renorm::renorm_step(cur)?;
        let prod = mats.last().unwrap() * &m;
        mats.push(prod);
        levels.push(next);
    }
    let keep = |j: usize, code: &Word| -> bool {
        let Some(mp) = max_period else { return true };
        let v = [code.count_a() as i64, code.count_b() as i64];
        mats[j].norm1_of(v) <= mp.into()
    };
    let deepest = levels.len() - 1;
    let mut cells: Vec<LevelCell> = Vec::new();
    if levels[deepest].theta.is_zero() {
        cells = seeds(&levels[deepest])
            .into_iter()
            .filter(|c| keep(deepest, &c.code))
            .collect();
    }
    for j in (0..deepest).rev() {
        let w = &levels[j];
        let sigma = renorm::substitution(w)?;
        let mut next: Vec<LevelCell> = seeds(w)
            .into_iter()
            .filter(|c| keep(j, &c.code))
            .collect();
        for c in &cells {
            let (a, b) = c.rect.corners();
            let z = Rect::from_corners(
                &renorm::similitude_inverse(w, &a),
                &renorm::similitude_inverse(w, &b),
            );
            let code = sigma.apply(&c.code);
            let ret = sigma.image(c.code.get(0)).len();
            let orbit_period = c.orbit_period / c.code.len() as u64 * code.len() as u64;
            let mut r = z;
            for i in 0..ret {
                let next_r = if i + 1 < ret { Some(step_rect(w, &r)?) } else { None };
                next.push(LevelCell {
                    rect: r,
                    code: code.rotate_left(i),
                    orbit_period,
                });
                match next_r {
                    Some(nr) => r = nr,
                    None => break,
                }
            }
        }
        cells = next;
    }
    Ok(cells
        .into_iter()
        .map(|c| Cell {
            rect: c.rect,
            code_period: c.code,
            orbit_period: c.orbit_period,
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum LineKey {
    Exact(Axis, ExactKey),
    Float(Axis, i64),
}

fn line_key(axis: Axis, c: &Number) -> LineKey {
    match c.exact_key() {
        Some(k) => LineKey::Exact(axis, k),
        None => LineKey::Float(axis, (c.to_f64() / FLOAT_SNAP_TOL / 10.0).round() as i64),
    }
}

fn lt(a: &Number, b: &Number) -> bool {
    if a.is_exact() && b.is_exact() {
        a.compare(b) == Ordering::Less
    } else {
        a.to_f64() < b.to_f64() - FLOAT_SNAP_TOL
    }
}

fn eq(a: &Number, b: &Number) -> bool {
    a.approx_eq(b, FLOAT_SNAP_TOL)
}

struct Line {
    axis: Axis,
    c: Number,
    pieces: Vec<(Number, Number)>,
}

impl Line {
    /// Inserts [lo, hi] and returns the parts not already covered.
    fn insert(&mut self, lo: Number, hi: Number) -> Vec<(Number, Number)> {
        let mut fresh = Vec::new();
        let mut cur = lo;
        let mut sorted: Vec<&(Number, Number)> = self.pieces.iter().collect();
        sorted.sort_by(|a, b| a.0.compare(&b.0));
        for (a, b) in sorted {
            if !lt(&cur, b) {
                continue;
            }
            if !lt(a, &hi) {
                break;
            }
            if lt(&cur, a) {
                fresh.push((cur.clone(), a.clone()));
            }
            cur = cur.max(b);
        }
        if lt(&cur, &hi) {
            fresh.push((cur, hi));
        }
        self.pieces.extend(fresh.iter().cloned());
        fresh
    }
}

type Raw = (Axis, Number, Number, Number);

fn pull_back(p: &Param, s: &Raw) -> Vec<Raw> {
    let (axis, c, lo, hi) = s;
    let (zero, one) = (p.zero(), p.one());
    let w = p.width();
    let th = &p.theta;
    let mut out = Vec::new();
    match axis {
        Axis::Horizontal => {
            if !lt(&zero, c) || !lt(c, &one) {
                return out;
            }
            let lo = lo.max(&zero);
            let hi = hi.min(&w);
            // part over T(R) = (0,θ)
            let a_hi = hi.min(th);
            if lt(&lo, &a_hi) {
                out.push((Axis::Horizontal, &one - c, &lo + &one, &a_hi + &one));
            }
            // part over T(C) = (θ, 1+θ)
            let b_lo = lo.max(th);
            if lt(&b_lo, &hi) {
                out.push((Axis::Vertical, p.f_eps(c), &w - &hi, &w - &b_lo));
            }
        }
        Axis::Vertical => {
            if !lt(&zero, c) || !lt(c, &w) || eq(c, th) {
                return out;
            }
            let lo = lo.max(&zero);
            let hi = hi.min(&one);
            if !lt(&lo, &hi) {
                return out;
            }
            if lt(c, th) {
                out.push((Axis::Vertical, c + &one, &one - &hi, &one - &lo));
            } else {
                let (a, b) = (p.f_eps(&lo), p.f_eps(&hi));
                let (a, b) = if lt(&a, &b) { (a, b) } else { (b, a) };
                out.push((Axis::Horizontal, &w - c, a, b));
            }
        }
    }
    out
}

/// Segments of ⋃_{k ≤ depth} T^{−k}(D_θ).
pub fn discontinuity_segments(p: &Param, depth: usize) -> Vec<Segment> {
    let (zero, one) = (p.zero(), p.one());
    let w = p.width();
    let th = p.theta.clone();
    let boundary: Vec<Raw> = vec![
        (Axis::Horizontal, zero.clone(), zero.clone(), one.clone()),
        (Axis::Horizontal, one.clone(), zero.clone(), one.clone()),
        (Axis::Vertical, zero.clone(), zero.clone(), one.clone()),
        (Axis::Vertical, one.clone(), zero.clone(), one.clone()),
        (Axis::Horizontal, zero.clone(), one.clone(), w.clone()),
        (Axis::Horizontal, one.clone(), one.clone(), w.clone()),
        (Axis::Vertical, w.clone(), zero.clone(), one.clone()),
    ];
    let boundary: Vec<Raw> = boundary
        .into_iter()
        .filter(|(_, _, lo, hi)| lt(lo, hi))
        .collect();
    let _ = th;
    let mut lines: Vec<Line> = Vec::new();
    let mut index: HashMap<LineKey, usize> = HashMap::new();
    let mut add = |s: Raw, lines: &mut Vec<Line>| -> Vec<Raw> {
        let key = line_key(s.0, &s.1);
        let i = *index.entry(key).or_insert_with(|| {
            lines.push(Line {
                axis: s.0,
                c: s.1.clone(),
                pieces: Vec::new(),
            });
            lines.len() - 1
        });
        lines[i]
            .insert(s.2, s.3)
            .into_iter()
            .map(|(a, b)| (s.0, s.1.clone(), a, b))
            .collect()
    };
    let mut frontier: Vec<Raw> = Vec::new();
    for s in boundary {
        frontier.extend(add(s, &mut lines));
    }
    for _ in 0..depth {
        let mut next = Vec::new();
        for s in &frontier {
            for q in pull_back(p, s) {
                next.extend(add(q, &mut lines));
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    let mut out: Vec<Segment> = Vec::new();
    for line in &lines {
        for (lo, hi) in &line.pieces {
            let start = match line.axis {
                Axis::Horizontal => Point::new(lo.clone(), line.c.clone()),
                Axis::Vertical => Point::new(line.c.clone(), lo.clone()),
            };
            out.push(Segment {
                start,
                length: hi - lo,
                axis: line.axis,
            });
        }
    }
    out.sort_by(|a, b| {
        a.axis
            .cmp(&b.axis)
            .then_with(|| a.start.x.compare(&b.start.x))
            .then_with(|| a.start.y.compare(&b.start.y))
    });
    out
}

/// Total length of a segment family as a float.
pub fn total_length(segs: &[Segment]) -> f64 {
    segs.iter().map(|s| s.length.to_f64()).sum()
}
