//! Renormalization: S on Ω, similitudes ψ_ω, induction zones, first return,
//! substitutions, incidence matrices, period sequences and covers.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::matrix::Mat2;
use crate::error::{Error, Result};
use crate::numeric::Number;
use crate::pet::{self, Eps, Param, Piece, Point, Rect};
use crate::symbolic::{Letter, Substitution, Word};

/// n_ω = ⌊1/f_ε(θ)⌋.
pub fn n_omega(p: &Param) -> Result<u64> {
    let f = p.f_eps(p.theta());
    if f.is_zero() {
        return Err(Error::Degenerate(format!("f_eps(theta) = 0 at {p}")));
    }
    let inv = f.recip()?;
    inv.floor()
        .to_u64()
        .ok_or_else(|| Error::Degenerate(format!("branch index overflows at {p}")))
}

/// S(θ, ε) = (1/f_ε(θ) − n, (−1)^{n+1}).
pub fn renorm_step(p: &Param) -> Result<Param> {
    if p.theta().is_zero() {
        return Err(Error::Terminal(0));
    }
    let n = n_omega(p)?;
    let inv = p.f_eps(p.theta()).recip()?;
    let theta = &inv - &p.theta().like(n as i64);
    Param::new(theta, Eps::from_branch(n))
}

/// Expansion ratio r(ω) = 1/f_ε(θ).
pub fn ratio(p: &Param) -> Result<Number> {
    p.f_eps(p.theta()).recip()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    Fwd,
    Inv,
}

/// ψ_ω: (y,x)/θ for ε = −1, (x, y−θ)/(1−θ) for ε = +1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Similitude {
    pub ratio: Number,
    pub swap_axes: bool,
    pub shift_y: Number,
}

impl Similitude {
    pub fn of(p: &Param) -> Result<Similitude> {
        Ok(Similitude {
            ratio: ratio(p)?,
            swap_axes: p.eps() == Eps::Minus,
            shift_y: match p.eps() {
                Eps::Minus => p.zero(),
                Eps::Plus => p.theta().clone(),
            },
        })
    }

    pub fn apply(&self, z: &Point) -> Point {
        if self.swap_axes {
            Point::new(&z.y * &self.ratio, &z.x * &self.ratio)
        } else {
            Point::new(&z.x * &self.ratio, &(&z.y - &self.shift_y) * &self.ratio)
        }
    }

    pub fn apply_inverse(&self, z: &Point) -> Point {
        if self.swap_axes {
            Point::new(&z.y / &self.ratio, &z.x / &self.ratio)
        } else {
            Point::new(&z.x / &self.ratio, &(&z.y / &self.ratio) + &self.shift_y)
        }
    }

    pub fn apply_rect_inverse(&self, r: &Rect) -> Rect {
        let (a, b) = r.corners();
        Rect::from_corners(&self.apply_inverse(&a), &self.apply_inverse(&b))
    }
}

pub fn similitude_apply(p: &Param, z: &Point, dir: Direction) -> Result<Point> {
    let s = Similitude::of(p)?;
    Ok(match dir {
        Direction::Fwd => s.apply(z),
        Direction::Inv => s.apply_inverse(z),
    })
}

pub(crate) fn similitude_inverse(p: &Param, z: &Point) -> Point {
    Similitude::of(p)
        .expect("non-degenerate parameter")
        .apply_inverse(z)
}

/// (C^ind, R^ind) = (ψ⁻¹(C_{Sω}), ψ⁻¹(R_{Sω})).
pub fn induction_zone(p: &Param) -> Result<(Rect, Rect)> {
    let next = renorm_step(p).map_err(|_| Error::Degenerate(format!("S is terminal at {p}")))?;
    let s = Similitude::of(p)?;
    let one = p.one();
    let c = Rect::new(p.zero(), p.zero(), one.clone(), one.clone());
    let r = Rect::new(one.clone(), p.zero(), next.theta().clone(), one);
    Ok((s.apply_rect_inverse(&c), s.apply_rect_inverse(&r)))
}

/// Which zone piece contains z (open rectangles).
pub fn zone_of(p: &Param, z: &Point) -> Result<Option<Piece>> {
    let (c, r) = induction_zone(p)?;
    Ok(if c.contains_open(z) {
        Some(Piece::Square)
    } else if r.contains_open(z) {
        Some(Piece::Rectangle)
    } else {
        None
    })
}

/// T^ind by the closed forms.
pub fn first_return(p: &Param, z: &Point) -> Result<(Point, u64)> {
    let piece = zone_of(p, z)?.ok_or(Error::NotInZone)?;
    // the closed forms assume the orbit avoids D_θ; check the start point
    pet::locate(p, z)?;
    let n = n_omega(p)?;
    let th = p.theta();
    let one = p.one();
    let nm1 = th.like(n as i64 - 1);
    let odd = n % 2 == 1;
    let (x, y) = (&z.x, &z.y);
    Ok(match (p.eps(), piece) {
        (Eps::Minus, Piece::Square) => {
            let nx = if odd { th - y } else { y.clone() };
            let ny = &(&one - x) - &(&nm1 * th);
            (Point::new(nx, ny), 3 * n - 1)
        }
        (Eps::Minus, Piece::Rectangle) => (Point::new(th - x, y - th), 3),
        (Eps::Plus, Piece::Square) => {
            let nx = &(&(&one + th) - y) - &(&(&one - th) * &nm1);
            let ny = if odd { &one - x } else { th + x };
            (Point::new(nx, ny), 3 * n - 2)
        }
        (Eps::Plus, Piece::Rectangle) => (Point::new(&(th + x) - &one, &(&one + th) - y), 3),
    })
}

/// T^ind by iterating T until the orbit re-enters the zone.
pub fn first_return_brute(p: &Param, z: &Point) -> Result<(Point, u64)> {
    let (c, r) = induction_zone(p)?;
    if !c.contains_open(z) && !r.contains_open(z) {
        return Err(Error::NotInZone);
    }
    let cap = 3 * n_omega(p)? + 3;
    let mut cur = z.clone();
    for k in 1..=cap {
        cur = pet::step(p, &cur).map_err(|e| match e {
            Error::OnDiscontinuity { .. } => Error::OnDiscontinuity { step: k as usize - 1 },
            e => e,
        })?;
        if c.contains_open(&cur) || r.contains_open(&cur) {
            return Ok((cur, k));
        }
    }
    Err(Error::NotTerminated(cap as usize))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InductionReport {
    pub param: Param,
    pub samples: usize,
    pub exact: bool,
    pub max_error: f64,
    pub tol: f64,
    pub resampled: usize,
    pub pass: bool,
}

fn random_in(rng: &mut ChaCha8Rng, p: &Param) -> Point {
    const DEN: i64 = 1 << 24;
    loop {
        let z = if p.is_exact() {
            Point::new(
                Number::ratio(rng.gen_range(1..2 * DEN), DEN),
                Number::ratio(rng.gen_range(1..DEN), DEN),
            )
        } else {
            Point::new(
                Number::Float(rng.gen::<f64>() * 2.0),
                Number::Float(rng.gen::<f64>()),
            )
        };
        if z.x < p.width() && z.x != p.one() && !z.x.is_zero() && !z.y.is_zero() {
            return z;
        }
    }
}

const VERIFY_CHUNK: usize = 256;

/// max |ψ(T^ind(ψ⁻¹ z)) − T_{Sω}(z)| over random z ∈ X_{Sω}.
pub fn induction_verify(p: &Param, samples: usize, tol: f64, seed: u64) -> Result<InductionReport> {
    let next = renorm_step(p).map_err(|_| Error::Degenerate(format!("S is terminal at {p}")))?;
    let s = Similitude::of(p)?;
    let cap = samples.max(1000);
    // chunk k draws from stream k of the seed
    let chunks: Vec<Result<(f64, usize)>> = (0..samples.div_ceil(VERIFY_CHUNK))
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let quota = VERIFY_CHUNK.min(samples - k * VERIFY_CHUNK);
            let (mut max_error, mut resampled, mut done) = (0f64, 0, 0);
            while done < quota {
                let z = random_in(&mut rng, &next);
                let lhs = first_return_brute(p, &s.apply_inverse(&z)).map(|(w, _)| s.apply(&w));
                match (lhs, pet::step(&next, &z)) {
                    (Ok(a), Ok(b)) => {
                        max_error = max_error.max(a.distance_inf(&b));
                        done += 1;
                    }
                    (Err(Error::OnDiscontinuity { .. }), _) | (_, Err(Error::OnDiscontinuity { .. })) => {
                        resampled += 1;
                        if resampled > cap {
                            return Err(Error::SamplerFailure("too many discontinuity hits".into()));
                        }
                    }
                    (Err(e), _) | (_, Err(e)) => return Err(e),
                }
            }
            Ok((max_error, resampled))
        })
        .collect();
    let (mut max_error, mut resampled) = (0f64, 0);
    for c in chunks {
        let (m, r) = c?;
        max_error = max_error.max(m);
        resampled += r;
    }
    if resampled > cap {
        return Err(Error::SamplerFailure("too many discontinuity hits".into()));
    }
    let exact = p.is_exact();
    let pass = if exact { max_error == 0.0 } else { max_error <= tol };
    Ok(InductionReport {
        param: p.clone(),
        samples,
        exact,
        max_error,
        tol,
        resampled,
        pass,
    })
}

fn repeat_aab(prefix: &str, n: u64) -> Word {
    let mut s = String::from(prefix);
    for _ in 1..n {
        s.push_str("aab");
    }
    s.parse().unwrap()
}

/// σ_ω.
pub fn substitution(p: &Param) -> Result<Substitution> {
    let n = n_omega(p)?;
    if n > 1 << 24 {
        return Err(Error::Degenerate(format!("substitution too long (n = {n})")));
    }
    let a = match p.eps() {
        Eps::Minus => repeat_aab("ab", n),
        Eps::Plus => repeat_aab("a", n),
    };
    Ok(Substitution::new(a, "aab".parse().unwrap()))
}

/// M(ω).
pub fn incidence_matrix(p: &Param) -> Result<Mat2> {
    let n = BigInt::from(n_omega(p)?);
    let two = BigInt::from(2);
    let one = BigInt::from(1);
    Ok(match p.eps() {
        Eps::Minus => Mat2 {
            m11: &two * &n - &one,
            m12: two,
            m21: n,
            m22: one,
        },
        Eps::Plus => Mat2 {
            m11: &two * &n - &one,
            m12: two,
            m21: n - &one,
            m22: one,
        },
    })
}

/// Parameters ω_0..ω_depth along the S-expansion.
pub fn orbit_params(p: &Param, depth: usize) -> Result<Vec<Param>> {
    let mut out = vec![p.clone()];
    for k in 0..depth {
        let next = renorm_step(out.last().unwrap()).map_err(|_| Error::Terminal(k))?;
        out.push(next);
    }
    Ok(out)
}

/// p_1..p_k.
pub fn period_sequence(p: &Param, k: usize) -> Result<Vec<BigInt>> {
    if k == 0 {
        return Ok(Vec::new());
    }
    let params = orbit_params(p, k - 1)?;
    let mut prod = Mat2::identity();
    let mut out = Vec::with_capacity(k);
    for (i, w) in params.iter().enumerate() {
        let seed = if w.theta().is_zero() || w.eps() == Eps::Minus {
            [1, 0]
        } else {
            [1, 1]
        };
        out.push(prod.norm1_of(seed));
        if i + 1 < params.len() {
            prod = &prod * &incidence_matrix(w)?;
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    C,
    R,
}

/// One piece of the depth-ℓ cover: T^orbit_index of the pulled-back C or R.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverPiece {
    pub shape: Shape,
    pub ratio: Number,
    pub rect: Rect,
    pub orbit_index: usize,
}

impl CoverPiece {
    /// `PIECE shape ratio cx cy orbit_index`
    pub fn to_line(&self) -> String {
        let c = self.rect.center();
        format!(
            "PIECE {} {} {} {} {}",
            match self.shape {
                Shape::C => "C",
                Shape::R => "R",
            },
            self.ratio,
            c.x,
            c.y,
            self.orbit_index
        )
    }
}

/// Base pieces Ψ⁻¹(C_{ω_ℓ}), Ψ⁻¹(R_{ω_ℓ}), contraction, and counts.
pub(crate) struct CoverBase {
    pub params: Vec<Param>,
    pub contraction: Number,
    pub base_c: Rect,
    pub base_r: Rect,
    pub count_c: BigInt,
    pub count_r: BigInt,
}

pub(crate) fn cover_base(p: &Param, l: usize) -> Result<CoverBase> {
    let params = orbit_params(p, l)?;
    let deep = &params[l];
    let one = deep.one();
    let mut c = Rect::new(deep.zero(), deep.zero(), one.clone(), one.clone());
    let mut r = Rect::new(one.clone(), deep.zero(), deep.theta().clone(), one);
    let mut contraction = p.one();
    let mut prod = Mat2::identity();
    for w in params[..l].iter().rev() {
        let s = Similitude::of(w)?;
        c = s.apply_rect_inverse(&c);
        r = s.apply_rect_inverse(&r);
        contraction = &contraction / &s.ratio;
    }
    for w in &params[..l] {
        prod = &prod * &incidence_matrix(w)?;
    }
    let (count_c, count_r) = prod.col_sums();
    Ok(CoverBase {
        params,
        contraction,
        base_c: c,
        base_r: r,
        count_c,
        count_r,
    })
}

/// The depth-ℓ cover of K_ω.
pub fn cover(p: &Param, l: usize) -> Result<Vec<CoverPiece>> {
    let base = cover_base(p, l)?;
    let mut out = Vec::new();
    for (shape, start, count) in [
        (Shape::C, &base.base_c, &base.count_c),
        (Shape::R, &base.base_r, &base.count_r),
    ] {
        let count = count
            .to_usize()
            .filter(|&c| c <= 50_000_000)
            .ok_or_else(|| Error::InvalidArgument("cover too large".into()))?;
        let mut rect = start.clone();
        for i in 0..count {
            if i > 0 {
                rect = pet::step_rect(p, &rect)?;
            }
            out.push(CoverPiece {
                shape,
                ratio: base.contraction.clone(),
                rect: rect.clone(),
                orbit_index: i,
            });
        }
    }
    Ok(out)
}

/// Letter of each zone piece.
pub fn zone_letter(piece: Piece) -> Letter {
    piece.letter()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pet::code_orbit;
    use proptest::prelude::*;

    fn n(s: &str) -> Number {
        s.parse().unwrap()
    }
    fn param(s: &str) -> Param {
        s.parse().unwrap()
    }

    #[test]
    fn branch_index_examples() {
        assert_eq!(n_omega(&param("3/8,-1")).unwrap(), 2);
        assert_eq!(n_omega(&param("1/2,1")).unwrap(), 2);
        assert_eq!(n_omega(&param("sqrt(2)-1,-1")).unwrap(), 2);
        assert!(matches!(n_omega(&param("0,-1")), Err(Error::Degenerate(_))));
    }

    #[test]
    fn renorm_examples() {
        let a = renorm_step(&param("3/8,-1")).unwrap();
        assert_eq!(a, param("2/3,-1"));
        let b = renorm_step(&a).unwrap();
        assert_eq!(b, param("1/2,1"));
        assert_eq!(renorm_step(&b).unwrap(), param("0,-1"));
        assert_eq!(renorm_step(&param("0,-1")), Err(Error::Terminal(0)));
        assert_eq!(renorm_step(&param("sqrt(2)/2,-1")).unwrap(), param("sqrt(2)-1,1"));
        assert_eq!(renorm_step(&param("sqrt(2)-1,-1")).unwrap(), param("sqrt(2)-1,-1"));
    }

    #[test]
    fn similitude_examples() {
        let p = param("3/5,-1");
        let z = Point::new(n("3/10"), n("3/10"));
        assert_eq!(similitude_apply(&p, &z, Direction::Fwd).unwrap(), Point::new(n("1/2"), n("1/2")));
        assert_eq!(ratio(&p).unwrap(), n("5/3"));
        for q in [param("3/5,1"), param("sqrt(2)-1,-1")] {
            for i in 1..30 {
                let z = Point::new(Number::ratio(i, 31), Number::ratio(30 - i, 37));
                let f = similitude_apply(&q, &z, Direction::Fwd).unwrap();
                assert_eq!(similitude_apply(&q, &f, Direction::Inv).unwrap(), z);
            }
        }
    }

    #[test]
    fn zone_examples() {
        let p = param("3/5,-1");
        let (c, r) = induction_zone(&p).unwrap();
        assert_eq!(c, Rect::new(n("0"), n("0"), n("3/5"), n("3/5")));
        let t1 = renorm_step(&p).unwrap();
        let th = p.theta();
        assert_eq!(r.y, th.clone());
        assert_eq!(r.y1(), th * &(n("1") + t1.theta().clone()));
        assert!(induction_zone(&param("0,1")).is_err());
    }

    #[test]
    fn zone_area_identity() {
        for s in ["3/5,-1", "sqrt(2)-1,-1", "2/9,-1", "3/5,1", "sqrt(3)-1,1", "1/7,1"] {
            let p = param(s);
            let (c, r) = induction_zone(&p).unwrap();
            let nn = Number::int(n_omega(&p).unwrap() as i64);
            let th = p.theta().clone();
            let (tc, expect) = match p.eps() {
                Eps::Minus => (&Number::int(3) * &nn - Number::int(1), &Number::int(3) * &th - &th * &th),
                Eps::Plus => (
                    &Number::int(3) * &nn - Number::int(2),
                    (Number::one() - th.clone()) * (Number::one() + Number::int(2) * th),
                ),
            };
            let total = tc * c.area() + Number::int(3) * r.area();
            assert_eq!(total, expect, "{s}");
        }
    }

    fn zone_samples(p: &Param, k: i64) -> Vec<Point> {
        let (c, r) = induction_zone(p).unwrap();
        let mut v = Vec::new();
        for i in 1..k {
            for j in 1..k {
                let (s, t) = (Number::ratio(i, k) + Number::ratio(1, 7 * k), Number::ratio(j, k) + Number::ratio(1, 11 * k));
                v.push(c.at(&s, &t));
                v.push(r.at(&s, &t));
            }
        }
        v
    }

    #[test]
    fn closed_forms_match_brute_force() {
        for s in ["3/5,-1", "sqrt(2)-1,-1", "2/9,-1", "1/3,-1", "3/5,1", "sqrt(3)-1,1", "1/7,1", "7/9,1", "sqrt(2)/2,-1", "4/5,1"] {
            let p = param(s);
            for z in zone_samples(&p, 25) {
                let a = first_return(&p, &z);
                let b = first_return_brute(&p, &z);
                match (a, b) {
                    (Ok(a), Ok(b)) => assert_eq!(a, b, "{s} at {z:?}"),
                    (_, Err(Error::OnDiscontinuity { .. })) => {}
                    // empty R-zone when Sω is terminal
                    (Err(Error::NotInZone), Err(Error::NotInZone)) => {}
                    (a, b) => panic!("{s}: {a:?} vs {b:?}"),
                }
            }
        }
        let p = param("3/5,-1");
        let (c, _) = induction_zone(&p).unwrap();
        assert_eq!(first_return(&p, &c.center()).unwrap().1, 2);
    }

    #[test]
    fn float_closed_forms_match() {
        let p = param("0.437,1");
        for z in zone_samples(&p, 20) {
            let z = Point::new(z.x.to_float(), z.y.to_float());
            let (a, ta) = first_return(&p, &z).unwrap();
            let (b, tb) = first_return_brute(&p, &z).unwrap();
            assert_eq!(ta, tb);
            assert!(a.distance_inf(&b) < 1e-12);
        }
    }

    #[test]
    fn induction_verification() {
        let r = induction_verify(&param("sqrt(2)-1,-1"), 2000, 0.0, 1).unwrap();
        assert!(r.pass && r.max_error == 0.0);
        let r = induction_verify(&param("0.437,1"), 2000, 1e-9, 2).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(matches!(induction_verify(&param("0,1"), 10, 0.0, 1), Err(Error::Degenerate(_))));
    }

    #[test]
    fn matrices_and_substitutions() {
        assert_eq!(incidence_matrix(&param("sqrt(2)-1,-1")).unwrap(), Mat2::new(3, 2, 2, 1));
        for k in 1..50i64 {
            for (eps, s) in [(Eps::Minus, -1), (Eps::Plus, 1)] {
                let p = Param::new(Number::ratio(k, 51), eps).unwrap();
                let m = incidence_matrix(&p).unwrap();
                assert_eq!(m.det(), BigInt::from(s));
                assert!(m.is_nonnegative());
                assert_eq!(substitution(&p).unwrap().abelianization(), m);
            }
        }
    }

    #[test]
    fn period_sequence_at_silver() {
        let v = period_sequence(&param("sqrt(2)-1,-1"), 4).unwrap();
        assert_eq!(v, vec![1.into(), 5.into(), 21.into(), 89.into()]);
        assert!(matches!(period_sequence(&param("3/8,-1"), 6), Err(Error::Terminal(_))));
        for s in ["sqrt(3)-1,1", "sqrt(7)-2,-1", "0.1234,1"] {
            let v = period_sequence(&param(s), 12).unwrap();
            assert!(v.windows(2).all(|w| w[0] <= w[1]), "{s}: {v:?}");
        }
    }

    #[test]
    fn small_plus_parameters_leave_immediately() {
        for k in 1..100i64 {
            let p = Param::new(Number::ratio(k, 201), Eps::Plus).unwrap();
            let next = renorm_step(&p).unwrap();
            assert_eq!(n_omega(&p).unwrap(), 1);
            // θ/(1−θ) grows; the orbit leaves (0,1/2)×{+1}
            assert_eq!(next.eps(), Eps::Plus);
            assert!(next.theta() > p.theta());
        }
    }

    #[test]
    fn cover_counts() {
        let p = param("sqrt(2)-1,-1");
        let c = cover(&p, 1).unwrap();
        assert_eq!(c.iter().filter(|x| x.shape == Shape::C).count(), 5);
        assert_eq!(c.iter().filter(|x| x.shape == Shape::R).count(), 3);
        let th = p.theta().clone();
        let area = c.iter().fold(Number::zero(), |a, x| a + x.rect.area());
        let one = Number::one();
        assert_eq!(area, &(&one + &th) - &((&one - &th) * (&one - &th)));
        for l in 0..6 {
            let pieces = cover(&p, l).unwrap();
            let m = (0..l).fold(Mat2::identity(), |a, _| &a * &Mat2::new(3, 2, 2, 1));
            assert_eq!(BigInt::from(pieces.len()), m.norm1_of([1, 1]));
        }
    }

    #[test]
    fn cover_pieces_disjoint() {
        for s in ["sqrt(2)-1,-1", "sqrt(3)-1,1", "sqrt(7)-2,-1"] {
            let p = param(s);
            let pieces = cover(&p, 3).unwrap();
            let f: Vec<[f64; 4]> = pieces.iter().map(|x| x.rect.to_f64()).collect();
            for i in 0..f.len() {
                for j in 0..i {
                    let (a, b) = (f[i], f[j]);
                    let ox = (a[0] + a[2]).min(b[0] + b[2]) - a[0].max(b[0]);
                    let oy = (a[1] + a[3]).min(b[1] + b[3]) - a[1].max(b[1]);
                    assert!(ox <= 1e-12 || oy <= 1e-12, "{s}: overlap {i} {j}");
                }
            }
        }
    }

    #[test]
    fn cover_line_format() {
        let c = cover(&param("sqrt(2)-1,-1"), 1).unwrap();
        let line = c[0].to_line();
        assert!(line.starts_with("PIECE C "));
        assert_eq!(line.split_whitespace().count(), 6);
    }

    fn quadratic_params() -> Vec<Param> {
        ["sqrt(2)-1,-1", "sqrt(3)-1,1", "sqrt(2)/2,-1", "sqrt(5)-2,1", "(sqrt(5)-1)/2,-1", "sqrt(7)-2,-1", "sqrt(10)-3,1", "(sqrt(13)-3)/2,-1", "sqrt(6)-2,1", "sqrt(11)/4,-1"]
            .iter()
            .map(|s| param(s))
            .collect()
    }

    #[test]
    fn coding_commutes_with_substitution() {
        for p in quadratic_params() {
            let (c, r) = induction_zone(&p).unwrap();
            let next = renorm_step(&p).unwrap();
            let sigma = substitution(&p).unwrap();
            for z in [c.at(&n("2/7"), &n("3/11")), r.at(&n("5/9"), &n("1/13"))] {
                let direct = code_orbit(&p, &z, 1000).unwrap();
                let inner = code_orbit(&next, &similitude_apply(&p, &z, Direction::Fwd).unwrap(), 1000).unwrap();
                assert_eq!(sigma.apply(&inner).prefix(1000), direct, "{p}");
            }
        }
    }

    proptest! {
        #[test]
        fn closed_form_equals_iteration(num in 1i64..200, eps in prop::bool::ANY, s in 1i64..97, t in 1i64..97) {
            let eps = if eps { Eps::Plus } else { Eps::Minus };
            let p = Param::new(Number::ratio(num, 201), eps).unwrap();
            let (c, r) = induction_zone(&p).unwrap();
            for zone in [c, r] {
                let z = zone.at(&Number::ratio(s, 97), &Number::ratio(t, 97));
                if let (Ok(a), Ok(b)) = (first_return(&p, &z), first_return_brute(&p, &z)) {
                    prop_assert_eq!(a, b);
                }
            }
        }
    }
}
