//! The interval form x = θ + (ε+1)/2 ∈ (0,2): S-expansions, the folded map Q,
//! the acceleration 𝐒, invariant densities and the natural extension.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::numeric::Number;
use crate::pet::{Eps, Param};
use crate::quad;
use crate::renorm;
use crate::symbolic::{Substitution, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalParam(Number);

impl IntervalParam {
    pub fn new(x: Number) -> Result<IntervalParam> {
        if x.is_negative() || x >= x.like(2) {
            return Err(Error::InvalidArgument(format!("x = {x} not in [0,2)")));
        }
        Ok(IntervalParam(x))
    }

    pub fn from_param(p: &Param) -> IntervalParam {
        IntervalParam(p.interval())
    }

    pub fn to_param(&self) -> Param {
        Param::from_interval(&self.0).expect("x in [0,2)")
    }

    pub fn x(&self) -> &Number {
        &self.0
    }

    pub fn is_terminal(&self) -> bool {
        self.0.is_zero() || self.0 == self.0.like(1)
    }
}

/// Branch index n and matrix A(x) with S(x) = A(x)·x.
pub fn branch_data(x: &IntervalParam) -> Result<(u64, Mat2)> {
    if x.is_terminal() {
        return Err(Error::Terminal(0));
    }
    let p = x.to_param();
    let n = renorm::n_omega(&p)?;
    let np = (n % 2) as i64;
    let ni = n as i64;
    Ok(match p.eps() {
        Eps::Minus => (n, Mat2::new(np - ni, 1, 1, 0)),
        Eps::Plus => (n, Mat2::new(ni - np, 1 + 2 * (np - ni), -1, 2)),
    })
}

/// S on (0,2).
pub fn s_interval(x: &IntervalParam) -> Result<IntervalParam> {
    if x.is_terminal() {
        return Err(Error::Terminal(0));
    }
    Ok(IntervalParam::from_param(&renorm::renorm_step(&x.to_param())?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digit {
    pub n: u64,
    pub eps: Eps,
}

impl Digit {
    /// M(ω) for this digit.
    pub fn matrix(&self) -> Mat2 {
        let n = self.n as i64;
        match self.eps {
            Eps::Minus => Mat2::new(2 * n - 1, 2, n, 1),
            Eps::Plus => Mat2::new(2 * n - 1, 2, n - 1, 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Finite,
    Periodic,
    Truncated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    pub start: Number,
    pub digits: Vec<Digit>,
    pub status: Status,
    pub preperiod: Option<usize>,
    pub period: Option<usize>,
}

/// S-expansion with termination and exact cycle detection.
pub fn expand(x: &IntervalParam, max_steps: usize) -> Expansion {
    let mut seen: HashMap<_, usize> = HashMap::new();
    let mut cur = x.clone();
    let mut digits = Vec::new();
    let done = |digits, status, pre, per| Expansion {
        start: x.0.clone(),
        digits,
        status,
        preperiod: pre,
        period: per,
    };
    for k in 0..=max_steps {
        if cur.is_terminal() {
            return done(digits, Status::Finite, None, None);
        }
        if let Some(key) = cur.0.exact_key() {
            if let Some(&i) = seen.get(&key) {
                return done(digits, Status::Periodic, Some(i), Some(k - i));
            }
            seen.insert(key, k);
        }
        if k == max_steps {
            break;
        }
        let p = cur.to_param();
        let n = match renorm::n_omega(&p) {
            Ok(n) => n,
            Err(_) => break,
        };
        digits.push(Digit { n, eps: p.eps() });
        cur = match s_interval(&cur) {
            Ok(c) => c,
            Err(_) => break,
        };
    }
    done(digits, Status::Truncated, None, None)
}

/// Q(x) = {1/x} if ⌊1/x⌋ even, 1 − {1/x} otherwise.
pub fn q_map(x: &Number) -> Result<Number> {
    if x.is_zero() {
        return Err(Error::Terminal(0));
    }
    if x.is_negative() || *x >= x.like(1) {
        return Err(Error::InvalidArgument(format!("Q needs x in (0,1), got {x}")));
    }
    let inv = x.recip()?;
    let n = inv.floor();
    let fr = inv.fract();
    Ok(if n % 2u32 == 0u32.into() {
        fr
    } else {
        &x.like(1) - &fr
    })
}

/// p(x) = min(x, 2 − x).
pub fn fold(x: &IntervalParam) -> Number {
    x.0.min(&(&x.0.like(2) - &x.0))
}

/// One step of the acceleration 𝐒.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Accel {
    pub m: u64,
    pub y: Number,
    pub a_bold: Mat2,
    pub r_bold: Number,
    pub sigma_bold: Substitution,
    pub m_bold: Mat2,
}

pub fn accel(x: &IntervalParam) -> Result<Accel> {
    if x.is_terminal() {
        return Err(Error::Terminal(0));
    }
    let v = &x.0;
    let one = v.like(1);
    let three_halves = &v.like(3) / &v.like(2);
    if *v > one && *v < three_halves {
        let t = v - &one;
        let k = t.recip()?.floor();
        let kk: i64 = k
            .try_into()
            .map_err(|_| Error::Degenerate(format!("acceleration index overflows at x = {v}")))?;
        let endpoint = t == &one / &v.like(kk);
        let j = if endpoint { kk - 2 } else { kk - 1 };
        let a = Mat2::new(1 - j, j, -j, 1 + j);
        let y = a.mobius(v)?;
        let r = (&one - &(&v.like(j) * &t)).recip()?;
        let mut img_b = Word::new();
        for _ in 0..2 * j {
            img_b.push(crate::symbolic::Letter::A);
        }
        img_b.push(crate::symbolic::Letter::B);
        return Ok(Accel {
            m: j as u64,
            y,
            a_bold: a,
            r_bold: r,
            sigma_bold: Substitution::new("a".parse()?, img_b),
            m_bold: Mat2::new(1, 2 * j, 0, 1),
        });
    }
    let p = x.to_param();
    let (_, a) = branch_data(x)?;
    Ok(Accel {
        m: 1,
        y: s_interval(x)?.0,
        a_bold: a,
        r_bold: renorm::ratio(&p)?,
        sigma_bold: renorm::substitution(&p)?,
        m_bold: renorm::incidence_matrix(&p)?,
    })
}

/// Float fast path of `accel`.
#[derive(Clone, Copy, Debug)]
pub struct AccelF64 {
    pub y: f64,
    /// 𝐌 as floats.
    pub m: [[f64; 2]; 2],
    /// 𝐀 as floats.
    pub a: [[f64; 2]; 2],
    pub ln_r: f64,
    pub steps: u64,
}

pub fn accel_f64(x: f64) -> Option<AccelF64> {
    if !(x > 0.0 && x < 2.0) || x == 1.0 {
        return None;
    }
    if x < 1.0 {
        let inv = 1.0 / x;
        let n = inv.floor();
        let fr = inv - n;
        let odd = n % 2.0 == 1.0;
        let np = if odd { 1.0 } else { 0.0 };
        return Some(AccelF64 {
            y: fr + np,
            m: [[2.0 * n - 1.0, 2.0], [n, 1.0]],
            a: [[np - n, 1.0], [1.0, 0.0]],
            ln_r: -x.ln(),
            steps: 1,
        });
    }
    if x < 1.5 {
        let t = x - 1.0;
        let j = (1.0 / t).floor() - 1.0;
        let d = 1.0 - j * t;
        return Some(AccelF64 {
            y: 1.0 + t / d,
            m: [[1.0, 2.0 * j], [0.0, 1.0]],
            a: [[1.0 - j, j], [-j, 1.0 + j]],
            ln_r: -d.ln(),
            steps: j as u64,
        });
    }
    let u = 2.0 - x;
    let inv = 1.0 / u;
    let n = inv.floor();
    let fr = inv - n;
    let odd = n % 2.0 == 1.0;
    let np = if odd { 1.0 } else { 0.0 };
    Some(AccelF64 {
        y: fr + np,
        m: [[2.0 * n - 1.0, 2.0], [n - 1.0, 1.0]],
        a: [[n - np, 1.0 + 2.0 * (np - n)], [-1.0, 2.0]],
        ln_r: -u.ln(),
        steps: 1,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Density {
    /// invariant for S: 1/(1+x) on (0,1], 1/(x−1) on (1,2)
    Nu,
    /// invariant for 𝐒: 1/(1+x), 1/x, 1/(x−1) on (0,1], (1,3/2], (3/2,2)
    BoldNu,
    /// negative control
    Uniform,
}

/// Closed-form density at x.
pub fn density(which: Density, x: &Number) -> Result<Number> {
    let one = x.like(1);
    let denom = match which {
        Density::Uniform => return Ok(one),
        Density::Nu => {
            if *x <= one {
                x + &one
            } else {
                x - &one
            }
        }
        Density::BoldNu => {
            if *x <= one {
                x + &one
            } else if *x <= &x.like(3) / &x.like(2) {
                x.clone()
            } else {
                x - &one
            }
        }
    };
    denom.recip()
}

pub fn density_f64(which: Density, x: f64) -> f64 {
    match which {
        Density::Uniform => 1.0,
        Density::Nu => {
            if x <= 1.0 {
                1.0 / (1.0 + x)
            } else {
                1.0 / (x - 1.0)
            }
        }
        Density::BoldNu => {
            if x <= 1.0 {
                1.0 / (1.0 + x)
            } else if x <= 1.5 {
                1.0 / x
            } else {
                1.0 / (x - 1.0)
            }
        }
    }
}

/// Total mass of 𝛎: ln 2 + ln(3/2) + ln 2 = ln 6.
pub const BOLD_NU_MASS: f64 = 1.791_759_469_228_055;

/// Draw from 𝛎/ln 6 by piecewise inverse CDF.
pub fn sample_bold_nu<R: Rng + ?Sized>(rng: &mut R) -> Result<f64> {
    let ln2 = std::f64::consts::LN_2;
    let ln32 = 1.5f64.ln();
    for _ in 0..64 {
        let v = rng.gen::<f64>() * BOLD_NU_MASS;
        let x = if v < ln2 {
            v.exp() - 1.0
        } else if v < ln2 + ln32 {
            (v - ln2).exp()
        } else {
            1.0 + 0.5 * (v - ln2 - ln32).exp()
        };
        if x > 0.0 && x < 2.0 && x != 1.0 {
            return Ok(x);
        }
    }
    Err(Error::SamplerFailure("no admissible draw in 64 attempts".into()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapKind {
    S,
    Accel,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferResidual {
    pub residual: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

/// |Σ_{S x = y} ρ(x)/|S'(x)| − ρ(y)| with preimages enumerated to `cutoff`.
pub fn transfer_residual(map: MapKind, which: Density, y: f64, cutoff: usize) -> TransferResidual {
    let rho = |x: f64| density_f64(which, x);
    let parity0 = if y > 1.0 { 0.0 } else { 2.0 };
    // t = n − n' runs over even numbers from parity0; x = 1/(t+y) or 2 − 1/(t+y)
    let f1 = |t: f64| {
        let x = 1.0 / (t + y);
        rho(x) * x * x
    };
    let f2 = |t: f64| {
        let s = t + y;
        if map == MapKind::Accel && s < 2.0 {
            return 0.0;
        }
        let u = 1.0 / s;
        rho(2.0 - u) * u * u
    };
    let steps = cutoff / 2;
    let mut total = quad::kahan((0..steps).map(|i| {
        let t = parity0 + 2.0 * i as f64;
        f1(t) + f2(t)
    }));
    let t_end = parity0 + 2.0 * steps as f64;
    let (e1, b1) = quad::tail_sum(&f1, t_end, 2.0);
    let (e2, b2) = quad::tail_sum(&f2, t_end, 2.0);
    total += e1 + e2;
    let mut bound = b1 + b2;
    let mut terms = 2 * steps;
    if map == MapKind::Accel && y > 1.5 {
        // middle family: x = 1 + t with t = (y−1)/(j(y−1)+1), 1/|𝐒'| = (1 − jt)²
        let f3 = |j: f64| {
            let d = 1.0 / (j * (y - 1.0) + 1.0);
            rho(1.0 + (y - 1.0) * d) * d * d
        };
        total += quad::kahan((1..=cutoff).map(|j| f3(j as f64)));
        let (e3, b3) = quad::tail_sum(&f3, cutoff as f64 + 1.0, 1.0);
        total += e3;
        bound += b3;
        terms += cutoff;
    }
    TransferResidual {
        residual: (total - rho(y)).abs(),
        tail_bound: bound,
        terms,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalExtensionReport {
    pub samples: usize,
    pub seed: u64,
    /// images that left 𝚯
    pub escaped: usize,
    /// images without exactly one preimage in 𝚯
    pub preimage_failures: usize,
    /// sampled 𝚯 points without exactly one preimage
    pub surjectivity_failures: usize,
    /// max |fiber integral − 𝛎| over a rational grid (exact arithmetic)
    pub fiber_max_error: f64,
    pub pass: bool,
}

const THETA_TOL: f64 = 1e-9;

/// Membership in 𝚯 = [0,1]² ∪ [1,2]×[0,∞) ∪ [3/2,2]×(−∞,−1].
pub fn in_theta(x: f64, y: f64) -> bool {
    let t = THETA_TOL;
    if !(x >= -t && x <= 2.0 + t) {
        return false;
    }
    if x <= 1.0 + t && y >= -t && y <= 1.0 + t * (1.0 + y.abs()) {
        return true;
    }
    if x >= 1.0 - t && y >= -t {
        return true;
    }
    x >= 1.5 - t && y <= -1.0 + t * (1.0 + y.abs())
}

fn mobius_proj(a: &[[f64; 2]; 2], y: f64) -> f64 {
    // −1/(A·(−1/y)) computed on the vector (−1, y)
    let p = -a[0][0] + a[0][1] * y;
    let q = -a[1][0] + a[1][1] * y;
    -q / p
}

fn mobius(a: &[[f64; 2]; 2], x: f64) -> f64 {
    (a[0][0] * x + a[0][1]) / (a[1][0] * x + a[1][1])
}

fn inverse(a: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
}

/// S̃(x, y) = (𝐀x, −1/(𝐀(−1/y))).
pub fn natural_extension_map(x: f64, y: f64) -> Option<(f64, f64)> {
    let acc = accel_f64(x)?;
    Some((mobius(&acc.a, x), mobius_proj(&acc.a, y)))
}

fn family_matrices(yy: f64) -> Vec<[[f64; 2]; 2]> {
    let mut out = Vec::new();
    if yy > 0.0 {
        // outer branches depend only on the even shift t = n − n'
        let t0 = (1.0 / yy).floor();
        let lo = (t0 - 3.0).max(0.0);
        let mut t = lo - lo % 2.0;
        while t <= t0 + 3.0 {
            out.push([[-t, 1.0], [1.0, 0.0]]);
            out.push([[t, 1.0 - 2.0 * t], [-1.0, 2.0]]);
            t += 2.0;
        }
    } else if yy < 0.0 {
        let k0 = if yy <= -2.0 { 2.0 } else { 1.0 + (1.0 / (-yy - 1.0)).floor() };
        let mut j = (k0 - 4.0).max(1.0);
        while j <= k0 + 2.0 {
            out.push([[1.0 - j, j], [-j, 1.0 + j]]);
            j += 1.0;
        }
    }
    out
}

/// Number of 𝚯-preimages of (X, Y) under S̃.
pub fn natural_extension_preimages(xx: f64, yy: f64) -> usize {
    family_matrices(yy)
        .into_iter()
        .filter(|a| {
            let inv = inverse(a);
            let x = mobius(&inv, xx);
            let y = mobius_proj(&inv, yy);
            let Some(acc) = accel_f64(x) else { return false };
            let same = (0..2).all(|i| (0..2).all(|k| acc.a[i][k] == a[i][k]));
            same && in_theta(x, y) && x > 0.0 && x < 2.0
        })
        .count()
}

fn sample_theta(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let x = loop {
        let x = rng.gen::<f64>() * 2.0;
        if x > 0.0 && x != 1.0 {
            break x;
        }
    };
    let half_line = |rng: &mut ChaCha8Rng| (rng.gen::<f64>() * std::f64::consts::FRAC_PI_2).tan();
    let y = if x < 1.0 {
        rng.gen::<f64>()
    } else if x < 1.5 || rng.gen::<bool>() {
        half_line(rng)
    } else {
        -1.0 - half_line(rng)
    };
    (x, y)
}

/// ∫ over the 𝚯-fiber at x of dy/(1+xy)², in closed form.
pub fn fiber_integral(x: &Number) -> Result<Number> {
    let one = x.like(1);
    // antiderivative −1/(x(1+xy)); vanishes at ±∞
    let f = |y: &Number| -> Result<Number> { Ok(-(x * &(&one + &(x * y))).recip()?) };
    let at0 = f(&x.like(0))?;
    if *x <= one {
        return Ok(&f(&one)? - &at0);
    }
    let positive = -at0;
    if *x <= &x.like(3) / &x.like(2) {
        Ok(positive)
    } else {
        Ok(&positive + &f(&x.like(-1))?)
    }
}

pub fn natural_extension_check(samples: usize, seed: u64) -> NaturalExtensionReport {
    let chunk = 4096;
    let results: Vec<(usize, usize, usize)> = (0..samples.div_ceil(chunk))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64 + 1);
            let count = chunk.min(samples - c * chunk);
            let (mut esc, mut pre, mut sur) = (0, 0, 0);
            for _ in 0..count {
                let (x, y) = sample_theta(&mut rng);
                match natural_extension_map(x, y) {
                    Some((xx, yy)) if in_theta(xx, yy) => {
                        if natural_extension_preimages(xx, yy) != 1 {
                            pre += 1;
                        }
                    }
                    _ => esc += 1,
                }
                if natural_extension_preimages(x, y) != 1 {
                    sur += 1;
                }
            }
            (esc, pre, sur)
        })
        .collect();
    let (escaped, preimage_failures, surjectivity_failures) = results
        .iter()
        .fold((0, 0, 0), |a, r| (a.0 + r.0, a.1 + r.1, a.2 + r.2));
    let mut fiber_max_error: f64 = 0.0;
    for k in 1..200 {
        if k == 100 {
            continue;
        }
        let x = Number::ratio(k, 100);
        let f = fiber_integral(&x).expect("nonzero");
        let d = density(Density::BoldNu, &x).expect("nonzero");
        fiber_max_error = fiber_max_error.max((&f - &d).abs().to_f64());
    }
    NaturalExtensionReport {
        samples,
        seed,
        escaped,
        preimage_failures,
        surjectivity_failures,
        fiber_max_error,
        pass: escaped == 0
            && preimage_failures == 0
            && surjectivity_failures == 0
            && fiber_max_error == 0.0,
    }
}
