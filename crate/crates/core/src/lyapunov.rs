//! Accelerated cocycle products, Monte-Carlo exponents and the series integrals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cfrac::{self, accel_f64, density_f64, Density};
use crate::error::{Error, Result};
use crate::matrix::Mat2;
use crate::pet::Param;
use crate::quad;
use crate::symbolic::{accelerated_levels, big_ln};

/// ln 6, the total mass of 𝛎.
pub const LN6: f64 = cfrac::BOLD_NU_MASS;

/// 𝐌^{(ℓ)} = 𝐌(x)⋯𝐌(𝐒^ℓ x) exactly, with ln ‖𝐌^{(ℓ)}(1,1)ᵗ‖₁ from a renormalized float pass.
pub fn cocycle_product(p: &Param, l: usize) -> Result<(Mat2, f64)> {
    let levels = accelerated_levels(p, l + 1)?;
    let prod = levels
        .iter()
        .fold(Mat2::identity(), |acc, a| &acc * &a.m_bold);
    let log_norm = log_norm_of(levels.iter().map(|a| a.m_bold.to_f64()));
    Ok((prod, log_norm))
}

/// ln ‖M₀M₁⋯(1,1)ᵗ‖₁ for nonnegative factors, via the row vector (1,1)·M₀M₁⋯.
pub fn log_norm_of<I: IntoIterator<Item = [[f64; 2]; 2]>>(factors: I) -> f64 {
    let mut w = [1.0f64, 1.0];
    let mut acc = 0.0;
    for m in factors {
        w = [
            w[0] * m[0][0] + w[1] * m[1][0],
            w[0] * m[0][1] + w[1] * m[1][1],
        ];
        let s = w[0] + w[1];
        acc += s.ln();
        w = [w[0] / s, w[1] / s];
    }
    // w now sums to 1, so the final dot with (1,1) adds nothing
    acc
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleEstimate {
    pub lambda_hat: f64,
    #[serde(rename = "lnR_hat")]
    pub ln_r_hat: f64,
    pub s_hat: f64,
    pub l: usize,
    pub trials: usize,
    pub seed: u64,
    pub lambda_stderr: f64,
    #[serde(rename = "lnR_stderr")]
    pub ln_r_stderr: f64,
    pub s_stderr: f64,
    /// orbits restarted after a float orbit left (0,2)∖{1}
    pub restarts: usize,
}

impl CocycleEstimate {
    pub const CSV_HEADER: &'static str = "quantity,value,stderr,l,trials,seed,restarts";

    pub fn csv_rows(&self) -> Vec<String> {
        [
            ("lambda_hat", self.lambda_hat, self.lambda_stderr),
            ("lnR_hat", self.ln_r_hat, self.ln_r_stderr),
            ("s_hat", self.s_hat, self.s_stderr),
        ]
        .iter()
        .map(|(q, v, e)| {
                format!("{q},{v:?},{e:?},{},{},{},{}", self.l, self.trials, self.seed, self.restarts)
            })
        .collect()
    }
}

/// Per-step rates (ln‖·‖, Σ ln 𝐫) along one sampled orbit of length ℓ.
fn one_trial(rng: &mut ChaCha8Rng, l: usize) -> Result<(f64, f64, usize)> {
    let mut x = cfrac::sample_bold_nu(rng)?;
    let mut restarts = 0;
    let mut w = [1.0f64, 1.0];
    let (mut log_m, mut log_r) = (0.0, 0.0);
    let mut k = 0;
    while k < l {
        let Some(a) = accel_f64(x) else {
            x = cfrac::sample_bold_nu(rng)?;
            restarts += 1;
            continue;
        };
        let m = a.m;
        w = [
            w[0] * m[0][0] + w[1] * m[1][0],
            w[0] * m[0][1] + w[1] * m[1][1],
        ];
        let s = w[0] + w[1];
        log_m += s.ln();
        w = [w[0] / s, w[1] / s];
        log_r += a.ln_r;
        x = a.y;
        k += 1;
    }
    Ok((log_m / l as f64, log_r / l as f64, restarts))
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 {
        v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (m, var.sqrt())
}

/// Monte-Carlo estimate of 𝛌, ln 𝐑 and 𝐬 from independent 𝛎-typical orbits.
///
/// Rates are scaled by ln 6 so that they match integrals against the unnormalized 𝛎.
pub fn birkhoff_estimate(seed: u64, trials: usize, l: usize) -> Result<CocycleEstimate> {
    if trials == 0 || l == 0 {
        return Err(Error::InvalidArgument("trials and l must be positive".into()));
    }
    let results = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            one_trial(&mut rng, l)
        })
        .collect::<Result<Vec<_>>>()?;
    let lam: Vec<f64> = results.iter().map(|r| r.0 * LN6).collect();
    let lnr: Vec<f64> = results.iter().map(|r| r.1 * LN6).collect();
    let restarts = results.iter().map(|r| r.2).sum();
    let (ml, sl) = mean_sd(&lam);
    let (mr, sr) = mean_sd(&lnr);
    let n = trials as f64;
    let (el, er) = (sl / n.sqrt(), sr / n.sqrt());
    let cov = if trials > 1 {
        lam.iter()
            .zip(&lnr)
            .map(|(a, b)| (a - ml) * (b - mr))
            .sum::<f64>()
            / (n - 1.0)
            / n
    } else {
        0.0
    };
    let s = ml / mr;
    // delta method for a ratio of correlated means
    let var_s = (el * el / (mr * mr) + ml * ml * er * er / mr.powi(4) - 2.0 * ml * cov / mr.powi(3)).max(0.0);
    Ok(CocycleEstimate {
        lambda_hat: ml,
        ln_r_hat: mr,
        s_hat: s,
        l,
        trials,
        seed,
        lambda_stderr: el,
        ln_r_stderr: er,
        s_stderr: var_s.sqrt(),
        restarts,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    pub tail_bound: f64,
    pub terms: usize,
}

impl SeriesValue {
    pub const CSV_HEADER: &'static str = "integral,value,tail_bound,terms";

    pub fn csv_row(&self, name: &str) -> String {
        format!("{name},{:?},{:?},{}", self.value, self.tail_bound, self.terms)
    }
}

/// 𝛎-mass of {⌊1/x⌋ = n} ⊂ (0,1).
fn mass_left(n: f64) -> f64 {
    (1.0 / (n * (n + 2.0))).ln_1p()
}

/// 𝛎-mass of {⌊1/(x−1)⌋ = k} ⊂ (1,3/2).
fn mass_middle(k: f64) -> f64 {
    mass_left(k)
}

/// 𝛎-mass of {⌊1/(2−x)⌋ = n} ⊂ (3/2,2).
fn mass_right(n: f64) -> f64 {
    (1.0 / (n * n - 1.0)).ln_1p()
}

/// Σ_{n>N} ln(c n)/n² ≤ (ln(cN)+1)/N.
fn log_tail(c: f64, n: usize) -> f64 {
    let n = n as f64;
    ((c * n).ln() + 1.0) / n
}

fn check_terms(terms: usize) -> Result<()> {
    if terms < 10 {
        return Err(Error::InvalidArgument("terms must be at least 10".into()));
    }
    Ok(())
}

/// ∫ ln ‖𝐌(x)‖_∞ d𝛎(x).
pub fn integral_ln_m(terms: usize) -> Result<SeriesValue> {
    check_terms(terms)?;
    // ‖𝐌‖_∞ = 2n+1 on the outer branches and 1+2j = 2k−1 on the middle one
    let value = quad::kahan((1..=terms).map(|n| {
        let nf = n as f64;
        let left = (2.0 * nf + 1.0).ln() * mass_left(nf);
        let mid = if n >= 2 { (2.0 * nf - 1.0).ln() * mass_middle(nf) } else { 0.0 };
        let right = if n >= 2 { (2.0 * nf + 1.0).ln() * mass_right(nf) } else { 0.0 };
        left + mid + right
    }));
    let nf = terms as f64;
    let right_factor = nf * nf / (nf * nf - 1.0);
    Ok(SeriesValue {
        value,
        tail_bound: log_tail(3.0, terms) * (2.0 + right_factor),
        terms,
    })
}

/// ∫ ln 𝐫 d𝛎 on one middle cell {⌊1/(x−1)⌋ = k}.
fn middle_ln_r_term(k: usize) -> f64 {
    let kf = k as f64;
    let j = kf - 1.0;
    let f = |t: f64| -(-j * t).ln_1p() / (1.0 + t);
    quad::kronrod15(&f, 1.0 / (kf + 1.0), 1.0 / kf).0
}

/// ∫ ln 𝐫 d𝛎: π²/12 + middle series + (ln 2)²/2 + π²/12.
pub fn integral_ln_r(terms: usize) -> Result<SeriesValue> {
    check_terms(terms)?;
    let pi2_12 = std::f64::consts::PI.powi(2) / 12.0;
    let ln2 = std::f64::consts::LN_2;
    let middle = quad::kahan((2..=terms).into_par_iter().map(middle_ln_r_term).collect::<Vec<_>>());
    Ok(SeriesValue {
        value: pi2_12 + middle + ln2 * ln2 / 2.0 + pi2_12,
        tail_bound: log_tail(1.0, terms),
        terms,
    })
}

/// ∫ ln(√(m₁₁m₂₂) + √(m₁₂m₂₁)) d𝛎, a lower bound for the exponent.
pub fn lower_bound_f(terms: usize) -> Result<SeriesValue> {
    check_terms(terms)?;
    // the middle branch has f = 1
    let value = quad::kahan((1..=terms).map(|n| {
        let nf = n as f64;
        let left = ((2.0 * nf - 1.0).sqrt() + (2.0 * nf).sqrt()).ln() * mass_left(nf);
        let right = if n >= 2 {
            ((2.0 * nf - 1.0).sqrt() + (2.0 * nf - 2.0).sqrt()).ln() * mass_right(nf)
        } else {
            0.0
        };
        left + right
    }));
    let nf = terms as f64;
    Ok(SeriesValue {
        value,
        tail_bound: log_tail(3.0, terms) * (1.0 + nf * nf / (nf * nf - 1.0)),
        terms,
    })
}

fn f_of(m: &[[f64; 2]; 2]) -> f64 {
    (m[0][0] * m[1][1]).sqrt() + (m[0][1] * m[1][0]).sqrt()
}

fn norm_inf(m: &[[f64; 2]; 2]) -> f64 {
    (m[0][0] + m[0][1]).max(m[1][0] + m[1][1])
}

/// Which integrand the quadrature oracle evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Integrand {
    LnM,
    LnR,
    LnF,
}

/// Adaptive quadrature of the integrand against 𝛎 over the cells the series with `terms`
/// terms covers, evaluating 𝐌 and 𝐫 pointwise.
pub fn integral_oracle(which: Integrand, terms: usize) -> f64 {
    let g = move |x: f64| -> f64 {
        let Some(a) = accel_f64(x) else { return 0.0 };
        let v = match which {
            Integrand::LnM => norm_inf(&a.m).ln(),
            Integrand::LnR => a.ln_r,
            Integrand::LnF => f_of(&a.m).ln(),
        };
        v * density_f64(Density::BoldNu, x)
    };
    let tol = 1e-14;
    let cells = |lo: f64, hi: f64| -> f64 {
        // x in (lo, hi) split where the integrand jumps; sample one point per cell
        quad::adaptive(&g, lo, hi, tol)
    };
    let mut parts: Vec<(f64, f64)> = Vec::with_capacity(3 * terms);
    if which == Integrand::LnR {
        // smooth away from the endpoints: integrate the full outer pieces
        parts.push((0.0, 0.5));
        parts.push((0.5, 1.0));
        parts.push((1.5, 2.0));
    } else {
        for n in 1..=terms {
            let nf = n as f64;
            parts.push((1.0 / (nf + 1.0), 1.0 / nf));
            if n >= 2 {
                parts.push((2.0 - 1.0 / nf, 2.0 - 1.0 / (nf + 1.0)));
            }
        }
    }
    for k in 2..=terms {
        let kf = k as f64;
        parts.push((1.0 + 1.0 / (kf + 1.0), 1.0 + 1.0 / kf));
    }
    let vals: Vec<f64> = parts.par_iter().map(|&(a, b)| cells(a, b)).collect();
    quad::kahan(vals)
}

/// Birkhoff contraction coefficient tanh(¼|ln(m₁₁m₂₂/(m₁₂m₂₁))|); 1 if an entry vanishes.
pub fn contraction(m: &Mat2) -> f64 {
    if m.entries().iter().any(|e| e.sign() != num_bigint::Sign::Plus) {
        return 1.0;
    }
    let cross = big_ln(&m.m11) + big_ln(&m.m22) - big_ln(&m.m12) - big_ln(&m.m21);
    (cross.abs() / 4.0).tanh()
}

/// 𝐌^{(ℓ)}(1,1)ᵗ normalized to coordinate sum 1.
pub fn limit_direction(p: &Param, l: usize) -> Result<[f64; 2]> {
    let levels = accelerated_levels(p, l + 1)?;
    let mut v = [1.0f64, 1.0];
    for a in levels.iter().rev() {
        let m = a.m_bold.to_f64();
        v = [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]];
        let s = v[0] + v[1];
        v = [v[0] / s, v[1] / s];
    }
    Ok(v)
}

/// Unaccelerated M(x) on (0,2) as floats.
fn s_matrix_f64(x: f64) -> [[f64; 2]; 2] {
    if x < 1.0 {
        let n = (1.0 / x).floor();
        [[2.0 * n - 1.0, 2.0], [n, 1.0]]
    } else {
        let n = (1.0 / (2.0 - x)).floor();
        [[2.0 * n - 1.0, 2.0], [n - 1.0, 1.0]]
    }
}

/// ∫_{1+δ}^{3/2} ln ‖M(x)‖₁ dν(x) for δ = 2^{−k}, k = 1..=kmax.
pub fn non_integrability_witness(kmax: u32) -> Vec<(u32, f64)> {
    // x = 1 + e^s turns dν = dx/(x−1) into ds
    let g = |s: f64| {
        let m = s_matrix_f64(1.0 + s.exp());
        let n1 = (m[0][0] + m[1][0]).max(m[0][1] + m[1][1]);
        n1.ln()
    };
    let top = 0.5f64.ln();
    (1..=kmax)
        .map(|k| {
            let lo = -(k as f64) * std::f64::consts::LN_2;
            (k, quad::adaptive(&g, lo, top, 1e-12))
        })
        .collect()
}

/// The truncated integrals of the witness, checked for monotone unbounded growth.
pub fn non_integrability_holds(values: &[(u32, f64)]) -> bool {
    let increments: Vec<f64> = values.windows(2).map(|w| w[1].1 - w[0].1).collect();
    let floor = 0.5 * std::f64::consts::LN_2 * 3f64.ln();
    increments.iter().all(|&d| d > 0.0) && increments.iter().rev().take(10).all(|&d| d > floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Number;
    use crate::symbolic::accelerated_product;
    use proptest::prelude::*;
    use rand::Rng;

    fn param(s: &str) -> Param {
        s.parse().unwrap()
    }

    fn big_to_f64(m: &Mat2) -> [[f64; 2]; 2] {
        m.to_f64()
    }

    #[test]
    fn fixed_point_product() {
        let p = param("sqrt(2)-1,-1");
        let (m0, _) = cocycle_product(&p, 0).unwrap();
        assert_eq!(m0, Mat2::new(3, 2, 2, 1));
        let (m3, ln3) = cocycle_product(&p, 3).unwrap();
        let f = Mat2::new(3, 2, 2, 1);
        assert_eq!(m3, &(&(&f * &f) * &f) * &f);
        let (n1, n2) = m3.col_sums();
        assert!((ln3 - big_ln(&(n1 + n2))).abs() < 1e-12);
        let (_, ln) = cocycle_product(&p, 20_000).unwrap();
        assert!((ln / 20_000.0 - (2.0 + 5f64.sqrt()).ln()).abs() < 1e-3);
    }

    #[test]
    fn float_log_norm_matches_exact() {
        let p = param("sqrt(7)-2,1");
        let (m, ln) = cocycle_product(&p, 30).unwrap();
        let (a, b) = m.col_sums();
        let exact = big_ln(&(a + b));
        assert!(((ln - exact) / exact).abs() < 1e-10);
        let _ = big_to_f64(&m);
    }

    #[test]
    fn deep_product_does_not_overflow() {
        let p = param("sqrt(5)-2,-1");
        let levels = accelerated_levels(&p, 1000).unwrap();
        let ln = log_norm_of(levels.iter().map(|a| a.m_bold.to_f64()));
        assert!(ln.is_finite() && ln > 1000.0);
    }

    #[test]
    fn contraction_examples() {
        assert!((contraction(&Mat2::new(3, 2, 2, 1)) - (0.25 * (4f64 / 3.0).ln()).tanh()).abs() < 1e-15);
        assert!((contraction(&Mat2::new(3, 2, 2, 1)) - 0.0718).abs() < 1e-4);
        assert_eq!(contraction(&Mat2::new(1, 4, 0, 1)), 1.0);
        assert_eq!(contraction(&Mat2::new(2, 3, 3, 1)), contraction(&Mat2::new(3, 2, 1, 3)));
    }

    #[test]
    fn limit_direction_is_perron() {
        let v = limit_direction(&param("sqrt(2)-1,-1"), 30).unwrap();
        assert!((v[0] - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-9);
        assert!((v[0] + v[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integral_pieces() {
        let pi2_12 = std::f64::consts::PI.powi(2) / 12.0;
        let first = quad::adaptive(&|x: f64| -x.ln() / (1.0 + x), 0.0, 1.0, 1e-14);
        assert!((first - pi2_12).abs() < 1e-9);
        let third = quad::adaptive(&|x: f64| -(2.0 - x).ln() / (x - 1.0), 1.5, 2.0, 1e-14);
        let ln2 = std::f64::consts::LN_2;
        assert!((third - (ln2 * ln2 / 2.0 + pi2_12)).abs() < 1e-9);
        // n = 1 cell of ln‖M‖_∞
        assert!((3f64.ln() * mass_left(1.0) - 3f64.ln() * (4f64 / 3.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn integrals_against_oracle() {
        let n = 20_000;
        let m = integral_ln_m(n).unwrap();
        assert!((m.value - integral_oracle(Integrand::LnM, n)).abs() < 1e-8);
        assert!(m.value + m.tail_bound <= 3.8);
        let r = integral_ln_r(n).unwrap();
        let oracle = integral_oracle(Integrand::LnR, n);
        assert!((r.value - oracle).abs() < 1e-8, "{} vs {oracle}", r.value);
        assert!(r.value >= 2.46 && r.value + r.tail_bound <= 2.47);
        let f = lower_bound_f(n).unwrap();
        assert!((f.value - integral_oracle(Integrand::LnF, n)).abs() < 1e-8);
        assert!(f.value < m.value);
    }

    #[test]
    fn tails_are_certified() {
        let big = integral_ln_m(200_000).unwrap();
        for n in [100, 1000, 10_000] {
            let s = integral_ln_m(n).unwrap();
            assert!(big.value - s.value <= s.tail_bound);
            let r = integral_ln_r(n).unwrap();
            assert!(integral_ln_r(200_000).unwrap().value - r.value <= r.tail_bound);
        }
    }

    #[test]
    fn monte_carlo_small() {
        let a = birkhoff_estimate(0x5EED, 64, 2000).unwrap();
        let b = birkhoff_estimate(0x5EED, 64, 2000).unwrap();
        assert_eq!(a, b);
        assert!((a.s_hat - a.lambda_hat / a.ln_r_hat).abs() < 1e-15);
        assert!((a.ln_r_hat - 2.4668).abs() < 0.05, "{a:?}");
        assert!(a.lambda_hat > 2.66 && a.lambda_hat < 3.8);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| birkhoff_estimate(0x5EED, 64, 2000).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn witness_diverges() {
        let w = non_integrability_witness(30);
        assert!(non_integrability_holds(&w));
        let slope = w[29].1 - w[28].1;
        assert!((slope - std::f64::consts::LN_2 * 3f64.ln()).abs() < 1e-6);
    }

    #[test]
    fn sandwich_and_subadditivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = Param::from_interval(&Number::ratio(rng.gen_range(1..2_000_000), 1_000_003)).unwrap();
            let Ok(levels) = accelerated_levels(&p, 50) else { continue };
            for l in 2..=levels.len() {
                let hi = accelerated_product(&levels[..l]);
                let lo = accelerated_product(&levels[..l - 2]);
                let (a, b) = hi.col_sums();
                let (c, d) = lo.col_sums();
                let full = &a + &b;
                let low = &c + &d;
                assert!(low <= a && low <= b && a <= full && b <= full);
            }
        }
        let p = param("sqrt(11)-3,1");
        let levels = accelerated_levels(&p, 40).unwrap();
        let f = |s: &[cfrac::Accel]| log_norm_of(s.iter().map(|a| a.m_bold.to_f64()));
        for split in 1..39 {
            assert!(f(&levels) <= f(&levels[..split]) + f(&levels[split..]) + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn contraction_in_unit_interval(a in 1i64..50, b in 0i64..50, c in 0i64..50, d in 1i64..50) {
            let l = contraction(&Mat2::new(a, b, c, d));
            prop_assert!((0.0..=1.0).contains(&l));
        }

        #[test]
        fn log_norm_matches_bigint(num in 1i64..1_000_000) {
            let p = Param::from_interval(&Number::ratio(num, 999_983)).unwrap();
            if let Ok(levels) = accelerated_levels(&p, 20) {
                let exact = accelerated_product(&levels);
                let (a, b) = exact.col_sums();
                let ln = log_norm_of(levels.iter().map(|a| a.m_bold.to_f64()));
                prop_assert!((ln - big_ln(&(a + b))).abs() < 1e-9 * ln.max(1.0));
            }
        }
    }
}
