//! Hausdorff-dimension estimates for the aperiodic set K_ω.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Number;
use crate::pet::{Eps, Param};
use crate::renorm::{self, CoverPiece, Shape};
use crate::symbolic::{accelerated_levels, accelerated_product, big_ln, letter_frequency};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Minus,
    Plus,
}

impl std::str::FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s {
            "minus" | "-1" => Ok(Family::Minus),
            "plus" | "+1" | "1" => Ok(Family::Plus),
            _ => Err(Error::Parse(s.into())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    RatioSequence,
    BoxCount,
    LocalScaling,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub method: Method,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub depth: Option<usize>,
    /// max − min of the last three ratio-sequence values
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub spread: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub r_squared: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
}

impl DimensionReport {
    fn new(method: Method, value: f64) -> DimensionReport {
        DimensionReport {
            method,
            value,
            depth: None,
            spread: None,
            r_squared: None,
            samples: None,
        }
    }
}

/// Closed-form dimension at a fixed point of S.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilar {
    pub family: Family,
    pub n: u64,
    /// fixed parameter θ
    pub theta: Number,
    /// Perron eigenvalue of the fixed incidence matrix
    pub eigenvalue: Number,
    /// linear contraction of the self-similarity
    pub contraction: Number,
    pub expression: String,
    pub value: f64,
}

pub fn selfsimilar_dimension(family: Family, n: u64) -> Result<SelfSimilar> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let ni = n as i64;
    let (theta, eigenvalue, contraction) = match family {
        Family::Minus => {
            let root = Number::quad(0, 1, n * n + 1);
            let theta = &root - &Number::int(ni);
            let lam = &Number::int(2 * ni) + &Number::quad(0, 1, 4 * n * n + 1);
            (theta.clone(), lam, theta)
        }
        Family::Plus => {
            let c = &Number::int(ni + 1) - &Number::quad(0, 1, n * n + 2 * n);
            let lam = &Number::int(2 * ni + 1) + &(&Number::int(2) * &Number::quad(0, 1, n * n + n));
            (&Number::one() - &c, lam, c)
        }
    };
    let value = -eigenvalue.to_f64().ln() / contraction.to_f64().ln();
    Ok(SelfSimilar {
        family,
        n,
        expression: format!("-ln({eigenvalue})/ln({contraction})"),
        theta,
        eigenvalue,
        contraction,
        value,
    })
}

/// Fixed parameter of the family.
pub fn selfsimilar_param(family: Family, n: u64) -> Result<Param> {
    let s = selfsimilar_dimension(family, n)?;
    Param::new(
        s.theta,
        match family {
            Family::Minus => Eps::Minus,
            Family::Plus => Eps::Plus,
        },
    )
}

/// `n,minus,plus` rows for n = 1..=rows.
pub fn dimension_table(rows: u64) -> Result<String> {
    let mut out = String::from("n,minus,plus\n");
    for n in 1..=rows {
        let m = selfsimilar_dimension(Family::Minus, n)?.value;
        let p = selfsimilar_dimension(Family::Plus, n)?.value;
        out.push_str(&format!("{n},{m:.6},{p:.6}\n"));
    }
    Ok(out)
}

/// ln 𝐍^{(k)} / Σ_{i<k} ln 𝐫(𝐒^i x) for k = 1..=ℓ.
pub fn ratio_sequence(p: &Param, l: usize) -> Result<Vec<f64>> {
    let levels = accelerated_levels(p, l)?;
    let mut ln_r = 0.0;
    let mut out = Vec::with_capacity(l);
    for k in 1..=l {
        ln_r += levels[k - 1].r_bold.to_f64().ln();
        let (a, b) = accelerated_product(&levels[..k]).col_sums();
        out.push(big_ln(&(a + b)) / ln_r);
    }
    Ok(out)
}

pub fn dimension_estimate(p: &Param, l: usize) -> Result<DimensionReport> {
    if l == 0 {
        return Err(Error::InvalidArgument("depth must be positive".into()));
    }
    let seq = ratio_sequence(p, l)?;
    let tail = &seq[seq.len().saturating_sub(3)..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let mut r = DimensionReport::new(Method::RatioSequence, seq[l - 1]);
    r.depth = Some(l);
    r.spread = Some(hi - lo);
    Ok(r)
}

/// Float cover rectangles `[x0, y0, x1, y1]` streamed along the T-orbits of the base pieces.
pub struct CoverStream {
    theta: f64,
    plus: bool,
    /// exact count per base piece
    pub counts: [u64; 2],
    bases: [[f64; 4]; 2],
    /// side of the depth-ℓ square pieces
    pub contraction: f64,
    /// parameter at depth ℓ
    pub deep: Param,
}

impl CoverStream {
    pub fn new(p: &Param, l: usize) -> Result<CoverStream> {
        let base = renorm::cover_base(p, l)?;
        let to_rect = |r: &crate::pet::Rect| {
            let [x, y, w, h] = r.to_f64();
            [x, y, x + w, y + h]
        };
        let count = |c: &num_bigint::BigInt| {
            use num_traits::ToPrimitive;
            c.to_u64()
                .filter(|&c| c <= 1 << 34)
                .ok_or_else(|| Error::InvalidArgument("cover too large".into()))
        };
        Ok(CoverStream {
            theta: p.theta().to_f64(),
            plus: p.eps() == Eps::Plus,
            counts: [count(&base.count_c)?, count(&base.count_r)?],
            bases: [to_rect(&base.base_c), to_rect(&base.base_r)],
            contraction: base.contraction.to_f64(),
            deep: base.params[l].clone(),
        })
    }

    pub fn total(&self) -> u64 {
        self.counts[0] + self.counts[1]
    }

    fn step(&self, r: [f64; 4]) -> [f64; 4] {
        let cx = 0.5 * (r[0] + r[2]);
        let w = 1.0 + self.theta;
        if cx < 1.0 {
            let (y0, y1) = if self.plus { (1.0 - r[2], 1.0 - r[0]) } else { (r[0], r[2]) };
            [w - r[3], y0, w - r[1], y1]
        } else {
            [r[0] - 1.0, 1.0 - r[3], r[2] - 1.0, 1.0 - r[1]]
        }
    }

    /// Visit every piece with its shape.
    pub fn for_each<F: FnMut(Shape, [f64; 4])>(&self, mut f: F) {
        for (k, shape) in [Shape::C, Shape::R].into_iter().enumerate() {
            let mut r = self.bases[k];
            for i in 0..self.counts[k] {
                if i > 0 {
                    r = self.step(r);
                }
                f(shape, r);
            }
        }
    }
}

const BITMAP_BUDGET: u64 = 1 << 30;

/// Grid indices of cells meeting [a, b] in more than a boundary point, up to float noise.
fn cell_range(a: f64, b: f64, s: f64, n: u64) -> (u64, u64) {
    const SNAP: f64 = 1e-9;
    let lo = ((a / s + SNAP).floor().max(0.0) as u64).min(n - 1);
    let hi = (((b / s - SNAP).ceil().max(1.0)) as u64 - 1).clamp(lo, n - 1);
    (lo, hi)
}

/// Side-r grid cells of [0, width]×[0,1] meeting at least one rectangle, in y-bands.
fn count_cells<S: Fn(&mut dyn FnMut([f64; 4]))>(stream: S, width: f64, r: f64) -> u64 {
    let nx = (width / r).ceil() as u64 + 1;
    let ny = (1.0 / r).ceil() as u64 + 1;
    let band = (BITMAP_BUDGET / nx).clamp(1, ny);
    let words_per_row = nx.div_ceil(64) as usize;
    let mut total = 0u64;
    let mut y_start = 0;
    while y_start < ny {
        let rows = band.min(ny - y_start);
        let mut bits = vec![0u64; words_per_row * rows as usize];
        stream(&mut |rect: [f64; 4]| {
            let (iy0, iy1) = cell_range(rect[1], rect[3], r, ny);
            if iy1 < y_start || iy0 >= y_start + rows {
                return;
            }
            let (ix0, ix1) = cell_range(rect[0], rect[2], r, nx);
            for iy in iy0.max(y_start)..=iy1.min(y_start + rows - 1) {
                let row = (iy - y_start) as usize * words_per_row;
                for ix in ix0..=ix1 {
                    bits[row + (ix / 64) as usize] |= 1 << (ix % 64);
                }
            }
        });
        total += bits.par_iter().map(|w| w.count_ones() as u64).sum::<u64>();
        y_start += rows;
    }
    total
}

/// Number of side-r grid boxes meeting a cover piece.
pub fn box_count(pieces: &[CoverPiece], r: f64) -> Result<u64> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument("radius must be positive".into()));
    }
    let rects: Vec<[f64; 4]> = pieces
        .iter()
        .map(|c| {
            let [x, y, w, h] = c.rect.to_f64();
            [x, y, x + w, y + h]
        })
        .collect();
    let width = rects.iter().map(|r| r[2]).fold(1.0, f64::max);
    Ok(count_cells(
        |f: &mut dyn FnMut([f64; 4])| rects.iter().for_each(|&r| f(r)),
        width,
        r,
    ))
}

/// Box counts of a depth-ℓ cover at each radius, streaming the pieces.
pub fn box_counts_streamed(p: &Param, l: usize, radii: &[f64]) -> Result<Vec<(f64, u64)>> {
    let stream = CoverStream::new(p, l)?;
    let width = 1.0 + p.theta().to_f64();
    Ok(radii
        .iter()
        .map(|&r| {
            let n = count_cells(
                |f: &mut dyn FnMut([f64; 4])| stream.for_each(|_, rect| f(rect)),
                width,
                r,
            );
            (r, n)
        })
        .collect())
}

/// (slope, intercept, R²) of the least-squares line through the points.
fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Slope of ln Numb(r) against −ln r.
pub fn slope_fit(counts: &[(f64, u64)]) -> Result<DimensionReport> {
    if counts.len() < 2 {
        return Err(Error::DegenerateFit(0.0));
    }
    let pts: Vec<(f64, f64)> = counts.iter().map(|&(r, n)| (-r.ln(), (n as f64).ln())).collect();
    let (slope, _, r2) = least_squares(&pts);
    if !(r2 >= 0.99) {
        return Err(Error::DegenerateFit(r2));
    }
    let mut rep = DimensionReport::new(Method::BoxCount, slope);
    rep.r_squared = Some(r2);
    rep.samples = Some(counts.len());
    Ok(rep)
}

/// Measures (α, β) of a depth-ℓ square and rectangle piece.
pub fn piece_measures(stream: &CoverStream) -> Result<(f64, f64)> {
    let fa = letter_frequency(&stream.deep, 40)?;
    let [na, nb] = stream.counts;
    let norm = na as f64 * fa + nb as f64 * (1.0 - fa);
    Ok((fa / norm, (1.0 - fa) / norm))
}

pub const LOCAL_SCALING_MAX_DEPTH: usize = 12;

/// Minimum over sample points of the fitted exponent of μ(B(x,r)) ~ r^d.
pub fn local_scaling(p: &Param, points: usize, radii: &[f64]) -> Result<DimensionReport> {
    if points == 0 || radii.len() < 2 {
        return Err(Error::InvalidArgument("need points ≥ 1 and at least two radii".into()));
    }
    let r_min = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let r_max = radii.iter().cloned().fold(0.0, f64::max);
    // deepest cover needed so pieces are small against the smallest ball
    let mut depth = None;
    for l in 1..=LOCAL_SCALING_MAX_DEPTH {
        let base = renorm::cover_base(p, l)?;
        if std::f64::consts::SQRT_2 * base.contraction.to_f64() <= r_min / 2.0 {
            depth = Some(l);
            break;
        }
    }
    let depth = depth.ok_or_else(|| {
        Error::DepthMismatch(format!(
            "radius {r_min:e} needs a cover deeper than {LOCAL_SCALING_MAX_DEPTH}"
        ))
    })?;
    let stream = CoverStream::new(p, depth)?;
    let (alpha, beta) = piece_measures(&stream)?;
    let total = stream.total();
    let stride = (total / points as u64).max(1);
    let mut centres = Vec::with_capacity(points);
    let mut i = 0u64;
    stream.for_each(|_, r| {
        if i % stride == stride / 2 && centres.len() < points {
            centres.push([0.5 * (r[0] + r[2]), 0.5 * (r[1] + r[3])]);
        }
        i += 1;
    });
    let mut sorted = radii.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut mass = vec![vec![0.0f64; sorted.len()]; centres.len()];
    stream.for_each(|shape, r| {
        let c = [0.5 * (r[0] + r[2]), 0.5 * (r[1] + r[3])];
        let m = if shape == Shape::C { alpha } else { beta };
        for (k, z) in centres.iter().enumerate() {
            let (dx, dy) = (c[0] - z[0], c[1] - z[1]);
            if dx.abs() > r_max || dy.abs() > r_max {
                continue;
            }
            let d = (dx * dx + dy * dy).sqrt();
            let first = sorted.partition_point(|&rad| rad < d);
            for acc in &mut mass[k][first..] {
                *acc += m;
            }
        }
    });
    let slopes = mass
        .iter()
        .map(|ms| {
            let pts: Vec<(f64, f64)> = sorted.iter().zip(ms).map(|(r, m)| (r.ln(), m.ln())).collect();
            least_squares(&pts).0
        })
        .collect::<Vec<_>>();
    let min = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut rep = DimensionReport::new(Method::LocalScaling, min);
    rep.depth = Some(depth);
    rep.samples = Some(centres.len());
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::renorm::incidence_matrix;

    const TABLE: [[f64; 5]; 2] = [
        [1.637938, 1.450998, 1.370279, 1.325467, 1.296563],
        [1.338499, 1.300488, 1.276470, 1.259479, 1.246613],
    ];

    #[test]
    fn table_values() {
        for (row, fam) in TABLE.iter().zip([Family::Minus, Family::Plus]) {
            for (i, &v) in row.iter().enumerate() {
                let d = selfsimilar_dimension(fam, i as u64 + 1).unwrap();
                assert!((d.value - v).abs() < 1e-5, "{fam:?} {} {}", i + 1, d.value);
            }
        }
        let t = dimension_table(5).unwrap();
        assert!(t.starts_with("n,minus,plus\n1,1.637938,1.338499\n"));
    }

    #[test]
    fn closed_form_matches_fixed_incidence_matrix() {
        for fam in [Family::Minus, Family::Plus] {
            for n in 1..=10 {
                let s = selfsimilar_dimension(fam, n).unwrap();
                let p = selfsimilar_param(fam, n).unwrap();
                assert_eq!(renorm::renorm_step(&p).unwrap(), p);
                let m = incidence_matrix(&p).unwrap().to_f64();
                let tr = m[0][0] + m[1][1];
                let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
                let lam = 0.5 * (tr + (tr * tr - 4.0 * det).sqrt());
                let r = renorm::ratio(&p).unwrap().to_f64();
                assert!((lam.ln() / r.ln() - s.value).abs() < 1e-12);
                assert!((s.contraction.to_f64() * r - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn estimates_converge() {
        for (p, target) in [("sqrt(2)-1,-1", TABLE[0][0]), ("sqrt(3)-1,1", TABLE[1][0])] {
            let p: Param = p.parse().unwrap();
            let r = dimension_estimate(&p, 50).unwrap();
            assert!((r.value - target).abs() < 2e-2, "{r:?}");
            assert!(r.spread.unwrap() < 1e-3);
            let seq = ratio_sequence(&p, 50).unwrap();
            assert!((seq[49] - target).abs() < (seq[9] - target).abs());
        }
    }

    #[test]
    fn radius_decreases() {
        let p: Param = "sqrt(7)-2,1".parse().unwrap();
        let levels = accelerated_levels(&p, 30).unwrap();
        assert!(levels.iter().all(|a| a.r_bold > Number::one()));
    }

    #[test]
    fn stream_matches_exact_cover() {
        let p: Param = "sqrt(2)-1,-1".parse().unwrap();
        let exact = renorm::cover(&p, 4).unwrap();
        let s = CoverStream::new(&p, 4).unwrap();
        let mut i = 0;
        s.for_each(|shape, r| {
            let e = &exact[i];
            let [x, y, w, h] = e.rect.to_f64();
            assert_eq!(shape, e.shape);
            for (a, b) in r.iter().zip([x, y, x + w, y + h]) {
                assert!((a - b).abs() < 1e-12);
            }
            i += 1;
        });
        assert_eq!(i, exact.len());
        assert_eq!(box_count(&exact, 0.05).unwrap(), box_counts_streamed(&p, 4, &[0.05]).unwrap()[0].1);
    }

    #[test]
    fn box_count_monotone_and_bounded() {
        let p: Param = "sqrt(2)-1,-1".parse().unwrap();
        let theta = p.theta().to_f64();
        for l in 1..=8 {
            let s = CoverStream::new(&p, l).unwrap();
            let r = std::f64::consts::SQRT_2 * s.contraction;
            let n = box_counts_streamed(&p, l, &[r]).unwrap()[0].1;
            assert!(n <= s.total(), "l = {l}: {n} > {}", s.total());
        }
        let radii: Vec<f64> = (2..8).map(|k| 2f64.powi(-k)).collect();
        let c = box_counts_streamed(&p, 6, &radii).unwrap();
        assert!(c.windows(2).all(|w| w[0].1 <= w[1].1));
        assert!(theta > 0.0);
    }

    #[test]
    fn box_slope() {
        let p: Param = "sqrt(2)-1,-1".parse().unwrap();
        let radii: Vec<f64> = (4..=12).map(|k| 2f64.powi(-k)).collect();
        let counts = box_counts_streamed(&p, 10, &radii).unwrap();
        let rep = slope_fit(&counts).unwrap();
        assert!((rep.value - 1.64).abs() < 0.05, "{rep:?}");
    }

    #[test]
    fn degenerate_fit() {
        let bad = [(0.5, 10), (0.25, 3), (0.125, 40)];
        assert!(matches!(slope_fit(&bad), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn piece_measures_sum_to_one() {
        let p: Param = "sqrt(2)-1,-1".parse().unwrap();
        for l in 1..6 {
            let s = CoverStream::new(&p, l).unwrap();
            let (a, b) = piece_measures(&s).unwrap();
            let total = s.counts[0] as f64 * a + s.counts[1] as f64 * b;
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn local_scaling_certificate() {
        let p: Param = "sqrt(2)-1,-1".parse().unwrap();
        let theta = p.theta().to_f64();
        let radii: Vec<f64> = (4..=9).map(|k| theta.powi(k)).collect();
        let rep = local_scaling(&p, 12, &radii).unwrap();
        let boxes = slope_fit(&box_counts_streamed(&p, 10, &(4..=12).map(|k| 2f64.powi(-k)).collect::<Vec<_>>()).unwrap()).unwrap();
        assert!(rep.value <= boxes.value + 0.05, "{rep:?} vs {boxes:?}");
        assert!(rep.value >= 1.5, "{rep:?}");
    }

    #[test]
    fn too_deep_is_depth_mismatch() {
        let p: Param = "sqrt(2)-1,-1".parse().unwrap();
        assert!(matches!(local_scaling(&p, 4, &[1e-9, 1e-8]), Err(Error::DepthMismatch(_))));
    }
}
