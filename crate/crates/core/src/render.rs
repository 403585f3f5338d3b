//! Deterministic RGB rasterization of discontinuity sets, islands and covers.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractal::CoverStream;
use crate::pet::{self, Axis, Param};
use crate::renorm::Shape;

pub type Rgb = [u8; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Palette {
    #[default]
    Color,
    Gray,
}

impl std::str::FromStr for Palette {
    type Err = Error;
    fn from_str(s: &str) -> Result<Palette> {
        match s {
            "color" => Ok(Palette::Color),
            "gray" => Ok(Palette::Gray),
            _ => Err(Error::Parse(s.into())),
        }
    }
}

pub const WHITE: Rgb = [255, 255, 255];
pub const BLACK: Rgb = [0, 0, 0];

impl Palette {
    pub fn square(self) -> Rgb {
        match self {
            Palette::Color => [173, 216, 230],
            Palette::Gray => [225, 225, 225],
        }
    }

    pub fn rectangle(self) -> Rgb {
        match self {
            Palette::Color => [255, 182, 193],
            Palette::Gray => [200, 200, 200],
        }
    }

    pub fn line(self) -> Rgb {
        BLACK
    }

    /// Colour of the i-th smallest period class.
    pub fn island(self, i: usize) -> Rgb {
        const COLOR: [Rgb; 6] = [
            [0, 160, 0],
            [240, 220, 0],
            [0, 0, 0],
            [0, 90, 200],
            [200, 0, 200],
            [255, 120, 0],
        ];
        const GRAY: [Rgb; 3] = [[150, 150, 150], [90, 90, 90], [0, 0, 0]];
        match self {
            Palette::Color => COLOR[i % COLOR.len()],
            Palette::Gray => GRAY[i % GRAY.len()],
        }
    }

    pub fn cover(self, shape: Shape) -> Rgb {
        match (self, shape) {
            (Palette::Color, Shape::C) => [0, 0, 139],
            (Palette::Color, Shape::R) => [139, 0, 0],
            (Palette::Gray, Shape::C) => [40, 40, 40],
            (Palette::Gray, Shape::R) => [100, 100, 100],
        }
    }
}

/// Row-major RGB image of [0, 1+θ]×[0,1], y pointing up.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
    /// pixels per world unit horizontally
    pub scale_x: f64,
    /// pixels per world unit vertically
    pub scale_y: f64,
}

impl Image {
    /// Canvas for the parameter with `px` columns.
    pub fn for_param(p: &Param, px: usize) -> Result<Image> {
        if px < 64 {
            return Err(Error::InvalidArgument("px must be at least 64".into()));
        }
        let w = 1.0 + p.theta().to_f64();
        let height = (px as f64 / w).round().max(1.0) as usize;
        Ok(Image {
            width: px,
            height,
            data: vec![255; px * height * 3],
            scale_x: px as f64 / w,
            scale_y: height as f64,
        })
    }

    /// Smaller of the two axis scales.
    pub fn scale(&self) -> f64 {
        self.scale_x.min(self.scale_y)
    }

    /// Continuous pixel coordinates (column, row) of a world point.
    pub fn world_to_pixel(&self, x: f64, y: f64) -> (f64, f64) {
        (x * self.scale_x, self.height as f64 - y * self.scale_y)
    }

    pub fn pixel_to_world(&self, c: f64, r: f64) -> (f64, f64) {
        (c / self.scale_x, (self.height as f64 - r) / self.scale_y)
    }

    /// World coordinates of a pixel centre.
    pub fn center(&self, col: usize, row: usize) -> (f64, f64) {
        self.pixel_to_world(col as f64 + 0.5, row as f64 + 0.5)
    }

    fn pixel_of(&self, x: f64, y: f64) -> (usize, usize) {
        let (c, r) = self.world_to_pixel(x, y);
        (
            (c.floor().max(0.0) as usize).min(self.width - 1),
            (r.floor().max(0.0) as usize).min(self.height - 1),
        )
    }

    pub fn get(&self, col: usize, row: usize) -> Rgb {
        let i = 3 * (row * self.width + col);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    pub fn set(&mut self, col: usize, row: usize, c: Rgb) {
        let i = 3 * (row * self.width + col);
        self.data[i..i + 3].copy_from_slice(&c);
    }

    /// Colour every pixel from its centre.
    fn fill_by_center<F: Fn(f64, f64) -> Option<Rgb> + Sync>(&mut self, f: F) {
        let (w, sx, sy, h) = (self.width, self.scale_x, self.scale_y, self.height as f64);
        self.data.par_chunks_mut(3 * w).enumerate().for_each(|(row, line)| {
            let y = (h - row as f64 - 0.5) / sy;
            for col in 0..w {
                let x = (col as f64 + 0.5) / sx;
                if let Some(c) = f(x, y) {
                    line[3 * col..3 * col + 3].copy_from_slice(&c);
                }
            }
        });
    }

    /// Pixels whose centre lies in the closed rectangle [x0,x1]×[y0,y1].
    fn fill_rect_centers(&mut self, r: [f64; 4], c: Rgb) {
        let (c0, r1) = self.world_to_pixel(r[0], r[1]);
        let (c1, r0) = self.world_to_pixel(r[2], r[3]);
        let lo = |v: f64| (v - 0.5).ceil().max(0.0) as usize;
        let hi = |v: f64, n: usize| ((v - 0.5).floor()).min(n as f64 - 1.0);
        let (ch, rh) = (hi(c1, self.width), hi(r1, self.height));
        if ch < 0.0 || rh < 0.0 {
            return;
        }
        for row in lo(r0)..=rh as usize {
            for col in lo(c0)..=ch as usize {
                self.set(col, row, c);
            }
        }
    }

    /// Pixels whose square meets the rectangle.
    fn fill_rect_overlap(&mut self, r: [f64; 4], c: Rgb) {
        let (c0, r1) = self.world_to_pixel(r[0], r[1]);
        let (c1, r0) = self.world_to_pixel(r[2], r[3]);
        let clamp = |v: f64, n: usize| (v.max(0.0) as usize).min(n - 1);
        let (a, b) = (clamp(c0.floor(), self.width), clamp(c1.ceil() - 1.0, self.width));
        let (u, v) = (clamp(r0.floor(), self.height), clamp(r1.ceil() - 1.0, self.height));
        for row in u..=v.max(u) {
            for col in a..=b.max(a) {
                self.set(col, row, c);
            }
        }
    }

    /// Bresenham line between two pixels.
    pub fn line(&mut self, from: (usize, usize), to: (usize, usize), c: Rgb) {
        let (mut x, mut y) = (from.0 as i64, from.1 as i64);
        let (x1, y1) = (to.0 as i64, to.1 as i64);
        let dx = (x1 - x).abs();
        let dy = -(y1 - y).abs();
        let sx = if x < x1 { 1 } else { -1 };
        let sy = if y < y1 { 1 } else { -1 };
        let mut err = dx + dy;
        loop {
            self.set(x as usize, y as usize, c);
            if x == x1 && y == y1 {
                break;
            }
            let e2 = 2 * err;
            if e2 >= dy {
                err += dy;
                x += sx;
            }
            if e2 <= dx {
                err += dx;
                y += sy;
            }
        }
    }

    /// Binary P6 pixmap.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn write_ppm(&self, path: &Path) -> std::io::Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        f.write_all(&self.to_ppm())?;
        f.flush()
    }

    pub fn mask(&self, c: Rgb) -> Mask {
        Mask {
            width: self.width,
            height: self.height,
            bits: self.data.chunks(3).map(|p| p == c).collect(),
        }
    }

    pub fn mask_where<F: Fn(Rgb) -> bool>(&self, f: F) -> Mask {
        Mask {
            width: self.width,
            height: self.height,
            bits: self.data.chunks(3).map(|p| f([p[0], p[1], p[2]])).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Mask {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
}

impl Mask {
    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Squared Euclidean distance of every pixel to the set.
    fn distance_sq(&self) -> Vec<f64> {
        const INF: f64 = 1e20;
        let (w, h) = (self.width, self.height);
        let mut d: Vec<f64> = self.bits.iter().map(|&b| if b { 0.0 } else { INF }).collect();
        let mut col = vec![0.0; h];
        for x in 0..w {
            for y in 0..h {
                col[y] = d[y * w + x];
            }
            let out = edt_1d(&col);
            for y in 0..h {
                d[y * w + x] = out[y];
            }
        }
        d.par_chunks_mut(w).for_each(|row| {
            let out = edt_1d(row);
            row.copy_from_slice(&out);
        });
        d
    }
}

/// Lower envelope of parabolas (Felzenszwalb–Huttenlocher).
fn edt_1d(f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut v = vec![0usize; n];
    let mut z = vec![0.0f64; n + 1];
    let mut k = 0;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in 1..n {
        loop {
            let p = v[k];
            let s = ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64));
            if s <= z[k] && k > 0 {
                k -= 1;
                continue;
            }
            if s <= z[k] {
                // k == 0 and the new parabola dominates everywhere
                v[0] = q;
                z[1] = f64::INFINITY;
                break;
            }
            k += 1;
            v[k] = q;
            z[k] = s;
            z[k + 1] = f64::INFINITY;
            break;
        }
    }
    let mut out = vec![0.0; n];
    let mut k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        *o = (q as f64 - p as f64).powi(2) + f[p];
    }
    out
}

/// Symmetric Hausdorff distance in pixels between two masks of equal size.
pub fn pixel_hausdorff(a: &Mask, b: &Mask) -> Result<f64> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(Error::InvalidArgument("masks differ in size".into()));
    }
    if a.count() == 0 || b.count() == 0 {
        return Ok(if a.count() == b.count() { 0.0 } else { f64::INFINITY });
    }
    let (da, db) = (a.distance_sq(), b.distance_sq());
    let directed = |from: &Mask, d: &[f64]| {
        from.bits
            .iter()
            .zip(d)
            .filter(|(&b, _)| b)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max)
    };
    Ok(directed(a, &db).max(directed(b, &da)).sqrt())
}

fn tint(p: &Param, pal: Palette) -> impl Fn(f64, f64) -> Option<Rgb> + Sync {
    let _ = p;
    move |x: f64, _y: f64| Some(if x < 1.0 { pal.square() } else { pal.rectangle() })
}

/// Discontinuity set to `depth`, drawn 1px wide over tinted pieces.
pub fn render_discontinuities(p: &Param, depth: usize, px: usize, pal: Palette) -> Result<Image> {
    let mut img = Image::for_param(p, px)?;
    img.fill_by_center(tint(p, pal));
    for s in pet::discontinuity_segments(p, depth) {
        let (x, y) = s.start.to_f64();
        let len = s.length.to_f64();
        let (x1, y1) = match s.axis {
            Axis::Horizontal => (x + len, y),
            Axis::Vertical => (x, y + len),
        };
        let (a, b) = (img.pixel_of(x, y), img.pixel_of(x1, y1));
        img.line(a, b, pal.line());
    }
    Ok(img)
}

/// Periodic cells whose period is listed, coloured by period class.
pub fn render_islands(p: &Param, periods: &[u64], px: usize, pal: Palette) -> Result<Image> {
    let mut img = Image::for_param(p, px)?;
    img.fill_by_center(tint(p, pal));
    let mut sorted = periods.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let Some(&max) = sorted.last() else { return Ok(img) };
    for c in pet::islands(p, Some(max))? {
        if let Ok(i) = sorted.binary_search(&(c.period() as u64)) {
            let [x, y, w, h] = c.rect.to_f64();
            img.fill_rect_centers([x, y, x + w, y + h], pal.island(i));
        }
    }
    Ok(img)
}

/// Depth-ℓ cover of K_ω; every pixel meeting a piece is filled.
pub fn render_cover(p: &Param, l: usize, px: usize, pal: Palette) -> Result<Image> {
    let mut img = Image::for_param(p, px)?;
    let stream = CoverStream::new(p, l)?;
    stream.for_each(|shape, r| img.fill_rect_overlap(r, pal.cover(shape)));
    Ok(img)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn param(s: &str) -> Param {
        s.parse().unwrap()
    }

    #[test]
    fn depth_zero_is_outline() {
        let p = param("3/5,-1");
        let img = render_discontinuities(&p, 0, 200, Palette::Color).unwrap();
        assert_eq!((img.width, img.height), (200, 125));
        // interior pixels keep their tint; the x = 1 line is black
        assert_eq!(img.get(50, 60), Palette::Color.square());
        assert_eq!(img.get(180, 60), Palette::Color.rectangle());
        assert_eq!(img.get(125, 60), BLACK);
        assert_eq!(img.get(0, 60), BLACK);
        assert_eq!(img.get(50, 0), BLACK);
        let black = img.mask(BLACK).count();
        assert!(black <= 2 * 200 + 3 * 125 + 8);
    }

    #[test]
    fn round_trip() {
        let img = Image::for_param(&param("sqrt(2)-1,-1"), 1000).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10_000 {
            let (x, y) = (rng.gen::<f64>() * std::f64::consts::SQRT_2, rng.gen::<f64>());
            let (c, r) = img.world_to_pixel(x, y);
            let (x2, y2) = img.pixel_to_world(c, r);
            assert!((x - x2).abs() * img.scale_x < 0.5 && (y - y2).abs() * img.scale_y < 0.5);
            let (col, row) = img.pixel_of(x, y);
            let (cx, cy) = img.center(col, row);
            assert!((cx - x).abs() * img.scale_x <= 0.5 + 1e-9);
            assert!((cy - y).abs() * img.scale_y <= 0.5 + 1e-9);
        }
    }

    #[test]
    fn deterministic_and_convergent() {
        let p = param("3/5,-1");
        let a = render_discontinuities(&p, 40, 1000, Palette::Color).unwrap();
        let b = render_discontinuities(&p, 40, 1000, Palette::Color).unwrap();
        assert_eq!(a.to_ppm(), b.to_ppm());
        let c = render_discontinuities(&p, 41, 1000, Palette::Color).unwrap();
        let d = pixel_hausdorff(&a.mask(BLACK), &c.mask(BLACK)).unwrap();
        assert!(d < 3.0, "{d}");
    }

    #[test]
    fn silver_islands() {
        let p = param("sqrt(2)-1,-1");
        let img = render_islands(&p, &[1, 5, 21], 1000, Palette::Color).unwrap();
        let th = p.theta().to_f64();
        let eps = 3.0 / img.scale();
        let (c, r) = img.pixel_of(th + eps, th + eps);
        assert_eq!(img.get(c, r), Palette::Color.island(0));
        let (c, r) = img.pixel_of(1.0 - eps, 1.0 - eps);
        assert_eq!(img.get(c, r), Palette::Color.island(0));
        let (c, r) = img.pixel_of(th - eps, th + eps);
        assert_ne!(img.get(c, r), Palette::Color.island(0));
        let cells = pet::islands(&p, Some(21)).unwrap();
        let area: f64 = cells.iter().map(|c| c.rect.area().to_f64()).sum();
        let colored = (0..3)
            .map(|i| img.mask(Palette::Color.island(i)).count())
            .sum::<usize>() as f64;
        let frac = colored / (img.width * img.height) as f64;
        let perimeter: f64 = cells
            .iter()
            .map(|c| 2.0 * (c.rect.width.to_f64() + c.rect.height.to_f64()))
            .sum();
        // centre sampling misses at most a half-pixel strip along each edge
        let slack = perimeter / img.scale() / (1.0 + th) + 2.0 / img.width as f64;
        assert!((frac - area / (1.0 + th)).abs() <= slack, "{frac} vs {}", area / (1.0 + th));
    }

    #[test]
    fn cover_nested_and_convergent() {
        let p = param("sqrt(2)-1,-1");
        let a = render_cover(&p, 5, 400, Palette::Color).unwrap();
        let b = render_cover(&p, 6, 400, Palette::Color).unwrap();
        let ma = a.mask_where(|c| c != WHITE);
        let mb = b.mask_where(|c| c != WHITE);
        assert!(mb.bits.iter().zip(&ma.bits).all(|(&x, &y)| !x || y));
        assert!(mb.count() < ma.count());
        assert!(pixel_hausdorff(&ma, &mb).unwrap() < 3.0);
        assert_eq!(a.to_ppm(), render_cover(&p, 5, 400, Palette::Color).unwrap().to_ppm());
    }

    #[test]
    fn hausdorff_on_points() {
        let mut a = Mask { width: 20, height: 10, bits: vec![false; 200] };
        let mut b = a.clone();
        a.bits[0] = true;
        b.bits[3 * 20 + 4] = true;
        assert!((pixel_hausdorff(&a, &b).unwrap() - 5.0).abs() < 1e-12);
        assert_eq!(pixel_hausdorff(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn ppm_header() {
        let img = Image::for_param(&param("0,-1"), 64).unwrap();
        assert!(img.to_ppm().starts_with(b"P6\n64 64\n255\n"));
        assert_eq!(img.to_ppm().len(), 13 + 64 * 64 * 3);
    }
}
