//! Gauss–Kronrod quadrature.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
pub fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, g * h)
}

/// Adaptive bisection until the Kronrod–Gauss gap is below `tol` on each panel.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (k, g) = kronrod15(f, a, b);
        if (k - g).abs() <= tol || depth >= 40 {
            return k;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2.0, depth + 1) + rec(f, m, b, tol / 2.0, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    rec(f, a, b, tol, 0)
}

/// Fixed composite rule with `panels` Kronrod panels.
pub fn composite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| kronrod15(f, a + i as f64 * h, a + (i + 1) as f64 * h).0)
        .sum()
}

/// Kahan-compensated sum.
pub fn kahan<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = 0.0;
    let mut c = 0.0;
    for v in it {
        let y = v - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

/// Σ_{i≥0} g(t0 + i·h) by Euler–Maclaurin; returns (estimate, remainder bound).
pub fn tail_sum<G: Fn(f64) -> f64>(g: &G, t0: f64, h: f64) -> (f64, f64) {
    // ∫_{t0}^∞ g with u = 1/t
    let inner = |u: f64| if u == 0.0 { 0.0 } else { g(1.0 / u) / (u * u) };
    let umax = 1.0 / t0;
    let integral = composite(&inner, 0.0, umax, 4);
    let coarse = composite(&inner, 0.0, umax, 2);
    let d = 1e-3 * t0.max(1.0);
    let g1 = (g(t0 + d) - g(t0 - d)) / (2.0 * d);
    let g3 = (g(t0 + 2.0 * d) - 2.0 * g(t0 + d) + 2.0 * g(t0 - d) - g(t0 - 2.0 * d)) / (2.0 * d * d * d);
    let est = integral / h + 0.5 * g(t0) - h * g1 / 12.0 + h.powi(3) * g3 / 720.0;
    // remainder term, quadrature gap, and the central-difference error in g′
    let bound = (h.powi(3) * g3 / 720.0).abs()
        + (integral - coarse).abs() / h
        + (h * d * d * g3 / 72.0).abs()
        + 1e-300;
    (est, bound)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let v = adaptive(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
        let v = adaptive(&|x: f64| -x.ln() / (1.0 + x), 0.0, 1.0, 1e-12);
        assert!((v - std::f64::consts::PI.powi(2) / 12.0).abs() < 1e-9);
    }

    #[test]
    fn euler_maclaurin_tail() {
        // Σ_{n ≥ N} 1/n² = ψ'(N) ≈ 1/N + 1/(2N²) + 1/(6N³)
        let nn = 1000.0;
        let (est, bound) = tail_sum(&|t: f64| 1.0 / (t * t), nn, 1.0);
        let exact = 1.0 / nn + 0.5 / (nn * nn) + 1.0 / (6.0 * nn.powi(3)) - 1.0 / (30.0 * nn.powi(5));
        assert!((est - exact).abs() < 1e-15 + bound);
    }
}
