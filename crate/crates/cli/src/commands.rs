use std::fmt::Write as _;

use anyhow::{bail, Context};
use serde::Serialize;
use sqrex_core::cfrac::{self, IntervalParam, Status};
use sqrex_core::fractal::{self, DimensionReport, Family};
use sqrex_core::lyapunov::{self, CocycleEstimate, SeriesValue};
use sqrex_core::pet::{self, Cell, Segment};
use sqrex_core::renorm::{self, CoverPiece};
use sqrex_core::symbolic::{self, TowerStats, Word};
use sqrex_core::{render, Param, Point};

use crate::args::{Command, Common, DimMethod, RenderKind};
use crate::output::{num, Report};

/// Orbit of a point with its coding and period.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct OrbitReport {
    pub param: Param,
    pub points: Vec<Point>,
    pub code: Word,
    pub period: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub complexity: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct SturmianReport {
    pub param: Param,
    pub len: usize,
    pub rows: Vec<ComplexityRow>,
    /// complexity is n+1 for every listed n
    pub sturmian: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Integrals {
    #[serde(rename = "ln_r")]
    pub ln_r: SeriesValue,
    #[serde(rename = "ln_M")]
    pub ln_m: SeriesValue,
    pub lower_bound_f: SeriesValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct TableRow {
    pub n: u64,
    pub minus: f64,
    pub plus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct RenderReport {
    pub kind: String,
    pub param: Param,
    pub width: usize,
    pub height: usize,
    pub file: String,
}

/// Binary side output (figures) besides the report.
pub struct Outcome {
    pub report: Report,
    pub artifact: Option<Vec<u8>>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Outcome {
        Outcome { report, artifact: None }
    }
}

fn lines<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(|x| f(x) + "\n").collect()
}

pub fn run(cmd: &Command, common: &Common) -> anyhow::Result<Outcome> {
    let seed = common.seed;
    Ok(match cmd {
        Command::Expand { p, depth } => {
            let e = cfrac::expand(&IntervalParam::from_param(&p.param), *depth);
            let mut text = format!("{} digits, {:?}", e.digits.len(), e.status);
            if e.status == Status::Periodic {
                let _ = write!(text, " (preperiod {:?}, period {:?})", e.preperiod, e.period);
            }
            text.push('\n');
            for d in &e.digits {
                let _ = writeln!(text, "n={} eps={}", d.n, d.eps.sign());
            }
            Report::new(&e, text)?.into()
        }
        Command::Orbit { p, point, n } => {
            let p = &p.param;
            let points = pet::orbit(p, point, *n)?;
            let code = pet::code_orbit(p, point, *n)?;
            let period = pet::detect_period(p, point, *n)?;
            let r = OrbitReport { param: p.clone(), points, code, period };
            let text = format!("code {}\nperiod {:?}\n", r.code, r.period)
                + &lines(&r.points, |z| format!("{} {}", z.x, z.y));
            Report::new(&r, text)?.into()
        }
        Command::Islands { p, max_period } => {
            let cells: Vec<Cell> = pet::islands(&p.param, Some(*max_period))?;
            Report::new(&cells, lines(&cells, Cell::to_line))?.into()
        }
        Command::InductionCheck { p, samples, tol } => {
            let r = renorm::induction_verify(&p.param, *samples, *tol, seed)?;
            let text = format!(
                "{}: max error {:e} over {} samples ({})\n",
                r.param,
                r.max_error,
                r.samples,
                if r.pass { "pass" } else { "fail" }
            );
            Report::new(&r, text)?.into()
        }
        Command::Sturmian { p, n, len } => {
            let u = symbolic::limit_word(&p.param, *len)?;
            let rows = (1..=*n)
                .map(|k| Ok(ComplexityRow { n: k, complexity: symbolic::complexity(&u, k)? }))
                .collect::<sqrex_core::Result<Vec<_>>>()?;
            let sturmian = rows.iter().all(|r| r.complexity == r.n + 1);
            let r = SturmianReport { param: p.param.clone(), len: *len, rows, sturmian };
            let text = format!("sturmian: {}\n", r.sturmian) + &lines(&r.rows, |r| format!("{} {}", r.n, r.complexity));
            Report::new(&r, text)?.into()
        }
        Command::Tower { p, l, prefix } => {
            let t: TowerStats = symbolic::tower_stats(&p.param, *l, *prefix)?;
            let csv = format!("{}\n{}\n", TowerStats::CSV_HEADER, t.csv_row());
            let text = format!(
                "Na={} Nb={} N={} alpha={} beta={}\n",
                t.n_a, t.n_b, t.n, t.alpha, t.beta
            );
            Report::new(&t, text)?.with_csv(csv).into()
        }
        Command::Lyapunov { trials, l } => {
            let e: CocycleEstimate = lyapunov::birkhoff_estimate(seed, *trials, *l)?;
            let csv = format!("{}\n", CocycleEstimate::CSV_HEADER) + &lines(&e.csv_rows(), String::clone);
            let text = format!(
                "lambda_hat {} ± {}\nlnR_hat {} ± {}\ns_hat {} ± {}\n",
                e.lambda_hat, e.lambda_stderr, e.ln_r_hat, e.ln_r_stderr, e.s_hat, e.s_stderr
            );
            Report::new(&e, text)?.with_csv(csv).into()
        }
        Command::Integrals { terms } => {
            let r = Integrals {
                ln_r: lyapunov::integral_ln_r(*terms)?,
                ln_m: lyapunov::integral_ln_m(*terms)?,
                lower_bound_f: lyapunov::lower_bound_f(*terms)?,
            };
            let named = [("ln_r", &r.ln_r), ("ln_M", &r.ln_m), ("lower_bound_f", &r.lower_bound_f)];
            let csv = format!("{}\n", SeriesValue::CSV_HEADER) + &lines(&named, |(k, v)| v.csv_row(k));
            let text = lines(&named, |(k, v)| format!("{k} {} (tail ≤ {})", v.value, v.tail_bound));
            Report::new(&r, text)?.with_csv(csv).into()
        }
        Command::Dimension { family, n, table, param, method, l, points } => {
            dimension(*family, *n, *table, param.as_ref(), *method, *l, *points)?.into()
        }
        Command::Render { kind, p, depth, periods, l, px, palette } => {
            let Some(out) = &common.out else { bail!(UsageError("render needs --out".into())) };
            let img = match kind {
                RenderKind::Discontinuities => render::render_discontinuities(&p.param, *depth, *px, *palette)?,
                RenderKind::Islands => render::render_islands(&p.param, periods, *px, *palette)?,
                RenderKind::Cover => render::render_cover(&p.param, *l, *px, *palette)?,
            };
            let r = RenderReport {
                kind: format!("{kind:?}").to_lowercase(),
                param: p.param.clone(),
                width: img.width,
                height: img.height,
                file: out.display().to_string(),
            };
            let text = format!("{} {}x{} -> {}\n", r.kind, r.width, r.height, r.file);
            Outcome { report: Report::new(&r, text)?, artifact: Some(img.to_ppm()) }
        }
        Command::NatextCheck { samples } => {
            let r = cfrac::natural_extension_check(*samples, seed);
            let text = format!(
                "{} samples: escaped {}, preimage failures {}, surjectivity failures {}, fiber error {:e} ({})\n",
                r.samples,
                r.escaped,
                r.preimage_failures,
                r.surjectivity_failures,
                r.fiber_max_error,
                if r.pass { "pass" } else { "fail" }
            );
            Report::new(&r, text)?.into()
        }
        Command::Segments { p, depth } => {
            let segs: Vec<Segment> = pet::discontinuity_segments(&p.param, *depth);
            Report::new(&segs, lines(&segs, Segment::to_line))?.into()
        }
        Command::Cover { p, l } => {
            let pieces: Vec<CoverPiece> = renorm::cover(&p.param, *l)?;
            Report::new(&pieces, lines(&pieces, CoverPiece::to_line))?.into()
        }
    })
}

fn dimension(
    family: Option<Family>,
    n: Option<u64>,
    table: Option<u64>,
    param: Option<&Param>,
    method: DimMethod,
    l: usize,
    points: usize,
) -> anyhow::Result<Report> {
    if let Some(rows) = table {
        let mut csv = String::from("n,minus,plus\n");
        let mut values = Vec::new();
        for k in 1..=rows {
            let minus = fractal::selfsimilar_dimension(Family::Minus, k)?.value;
            let plus = fractal::selfsimilar_dimension(Family::Plus, k)?.value;
            let _ = writeln!(csv, "{k},{},{}", num(minus), num(plus));
            values.push(TableRow { n: k, minus, plus });
        }
        return Ok(Report::new(&values, fractal::dimension_table(rows)?)?.with_csv(csv));
    }
    if let Some(family) = family {
        let s = fractal::selfsimilar_dimension(family, n.unwrap_or(1))?;
        let text = format!("{:.6}\n", s.value);
        return Report::new(&s, text);
    }
    let Some(p) = param else {
        bail!(UsageError("dimension needs --family, --table or --param".into()))
    };
    let report: DimensionReport = match method {
        DimMethod::Ratio => fractal::dimension_estimate(p, l)?,
        DimMethod::Box => {
            let radii: Vec<f64> = (4..=12).map(|k| 2f64.powi(-k)).collect();
            let counts = fractal::box_counts_streamed(p, l.min(12), &radii)?;
            let mut r = fractal::slope_fit(&counts)?;
            r.depth = Some(l.min(12));
            r
        }
        DimMethod::Local => {
            let radii: Vec<f64> = (5..=11).map(|k| 2f64.powi(-k)).collect();
            fractal::local_scaling(p, points, &radii)?
        }
    };
    let text = format!("{}\n", num(report.value));
    Report::new(&report, text)
}

/// Bad flag combinations that clap cannot express.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn write_file(path: &std::path::Path, bytes: &[u8]) -> anyhow::Result<()> {
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}
