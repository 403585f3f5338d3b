use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sqrex_core::fractal::Family;
use sqrex_core::render::Palette;
use sqrex_core::{Param, Point};

#[derive(Parser, Debug)]
#[command(
    name = "sqrex",
    version,
    about = "Square-rectangle piecewise isometries: dynamics, renormalization, exponents and dimensions"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// RNG seed (decimal or 0x-prefixed hex)
    #[arg(long, global = true, default_value = "0x5EED", value_parser = parse_seed)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the result here instead of stdout; a `.manifest.json` sidecar is written next to it
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Cap on worker threads
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DimMethod {
    Ratio,
    Box,
    Local,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderKind {
    Discontinuities,
    Islands,
    Cover,
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed `{s}`: {e}"))
}

/// Parameter in Ω form `theta,eps` or interval form `x=value`.
#[derive(Args, Debug, Clone)]
pub struct ParamArg {
    #[arg(long, allow_hyphen_values = true)]
    pub param: Param,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// S-expansion of a parameter
    Expand {
        #[command(flatten)]
        p: ParamArg,
        /// maximum number of steps
        #[arg(long, default_value_t = 200)]
        depth: usize,
    },
    /// Orbit, coding and period of a point
    Orbit {
        #[command(flatten)]
        p: ParamArg,
        /// start point `x,y`
        #[arg(long)]
        point: Point,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Periodic islands up to a period
    Islands {
        #[command(flatten)]
        p: ParamArg,
        #[arg(long, default_value_t = 21)]
        max_period: u64,
    },
    /// Check the induction conjugacy on random points
    InductionCheck {
        #[command(flatten)]
        p: ParamArg,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        /// tolerance in float mode (exact mode demands zero error)
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Factor complexity of the limit word
    Sturmian {
        #[command(flatten)]
        p: ParamArg,
        /// largest factor length
        #[arg(long, default_value_t = 50)]
        n: usize,
        /// prefix length of the limit word
        #[arg(long, default_value_t = 20_000)]
        len: usize,
    },
    /// Tower counts and block measures
    Tower {
        #[command(flatten)]
        p: ParamArg,
        #[arg(long, default_value_t = 3)]
        l: usize,
        #[arg(long, default_value_t = 100_000)]
        prefix: usize,
    },
    /// Monte-Carlo Lyapunov exponent of the accelerated cocycle
    Lyapunov {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 10_000)]
        l: usize,
    },
    /// Series values of the cocycle integrals with certified tails
    Integrals {
        #[arg(long, default_value_t = 20_000)]
        terms: usize,
    },
    /// Hausdorff-dimension closed forms and estimates
    Dimension {
        #[arg(long)]
        family: Option<Family>,
        #[arg(long)]
        n: Option<u64>,
        /// print the closed-form table for n = 1..=ROWS
        #[arg(long)]
        table: Option<u64>,
        #[arg(long, allow_hyphen_values = true)]
        param: Option<Param>,
        #[arg(long, value_enum, default_value_t = DimMethod::Ratio)]
        method: DimMethod,
        /// depth ℓ
        #[arg(long, default_value_t = 50)]
        l: usize,
        /// sample points for the local-scaling method
        #[arg(long, default_value_t = 12)]
        points: usize,
    },
    /// Render a figure as binary PPM (requires --out)
    Render {
        #[arg(long, value_enum)]
        kind: RenderKind,
        #[command(flatten)]
        p: ParamArg,
        /// discontinuity depth
        #[arg(long, default_value_t = 10)]
        depth: usize,
        /// island periods to colour
        #[arg(long, value_delimiter = ',', default_value = "1,5,21")]
        periods: Vec<u64>,
        /// cover depth ℓ
        #[arg(long, default_value_t = 8)]
        l: usize,
        #[arg(long, default_value_t = 1000)]
        px: usize,
        #[arg(long, default_value = "color")]
        palette: Palette,
    },
    /// Natural-extension invariance check
    NatextCheck {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
    },
    /// Discontinuity segments to a depth
    Segments {
        #[command(flatten)]
        p: ParamArg,
        #[arg(long, default_value_t = 5)]
        depth: usize,
    },
    /// Depth-ℓ cover of the aperiodic set
    Cover {
        #[command(flatten)]
        p: ParamArg,
        #[arg(long, default_value_t = 2)]
        l: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand { .. } => "expand",
            Command::Orbit { .. } => "orbit",
            Command::Islands { .. } => "islands",
            Command::InductionCheck { .. } => "induction-check",
            Command::Sturmian { .. } => "sturmian",
            Command::Tower { .. } => "tower",
            Command::Lyapunov { .. } => "lyapunov",
            Command::Integrals { .. } => "integrals",
            Command::Dimension { .. } => "dimension",
            Command::Render { .. } => "render",
            Command::NatextCheck { .. } => "natext-check",
            Command::Segments { .. } => "segments",
            Command::Cover { .. } => "cover",
        }
    }
}
