//! Exact and numerical tools for the square-rectangle piecewise isometry family T_ω:
//! dynamics, renormalization, continued-fraction expansions, substitutions,
//! Lyapunov exponents, fractal dimensions and rendering.

pub mod cfrac;
pub mod error;
pub mod fractal;
pub mod lyapunov;
pub mod matrix;
pub mod numeric;
pub mod pet;
pub mod quad;
pub mod render;
pub mod renorm;
pub mod symbolic;

pub use error::{Error, Result};
pub use matrix::Mat2;
pub use numeric::Number;
pub use pet::{Eps, Param, Point};
