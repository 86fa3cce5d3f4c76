//! Exact-arithmetic laboratory for the Volterra integral equation
//! `F(x) - ∫₀ˣ F(t) dt/t = Er(x)` attached to the error term of
//! `Σ_{n≤x} b(n)` with `b = Id * a`.

pub mod decomposition;
pub mod error;
pub mod exactnum;
pub mod lseries;
pub mod piecewise;
pub mod report;
pub mod sequences;
pub mod suites;
pub mod volterra;

pub use error::{Error, Result};
pub use exactnum::{ConstLinear, GaussianRational};
pub use piecewise::{PiecewiseLaurent, SideConvention, Weight};
pub use sequences::{ArithSequence, CharacterSpec};
