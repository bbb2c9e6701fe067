//! Truncated power series in `z` and in `(z, w̄)`.

mod basis;
mod holo;
mod hypersurface;
pub mod json;
mod sesqui;

pub use basis::{Basis, MultiIndex};
pub use holo::HoloSeries;
pub(crate) use holo::monomial_values;
pub use hypersurface::{restrict_flat, restrict_hypersurface, HypersurfaceSpec};
pub use sesqui::{CoeffDifference, FirstExceeding, NndCheck, SesquiSeries, Side};
