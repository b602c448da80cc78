//! Discretized incidence geometry for cinematic curve families.

pub mod curve;
pub mod error;
pub mod experiments;
pub mod fractal;
pub mod incidence;
pub mod interval;
pub mod io;
pub mod lenses;
pub mod rectangles;
pub mod rng;
pub mod space_curve;
pub mod validation;

pub use error::{Error, Result};
pub use interval::Interval;
