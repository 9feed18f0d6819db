//! Wigner rotation of photon polarization in Schwarzschild spacetime.
//!
//! Signature (+,−,−,−), G = c = 1. Tetrad legs are rows e_â^μ with the local
//! axis order (t̂, θ̂, φ̂, r̂).

pub mod error;
pub mod flat_sr;
pub mod geodesics;
pub mod geometry;
pub mod quantum;
pub mod tetrads;
pub mod wigner;

pub use error::{Error, Result};
pub use geometry::{FourVector, MetricConfig, SpacetimePoint, Variance};
pub use tetrads::{LocalVector, Tetrad, TetradField, TetradKind, TetradParams};
pub use wigner::{LocalLorentzGenerator, Sl2c, WignerResult};

/// Fixed-width scientific formatting with 17 significant digits; −0 prints as 0.
pub fn format_sig17(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}
