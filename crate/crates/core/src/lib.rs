//! Numerics for maximal averages over codimension-2 surfaces.
//!
//! A surface is a graph `Γ(u) = (u, Φ(u))` over a box in `R^n` with polynomial
//! components, sitting in `R^{2n}`. The crate covers derivative jets and
//! curvature checks ([`surfaces`]), the stationary-phase phase function
//! ([`phase`]), frequency-space plates, caps and extremizer sets ([`freqgeo`]),
//! the averaging operator and its multiplier ([`operator`]), exact exponent
//! arithmetic ([`exponents`]) and scaling sweeps over extremizer families
//! ([`extremizers`]).
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod exponents;
pub mod extremizers;
pub mod freqgeo;
pub mod linalg;
pub mod operator;
pub mod phase;
pub mod poly;
pub mod quad;
pub mod rng;
pub mod stats;
pub mod surfaces;

pub use error::{Error, Result};
pub use surfaces::{Jet, RescaleMap, SurfaceKind, SurfaceSpec};
