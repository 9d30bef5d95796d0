//! Std-side tooling for the maximal-average lab: file formats, FFT grids,
//! parallel drivers, the verification suite and the `maxavg` command line.

pub mod cli;
pub mod config;
pub mod drivers;
pub mod error;
pub mod grid;
pub mod report;
pub mod suite;
pub mod surface_text;

pub use error::{LabError, Result};
