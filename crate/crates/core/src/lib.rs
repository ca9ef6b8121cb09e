//! Simulation and spectral analysis of dynamic Erdős–Rényi graphs whose
//! edges switch on and off after exponential holding times.
//!
//! The crate is `no_std` (it needs `alloc`). IO, configuration and the
//! parallel campaign runner live in the `eigdyn` crate.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod edge;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod matrix;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod theory;

pub use edge::{EdgeParams, EdgePath, EdgePathRef};
pub use error::{Error, Result};
pub use graph::{CenteredMatrixView, GraphTrajectory, TimeGrid};
pub use matrix::DenseMatrix;
pub use rng::{CounterStream, StreamKey, UniformSource};
pub use spectral::{SpectralConfig, SpectralResult};
pub use stats::Estimate;
pub use theory::TheoryCurves;
