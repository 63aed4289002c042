//! Two qubits under spatially and temporally correlated classical noise.

pub mod analytic;
pub mod entanglement;
pub mod error;
pub mod noise;
pub mod operators;
pub mod propagator;
pub mod quadrature;
pub mod runner;
pub mod scenario;
pub mod superop;
pub mod trace;

pub use error::{Error, Result};
