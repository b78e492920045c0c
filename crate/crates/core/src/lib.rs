//! Simulation and testing toolkit for detecting structured external-field
//! signals in Ising models.
//!
//! The crate is organised bottom-up:
//!
//! - [`graphs`]: graph families, coupling matrices and their spectral/degree statistics.
//! - [`model`]: the Ising measure, local fields, Glauber dynamics and exact sampling.
//! - [`oracle`]: exact small-n partition functions, moments, likelihood-ratio second
//!   moments, mean-field fixed points and correlation-inequality checks.
//! - [`signals`]: signal classes (mean-field blocks, lattice cubes) and alternatives.
//! - [`detect`]: the conditional scan, naive scan and magnetization tests.
//! - [`risk`]: Monte-Carlo and exact worst-case risk, boundary sweeps, regime map.
//! - [`cli`]: config parsing and the subcommands behind the `ising-scan` binary.

pub mod cli;
pub mod detect;
pub mod error;
pub mod graphs;
pub mod model;
pub mod oracle;
pub mod risk;
pub mod rng;
pub mod signals;

pub use error::{Error, Result};
