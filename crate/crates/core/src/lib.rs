//! Spectral simulation of the damped cubic Szegő equation
//! `i u_t + i alpha (u|1) = Pi(|u|^2 u)` on the circle, the Hankel-spectrum
//! explosion criterion, and the exact finite-dimensional reduction on the
//! rank-one manifold `W`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod hankel;
pub mod hardy;
pub mod io;
pub mod solver;
pub mod symbols;
pub mod w;

pub use config::{ExperimentConfig, Preset};
pub use error::{Error, Result};
pub use hardy::{GridField, HardyState};
