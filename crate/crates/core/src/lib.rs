//! Free-particle wavepacket dynamics seen three ways: exact propagation on a
//! grid, the asymptotic imaging map from initial momentum to late-time
//! position, and ensembles of classical trajectories. On top of these sit
//! analytic two-packet density matrices, detector time-averaging, and two
//! worked scenarios (cloud-chamber tracks and correlated pairs).
//!
//! Atomic units throughout: lengths in bohr, times in ħ/E_h, and by default
//! ħ = 1 and mass = 1.

// `!(x > 0.0)` is used deliberately so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod densmat;
pub mod ensemble;
pub mod error;
pub mod numerics;
pub mod propagators;
pub mod quadrature;
pub mod rng;
pub mod scenarios;
pub mod states;
pub mod stats;

pub use error::{Error, Result};
pub use numerics::{Grid, PhysicalParams, Representation, WaveState};
