//! Uniform grids, wave states and the unitary position/momentum transforms.

mod grid;
mod transform;
mod wave;

pub use grid::{Grid, PhysicalParams};
pub use transform::{inner, to_momentum, to_position, MomentumSpectrum};
pub use wave::{Representation, WaveState};

/// Amplitude below which a grid edge counts as empty.
pub const EDGE_TOLERANCE: f64 = 1e-12;
