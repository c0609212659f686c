//! End-to-end experiments: straight tracks from an isotropic emitter in a
//! cloud of ionisable atoms, and correlated measurements on a regularised
//! two-particle state with sharp relative position and total momentum.

pub mod epr;
pub mod mott;

pub use epr::{
    epr_build, epr_correlations, epr_it_consistency, it_residual, EprCorrelations, EprGrids,
    EprState, ItConsistency, MIN_PAIRS,
};
pub use mott::{
    mott_perception, mott_run, AtomSource, Emission, MottConfig, MottEvent, MottRun, MottStats,
    Perception, SphereBinning, MIN_RELIABLE_EVENTS,
};
