//! Four routes from ψ(·, 0) to ψ(·, t) for a free particle, and the error
//! metrics used to compare them.
//!
//! * [`propagate_spectral`]: exact, multiplication by `exp(-ip²t/(2μħ))` in
//!   momentum space.
//! * [`propagate_gaussian_analytic`]: closed form for Gaussian packets.
//! * [`propagate_kernel`]: O(N²) quadrature against the exact free kernel;
//!   slow, independent of the transforms, used as an oracle.
//! * [`propagate_it`]: the asymptotic imaging map
//!   `ψ(x,t) ≈ e^(-iπ/4) (μ/t)^(1/2) e^(iμx²/(2ħt)) ψ̃(μx/t, 0)`.

mod analytic;
mod imaging;
mod kernel;
mod metrics;
mod spectral;
mod study;

pub use analytic::{analytic_amplitude, propagate_gaussian_analytic};
pub use imaging::{propagate_it, propagate_it_about, ImagingMap, ItRegime};
pub use kernel::propagate_kernel;
pub use metrics::{it_error, ErrorMetrics};
pub use spectral::{predicted_spread, propagate_spectral, ESCAPE_STDDEVS};
pub use study::{grid_for_spread, it_convergence, ConvergenceRow, StudyGrid};

use crate::error::{Error, Result};
use crate::numerics::{Grid, PhysicalParams, WaveState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Spectral,
    Analytic,
    Kernel,
    It,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Spectral => "spectral",
            Method::Analytic => "analytic",
            Method::Kernel => "kernel",
            Method::It => "it",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral" => Ok(Method::Spectral),
            "analytic" => Ok(Method::Analytic),
            "kernel" => Ok(Method::Kernel),
            "it" => Ok(Method::It),
            other => Err(Error::InvalidParameter(format!("unknown method '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub state: WaveState,
    pub method: Method,
    /// Elapsed propagation time.
    pub t: f64,
}

fn check_hbar(grid: &Grid, params: &PhysicalParams) -> Result<()> {
    if grid.hbar() != params.hbar {
        return Err(Error::Contract(format!(
            "grid built with hbar = {} but propagation uses hbar = {}",
            grid.hbar(),
            params.hbar
        )));
    }
    Ok(())
}
