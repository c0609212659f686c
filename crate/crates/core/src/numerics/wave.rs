use num_complex::Complex64;

use super::grid::Grid;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Position,
    Momentum,
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Representation::Position => write!(f, "position"),
            Representation::Momentum => write!(f, "momentum"),
        }
    }
}

/// Complex amplitudes on a [`Grid`], in either representation, at time `t`.
///
/// Momentum amplitudes are stored in ascending-momentum order, matching
/// [`Grid::p`]. Amplitudes follow the continuum normalisation: the Born
/// density `|ψ|²` integrates to the norm with measure `dx` (position) or
/// `dp` (momentum).
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    representation: Representation,
    t: f64,
}

impl WaveState {
    pub fn new(
        grid: Grid,
        amplitudes: Vec<Complex64>,
        representation: Representation,
        t: f64,
    ) -> Result<Self> {
        if amplitudes.len() != grid.n() {
            return Err(Error::InvalidParameter(format!(
                "{} amplitudes for a grid of {} points",
                amplitudes.len(),
                grid.n()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !(a.re.is_finite() && a.im.is_finite()))
        {
            return Err(Error::InvalidParameter("non-finite amplitude".into()));
        }
        Ok(WaveState {
            grid,
            amplitudes,
            representation,
            t,
        })
    }

    /// Position-space state sampled from `f` at every lattice point.
    pub fn from_fn(grid: &Grid, t: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amplitudes = grid.xs().into_iter().map(f).collect();
        Self::new(grid.clone(), amplitudes, Representation::Position, t)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_time(mut self, t: f64) -> Self {
        self.t = t;
        self
    }

    /// Integration weight of one lattice cell in the current representation.
    pub fn measure(&self) -> f64 {
        match self.representation {
            Representation::Position => self.grid.dx(),
            Representation::Momentum => self.grid.dp(),
        }
    }

    /// Lattice coordinates (x or p) of the current representation.
    pub fn coordinates(&self) -> Vec<f64> {
        match self.representation {
            Representation::Position => self.grid.xs(),
            Representation::Momentum => self.grid.ps(),
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.measure()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if !(norm > 0.0) {
            return Err(Error::InvalidParameter(
                "cannot normalise a zero state".into(),
            ));
        }
        let scale = 1.0 / norm;
        self.amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok(self)
    }

    pub fn scaled(mut self, factor: Complex64) -> Self {
        self.amplitudes.iter_mut().for_each(|a| *a *= factor);
        self
    }

    /// Largest amplitude modulus at the two ends of the lattice.
    pub fn edge_amplitude(&self) -> f64 {
        let n = self.amplitudes.len();
        self.amplitudes[0].norm().max(self.amplitudes[n - 1].norm())
    }

    pub(crate) fn require(&self, repr: Representation, what: &str) -> Result<()> {
        if self.representation != repr {
            return Err(Error::Contract(format!(
                "{what} expects a {repr}-space state, got {}",
                self.representation
            )));
        }
        Ok(())
    }

    pub(crate) fn require_normalised(&self, what: &str, tol: f64) -> Result<()> {
        let norm_sq = self.norm_sq();
        if (norm_sq - 1.0).abs() > tol {
            return Err(Error::Contract(format!(
                "{what} expects a normalised state, got |psi|^2 = {norm_sq}"
            )));
        }
        Ok(())
    }
}
