use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::wave::{Representation, WaveState};
use crate::error::{Error, Result};

/// Continuum-normalised Fourier transform to momentum space,
/// `ψ̃(p) = (2πħ)^(-1/2) ∫ ψ(x) e^(-ipx/ħ) dx`, evaluated exactly on the
/// conjugate lattice by an FFT.
pub fn to_momentum(state: &WaveState) -> Result<WaveState> {
    state.require(Representation::Position, "to_momentum")?;
    let grid = state.grid().clone();
    let n = grid.n();
    let hbar = grid.hbar();

    let mut buffer = state.amplitudes().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buffer);

    let scale = grid.dx() / (2.0 * PI * hbar).sqrt();
    let half = n / 2;
    let amplitudes = (0..n)
        .map(|k| {
            // ascending index k holds momentum index m = k - n/2, stored at m mod n by the FFT
            let src = (k + half) % n;
            let phase = -grid.p(k) * grid.x_min() / hbar;
            buffer[src] * Complex64::from_polar(scale, phase)
        })
        .collect();
    WaveState::new(grid, amplitudes, Representation::Momentum, state.t())
}

/// Inverse of [`to_momentum`].
pub fn to_position(state: &WaveState) -> Result<WaveState> {
    state.require(Representation::Momentum, "to_position")?;
    let grid = state.grid().clone();
    let n = grid.n();
    let hbar = grid.hbar();
    let half = n / 2;

    let mut buffer = vec![Complex64::new(0.0, 0.0); n];
    for (k, amp) in state.amplitudes().iter().enumerate() {
        let phase = grid.p(k) * grid.x_min() / hbar;
        buffer[(k + half) % n] = amp * Complex64::from_polar(1.0, phase);
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buffer);

    let scale = grid.dp() / (2.0 * PI * hbar).sqrt();
    let amplitudes = buffer.into_iter().map(|a| a * scale).collect();
    WaveState::new(grid, amplitudes, Representation::Position, state.t())
}

/// `⟨a|b⟩` by lattice quadrature in the states' common representation.
pub fn inner(a: &WaveState, b: &WaveState) -> Result<Complex64> {
    if a.grid() != b.grid() {
        return Err(Error::GridMismatch(format!(
            "inner product of states on {:?} and {:?}",
            a.grid(),
            b.grid()
        )));
    }
    if a.representation() != b.representation() {
        return Err(Error::Contract(format!(
            "inner product across representations ({} vs {})",
            a.representation(),
            b.representation()
        )));
    }
    let sum: Complex64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    Ok(sum * a.measure())
}

/// Momentum wavefunction of a position-space state evaluated at arbitrary
/// momenta by direct quadrature of the transform integral.
///
/// Only lattice points carrying non-negligible amplitude are kept, so
/// evaluation costs O(support) per momentum. The lattice sum is periodic in
/// `p` with period `2πħ/dx`; the state is taken to be band-limited, so the
/// spectrum vanishes outside the lattice band `[-p_max, p_max)`. On lattice momenta the result
/// coincides with [`to_momentum`] up to a phase `e^(ip·origin/ħ)`: amplitudes
/// are referred to `origin`, i.e. `ψ̃_o(p) = (2πħ)^(-1/2) ∫ ψ(x) e^(-ip(x-o)/ħ) dx`.
#[derive(Debug, Clone)]
pub struct MomentumSpectrum {
    offsets: Vec<f64>,
    samples: Vec<Complex64>,
    scale: f64,
    hbar: f64,
    band: f64,
}

impl MomentumSpectrum {
    /// Relative amplitude below which source points are dropped.
    pub const SUPPORT_CUTOFF: f64 = 1e-15;

    pub fn new(state: &WaveState, origin: f64) -> Result<Self> {
        let position;
        let state = match state.representation() {
            Representation::Position => state,
            Representation::Momentum => {
                position = to_position(state)?;
                &position
            }
        };
        let grid = state.grid();
        let peak = state
            .amplitudes()
            .iter()
            .map(|a| a.norm())
            .fold(0.0, f64::max);
        let cutoff = peak * Self::SUPPORT_CUTOFF;
        let (offsets, samples) = state
            .amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > cutoff)
            .map(|(j, a)| (grid.x(j) - origin, *a))
            .unzip();
        Ok(MomentumSpectrum {
            offsets,
            samples,
            scale: grid.dx() / (2.0 * PI * grid.hbar()).sqrt(),
            hbar: grid.hbar(),
            band: grid.p_max(),
        })
    }

    /// Number of source points retained.
    pub fn support_len(&self) -> usize {
        self.offsets.len()
    }

    /// Extent `[min, max]` of the retained source offsets.
    pub fn support_extent(&self) -> (f64, f64) {
        let lo = self.offsets.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = self
            .offsets
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    pub fn at(&self, p: f64) -> Complex64 {
        if !(p >= -self.band && p < self.band) {
            return Complex64::new(0.0, 0.0);
        }
        let k = p / self.hbar;
        let sum: Complex64 = self
            .offsets
            .iter()
            .zip(&self.samples)
            .map(|(y, a)| a * Complex64::from_polar(1.0, -k * y))
            .sum();
        sum * self.scale
    }
}
