use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_hbar, Method, PropagationResult};
use crate::error::{Error, Result};
use crate::numerics::{Grid, MomentumSpectrum, PhysicalParams, Representation, WaveState};
use crate::quadrature::simpson;

/// Labelling threshold for the asymptotic regime, in units of the
/// dimensionless spreading time `ħt/(μσ²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ItRegime {
    pub threshold: f64,
}

impl Default for ItRegime {
    fn default() -> Self {
        ItRegime { threshold: 100.0 }
    }
}

impl ItRegime {
    pub fn spreading_ratio(t: f64, width: f64, params: &PhysicalParams) -> f64 {
        params.hbar * t / (params.mass * width * width)
    }

    pub fn contains(&self, t: f64, width: f64, params: &PhysicalParams) -> bool {
        Self::spreading_ratio(t, width, params) >= self.threshold
    }
}

/// Panels of the composite Simpson rule used for interval probabilities.
const INTERVAL_PANELS: usize = 2048;

/// The imaging map of a source localised near `origin`: every final position
/// `x` at time `t` is tied to the initial momentum `p = μ(x - origin)/t`, and
///
/// `ψ(x,t) ≈ e^(-iπ/4) (μ/t)^(1/2) e^(iμ(x-o)²/(2ħt)) ψ̃_o(p, 0)`,
///
/// where `ψ̃_o` is the t = 0 momentum wavefunction referred to `origin`.
/// The t = 0 momentum wavefunction is evaluated off-lattice by direct
/// quadrature, so the map can be sampled on any output grid.
#[derive(Debug, Clone)]
pub struct ImagingMap {
    spectrum: MomentumSpectrum,
    origin: f64,
    t: f64,
    params: PhysicalParams,
}

impl ImagingMap {
    pub fn new(source: &WaveState, origin: f64, t: f64, params: &PhysicalParams) -> Result<Self> {
        check_hbar(source.grid(), params)?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "imaging map needs t > 0, got {t}"
            )));
        }
        Ok(ImagingMap {
            spectrum: MomentumSpectrum::new(source, origin)?,
            origin,
            t,
            params: *params,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn origin(&self) -> f64 {
        self.origin
    }

    /// Classical momentum that reaches `x` at time `t` from the origin.
    pub fn momentum_for(&self, x: f64) -> f64 {
        self.params.mass * (x - self.origin) / self.t
    }

    /// Classical arrival position of momentum `p`.
    pub fn position_for(&self, p: f64) -> f64 {
        self.origin + p * self.t / self.params.mass
    }

    /// Jacobian `dp/dx = μ/t`.
    pub fn jacobian(&self) -> f64 {
        self.params.mass / self.t
    }

    pub fn momentum_amplitude(&self, p: f64) -> Complex64 {
        self.spectrum.at(p)
    }

    pub fn position_amplitude(&self, x: f64) -> Complex64 {
        let y = x - self.origin;
        let action = self.params.mass * y * y / (2.0 * self.params.hbar * self.t);
        Complex64::from_polar(self.jacobian().sqrt(), action - PI / 4.0)
            * self.spectrum.at(self.momentum_for(x))
    }

    pub fn position_density(&self, x: f64) -> f64 {
        self.position_amplitude(x).norm_sqr()
    }

    pub fn momentum_density(&self, p: f64) -> f64 {
        self.spectrum.at(p).norm_sqr()
    }

    /// `∫_a^b |ψ_IT(x,t)|² dx`.
    pub fn position_interval_probability(&self, a: f64, b: f64) -> f64 {
        simpson(|x| self.position_density(x), a, b, INTERVAL_PANELS)
    }

    /// `∫_pa^pb |ψ̃(p,0)|² dp`.
    pub fn momentum_interval_probability(&self, pa: f64, pb: f64) -> f64 {
        simpson(|p| self.momentum_density(p), pa, pb, INTERVAL_PANELS)
    }

    /// Samples the map on every point of `grid`.
    pub fn sample(&self, grid: &Grid) -> Result<WaveState> {
        let amplitudes = grid
            .xs()
            .par_iter()
            .map(|&x| self.position_amplitude(x))
            .collect();
        WaveState::new(grid.clone(), amplitudes, Representation::Position, self.t)
    }
}

/// Imaging-theorem estimate of ψ(·, t) on `grid` from the t = 0 momentum
/// wavefunction of a source localised near x = 0.
pub fn propagate_it(
    source_momentum: &WaveState,
    t: f64,
    grid: &Grid,
    params: &PhysicalParams,
) -> Result<PropagationResult> {
    propagate_it_about(source_momentum, 0.0, t, grid, params)
}

/// As [`propagate_it`], for a source localised near `origin`.
pub fn propagate_it_about(
    source_momentum: &WaveState,
    origin: f64,
    t: f64,
    grid: &Grid,
    params: &PhysicalParams,
) -> Result<PropagationResult> {
    source_momentum.require(Representation::Momentum, "propagate_it")?;
    check_hbar(grid, params)?;
    let map = ImagingMap::new(source_momentum, origin, t, params)?;
    Ok(PropagationResult {
        state: map.sample(grid)?,
        method: Method::It,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::to_momentum;
    use crate::propagators::{it_error, propagate_spectral};
    use crate::states::{density, gaussian, GaussianSpec};

    fn source(width: f64) -> WaveState {
        let g = Grid::new(256, -20.0, 20.0).unwrap();
        to_momentum(&gaussian(&GaussianSpec::new(0.0, width, 0.0), &g).unwrap()).unwrap()
    }

    #[test]
    fn gaussian_image_has_classical_width() {
        let p = PhysicalParams::default();
        let t = 500.0;
        let out = Grid::new(8192, -8000.0, 8000.0).unwrap();
        let r = propagate_it(&source(1.0), t, &out, &p).unwrap();
        // density (1/(√π η)) exp(-x²/η²), η = σ̃ t / μ
        let eta = t;
        for x0 in [0.0, 250.0, 1000.0, 1500.0] {
            let j = out.index_of(x0).unwrap();
            let x = out.x(j);
            let expected = (-(x * x) / (eta * eta)).exp() / (PI.sqrt() * eta);
            let got = r.state.amplitudes()[j].norm_sqr();
            assert!((got - expected).abs() < 1e-12 * expected.max(1e-3), "x={x}");
        }
    }

    #[test]
    fn interval_probabilities_are_transported() {
        let p = PhysicalParams::new(2.0, 1.0).unwrap();
        let map = ImagingMap::new(&source(0.8), 0.0, 300.0, &p).unwrap();
        for (a, b) in [(-100.0, 40.0), (10.0, 500.0), (-900.0, -3.0)] {
            let px = map.position_interval_probability(a, b);
            let pp = map.momentum_interval_probability(map.momentum_for(a), map.momentum_for(b));
            assert!((px - pp).abs() < 1e-12, "[{a}, {b}]: {px} vs {pp}");
        }
    }

    #[test]
    fn converges_to_spectral() {
        let p = PhysicalParams::default();
        let g = Grid::new(16384, -3000.0, 3000.0).unwrap();
        let s0 = gaussian(&GaussianSpec::new(0.0, 1.0, 0.0), &g).unwrap();
        let src = to_momentum(&s0).unwrap();
        let mut last = f64::INFINITY;
        for t in [10.0, 100.0] {
            let exact = propagate_spectral(&s0, t, &p).unwrap();
            let it = propagate_it(&src, t, &g, &p).unwrap();
            let m = it_error(&exact.state, &it.state).unwrap();
            assert!(m.density_l1 < last, "{t}: {m:?}");
            last = m.density_l1;
        }
        assert!(last < 1e-3, "{last}");
        let _ = density(&s0);
    }

    #[test]
    fn requires_momentum_input_and_positive_time() {
        let p = PhysicalParams::default();
        let g = Grid::new(256, -20.0, 20.0).unwrap();
        let pos = gaussian(&GaussianSpec::new(0.0, 1.0, 0.0), &g).unwrap();
        assert!(matches!(
            propagate_it(&pos, 1.0, &g, &p),
            Err(Error::Contract(_))
        ));
        assert!(propagate_it(&source(1.0), 0.0, &g, &p).is_err());
        assert!(propagate_it(&source(1.0), -2.0, &g, &p).is_err());
    }

    #[test]
    fn regime_label() {
        let p = PhysicalParams::default();
        let r = ItRegime::default();
        assert!(r.contains(100.0, 1.0, &p));
        assert!(!r.contains(99.0, 1.0, &p));
        assert!(!r.contains(100.0, 2.0, &p));
    }
}
