//! Initial states: Gaussian packets, superpositions, moments and Born densities.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{to_momentum, to_position, Grid, Representation, WaveState, EDGE_TOLERANCE};

/// One Gaussian packet `ψ(x) ∝ exp(-(x-X)²/(2σ²)) · exp(ip₀(x-X)/ħ)`.
///
/// The momentum phase is referred to the packet centre, so a packet at rest
/// is real and positive and the analytic propagator carries no extra
/// constant phase. `weight` is only used when packets are superposed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianSpec {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub weight: Complex64,
}

impl GaussianSpec {
    pub fn new(center: f64, width: f64, momentum: f64) -> Self {
        GaussianSpec {
            center,
            width,
            momentum,
            weight: Complex64::new(1.0, 0.0),
        }
    }

    pub fn with_weight(mut self, weight: Complex64) -> Self {
        self.weight = weight;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "packet width must be > 0, got {}",
                self.width
            )));
        }
        if !(self.center.is_finite() && self.momentum.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite packet parameters".into(),
            ));
        }
        Ok(())
    }

    /// Normalised amplitude at `x`.
    pub fn amplitude(&self, x: f64, hbar: f64) -> Complex64 {
        let y = x - self.center;
        let envelope = (PI * self.width * self.width).powf(-0.25)
            * (-y * y / (2.0 * self.width * self.width)).exp();
        Complex64::from_polar(envelope, self.momentum * y / hbar)
    }

    /// `⟨self|other⟩` in closed form for packets of equal width.
    pub fn overlap(&self, other: &GaussianSpec, hbar: f64) -> Option<Complex64> {
        if self.width != other.width {
            return None;
        }
        let s2 = self.width * self.width;
        let d = other.center - self.center;
        let dp = other.momentum - self.momentum;
        let re = -d * d / (4.0 * s2) - s2 * dp * dp / (4.0 * hbar * hbar);
        let im = -(self.momentum + other.momentum) * d / (2.0 * hbar);
        Some(Complex64::new(re, im).exp())
    }
}

/// Normalised packet on `grid` at t = 0. Fails if the packet amplitude at
/// either domain edge exceeds 1e-12, or its momentum profile is not resolved
/// by the lattice.
pub fn gaussian(spec: &GaussianSpec, grid: &Grid) -> Result<WaveState> {
    spec.validate()?;
    let hbar = grid.hbar();
    let edge = spec
        .amplitude(grid.x_min(), hbar)
        .norm()
        .max(spec.amplitude(grid.x_max(), hbar).norm());
    if edge > EDGE_TOLERANCE {
        return Err(Error::Regime(format!(
            "packet at {} with width {} leaks off the grid [{}, {}] (edge amplitude {edge:.3e})",
            spec.center,
            spec.width,
            grid.x_min(),
            grid.x_max()
        )));
    }
    // momentum profile exp(-(p-p0)²σ²/(2ħ²)) must vanish at the Nyquist edge
    let sigma_p = hbar / spec.width;
    let headroom = grid.p_max() - spec.momentum.abs();
    if headroom <= 0.0
        || (-(headroom * headroom) / (2.0 * sigma_p * sigma_p)).exp() > EDGE_TOLERANCE
    {
        return Err(Error::Regime(format!(
            "momentum content of packet (p0 = {}, width {sigma_p}) is not resolved by dx = {}",
            spec.momentum,
            grid.dx()
        )));
    }
    WaveState::from_fn(grid, 0.0, |x| spec.amplitude(x, hbar))?.normalized()
}

/// Normalised `Σ wᵢ ψᵢ`. All terms must share grid and representation.
pub fn superpose(terms: &[(Complex64, WaveState)]) -> Result<WaveState> {
    let (_, first) = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("superposition of zero states".into()))?;
    let mut sum = vec![Complex64::new(0.0, 0.0); first.grid().n()];
    for (weight, state) in terms {
        if state.grid() != first.grid() {
            return Err(Error::GridMismatch(
                "superposed states live on different grids".into(),
            ));
        }
        if state.representation() != first.representation() {
            return Err(Error::Contract(
                "superposed states in different representations".into(),
            ));
        }
        for (acc, a) in sum.iter_mut().zip(state.amplitudes()) {
            *acc += weight * a;
        }
    }
    WaveState::new(first.grid().clone(), sum, first.representation(), first.t())?.normalized()
}

/// Normalised superposition of weighted packets on `grid`.
pub fn gaussian_superposition(specs: &[GaussianSpec], grid: &Grid) -> Result<WaveState> {
    let terms = specs
        .iter()
        .map(|s| Ok((s.weight, gaussian(s, grid)?)))
        .collect::<Result<Vec<_>>>()?;
    superpose(&terms)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub mean_x: f64,
    pub var_x: f64,
    pub mean_p: f64,
    pub var_p: f64,
}

impl Observables {
    pub fn uncertainty_product(&self) -> f64 {
        self.var_x * self.var_p
    }
}

/// First and second moments of x and p, each by quadrature in its own
/// representation.
pub fn observables(state: &WaveState) -> Result<Observables> {
    state.require_normalised("observables", 1e-8)?;
    let (position, momentum) = match state.representation() {
        Representation::Position => (state.clone(), to_momentum(state)?),
        Representation::Momentum => (to_position(state)?, state.clone()),
    };
    let (mean_x, var_x) = moments(&position);
    let (mean_p, var_p) = moments(&momentum);
    Ok(Observables {
        mean_x,
        var_x,
        mean_p,
        var_p,
    })
}

fn moments(state: &WaveState) -> (f64, f64) {
    let coords = state.coordinates();
    let w = state.measure();
    let probs: Vec<f64> = state
        .amplitudes()
        .iter()
        .map(|a| a.norm_sqr() * w)
        .collect();
    let total: f64 = probs.iter().sum();
    let mean = coords.iter().zip(&probs).map(|(c, p)| c * p).sum::<f64>() / total;
    let var = coords
        .iter()
        .zip(&probs)
        .map(|(c, p)| (c - mean) * (c - mean) * p)
        .sum::<f64>()
        / total;
    (mean, var)
}

/// A real field on a grid in one representation, e.g. a Born density.
#[derive(Debug, Clone, PartialEq)]
pub struct RealField {
    pub grid: Grid,
    pub representation: Representation,
    pub t: f64,
    pub values: Vec<f64>,
}

impl RealField {
    pub fn coordinates(&self) -> Vec<f64> {
        match self.representation {
            Representation::Position => self.grid.xs(),
            Representation::Momentum => self.grid.ps(),
        }
    }

    pub fn measure(&self) -> f64 {
        match self.representation {
            Representation::Position => self.grid.dx(),
            Representation::Momentum => self.grid.dp(),
        }
    }

    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.measure()
    }

    /// Integral over `[a, b]`, treating each lattice value as constant over
    /// its cell `[c - h/2, c + h/2]`.
    pub fn interval_integral(&self, a: f64, b: f64) -> f64 {
        let h = self.measure();
        self.coordinates()
            .iter()
            .zip(&self.values)
            .map(|(c, v)| {
                let lo = (c - h / 2.0).max(a);
                let hi = (c + h / 2.0).min(b);
                if hi > lo {
                    v * (hi - lo)
                } else {
                    0.0
                }
            })
            .sum()
    }
}

/// Born density `|ψ|²` in the state's representation.
pub fn density(state: &WaveState) -> RealField {
    RealField {
        grid: state.grid().clone(),
        representation: state.representation(),
        t: state.t(),
        values: state.amplitudes().iter().map(|a| a.norm_sqr()).collect(),
    }
}
