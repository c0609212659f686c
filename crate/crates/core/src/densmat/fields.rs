use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::DensityMatrixSlice;
use crate::error::{Error, Result};
use crate::numerics::PhysicalParams;
use crate::propagators::ItRegime;

/// Two equal-width Gaussian packets with equal weights `1/√2`, centred at
/// `X₁, X₂` and moving with mean momenta `p₀₁, p₀₂` (zero unless set).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPacketParams {
    pub centers: [f64; 2],
    pub momenta: [f64; 2],
    pub width: f64,
    pub params: PhysicalParams,
}

impl TwoPacketParams {
    pub fn new(x1: f64, x2: f64, width: f64, params: PhysicalParams) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "packet width must be > 0, got {width}"
            )));
        }
        if !(x1.is_finite() && x2.is_finite()) || x1 == x2 {
            return Err(Error::InvalidParameter(
                "packet centres must be distinct and finite".into(),
            ));
        }
        if (x2 - x1).abs() < 6.0 * width {
            log::warn!(
                "packets at {x1} and {x2} overlap at t = 0 (width {width}); the 1/2 normalisation is approximate"
            );
        }
        Ok(TwoPacketParams {
            centers: [x1, x2],
            momenta: [0.0, 0.0],
            width,
            params,
        })
    }

    pub fn with_momenta(mut self, p1: f64, p2: f64) -> Self {
        self.momenta = [p1, p2];
        self
    }

    /// Sets `p₀₁ = (Δp + s/Δp)/2`, `p₀₂ = -(Δp - s/Δp)/2`: the packets move
    /// apart with momentum difference `Δp` and `p₀₁² - p₀₂² = s`.
    pub fn with_momentum_splitting(self, delta_p: f64, splitting: f64) -> Self {
        self.with_momenta(
            0.5 * (delta_p + splitting / delta_p),
            -0.5 * (delta_p - splitting / delta_p),
        )
    }

    /// Momentum-space width `σ̃ = ħ/σ`.
    pub fn sigma_tilde(&self) -> f64 {
        self.params.hbar / self.width
    }

    /// Width `η = σ̃t/μ` of each asymptotic position peak.
    pub fn eta(&self, t: f64) -> f64 {
        self.sigma_tilde() * t / self.params.mass
    }

    /// Classical centre `Xᵢ + p₀ᵢt/μ` of packet `i` at time `t`.
    pub fn classical_center(&self, i: usize, t: f64) -> f64 {
        self.centers[i] + self.momenta[i] * t / self.params.mass
    }

    /// Momentum `pᵢ = μ(x - Xᵢ)/t` imaged onto `x` from packet `i`.
    pub fn momentum(&self, i: usize, x: f64, t: f64) -> f64 {
        self.params.mass * (x - self.centers[i]) / t
    }

    pub(crate) fn prefactor(&self, t: f64) -> f64 {
        self.params.mass / (2.0 * PI.sqrt() * self.sigma_tilde() * t)
    }

    /// Term `(i, j)` of the asymptotic off-diagonal element, including the
    /// prefactor: `e^(-((pᵢ-p₀ᵢ)² + (p'ⱼ-p₀ⱼ)²)/(2σ̃²)) e^(-i(pᵢ² - p'ⱼ²)t/(2μħ))`.
    pub(crate) fn term(&self, i: usize, j: usize, x: f64, xp: f64, t: f64) -> Complex64 {
        let st2 = self.sigma_tilde().powi(2);
        let p = self.momentum(i, x, t);
        let pp = self.momentum(j, xp, t);
        let a = p - self.momenta[i];
        let b = pp - self.momenta[j];
        let envelope = self.prefactor(t) * (-(a * a + b * b) / (2.0 * st2)).exp();
        let phase = -(p * p - pp * pp) * t / (2.0 * self.params.mass * self.params.hbar);
        Complex64::from_polar(envelope, phase)
    }

    /// Angular frequency `|pᵢ² - p'ⱼ²|/(2μħ)` of term `(i, j)` at fixed `(x, x')`.
    pub fn term_frequency(&self, i: usize, j: usize, x: f64, xp: f64, t: f64) -> f64 {
        let p = self.momentum(i, x, t);
        let pp = self.momentum(j, xp, t);
        (p * p - pp * pp).abs() / (2.0 * self.params.mass * self.params.hbar)
    }

    pub(crate) fn offdiag_at(&self, x: f64, xp: f64, t: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..2 {
            for j in 0..2 {
                acc += self.term(i, j, x, xp, t);
            }
        }
        acc
    }

    /// Classical two-peak diagonal
    /// `(1/(2√π η)) Σᵢ e^(-(x - cᵢ(t))²/η²)`.
    pub fn two_peak_form(&self, x: f64, t: f64) -> f64 {
        let eta = self.eta(t);
        (0..2)
            .map(|i| {
                let d = x - self.classical_center(i, t);
                (-d * d / (eta * eta)).exp()
            })
            .sum::<f64>()
            / (2.0 * PI.sqrt() * eta)
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "asymptotic fields need t > 0, got {t}"
            )));
        }
        let regime = ItRegime::default();
        if !regime.contains(t, self.width, &self.params) {
            log::warn!(
                "t = {t} is below the asymptotic regime (ħt/(μσ²) = {:.3e} < {})",
                ItRegime::spreading_ratio(t, self.width, &self.params),
                regime.threshold
            );
        }
        Ok(())
    }

    pub(crate) fn in_regime(&self, t: f64) -> bool {
        ItRegime::default().contains(t, self.width, &self.params)
    }
}

/// Asymptotic diagonal `ρ(x, x, t)` on a lattice, with a flag recording
/// whether `t` lies in the asymptotic regime.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalField {
    pub xs: Vec<f64>,
    pub values: Vec<f64>,
    pub t: f64,
    pub in_it_regime: bool,
}

impl DiagonalField {
    /// `Σ |values - g(x)| Δx` on a uniform lattice.
    pub fn l1_distance(&self, g: impl Fn(f64) -> f64) -> f64 {
        let h = if self.xs.len() > 1 {
            self.xs[1] - self.xs[0]
        } else {
            1.0
        };
        self.xs
            .iter()
            .zip(&self.values)
            .map(|(x, v)| (v - g(*x)).abs())
            .sum::<f64>()
            * h
    }
}

/// Asymptotic diagonal of the two-packet density matrix,
///
/// `(μ/(2√π σ̃ t)) [Σᵢ e^(-(pᵢ-p₀ᵢ)²/σ̃²)
///   + 2 cos((p₁² - p₂²)t/(2μħ)) e^(-((p₁-p₀₁)² + (p₂-p₀₂)²)/(2σ̃²))]`
///
/// with `pᵢ = μ(x - Xᵢ)/t`. Outside the asymptotic regime the field is still
/// returned, with a logged warning and `in_it_regime = false`.
pub fn rho_diag_it(pair: &TwoPacketParams, t: f64, xs: &[f64]) -> Result<DiagonalField> {
    pair.check_time(t)?;
    let st2 = pair.sigma_tilde().powi(2);
    let two_mu_hbar = 2.0 * pair.params.mass * pair.params.hbar;
    let values = xs
        .par_iter()
        .map(|&x| {
            let p1 = pair.momentum(0, x, t);
            let p2 = pair.momentum(1, x, t);
            let a1 = p1 - pair.momenta[0];
            let a2 = p2 - pair.momenta[1];
            let direct = (-a1 * a1 / st2).exp() + (-a2 * a2 / st2).exp();
            let fringe = 2.0
                * ((p1 * p1 - p2 * p2) * t / two_mu_hbar).cos()
                * (-(a1 * a1 + a2 * a2) / (2.0 * st2)).exp();
            pair.prefactor(t) * (direct + fringe)
        })
        .collect();
    Ok(DiagonalField {
        xs: xs.to_vec(),
        values,
        t,
        in_it_regime: pair.in_regime(t),
    })
}

/// Asymptotic off-diagonal element
/// `(μ/(2√π σ̃ t)) Σᵢⱼ e^(-((pᵢ-p₀ᵢ)² + (p'ⱼ-p₀ⱼ)²)/(2σ̃²)) e^(-i(pᵢ² - p'ⱼ²)t/(2μħ))`
/// on the product lattice `xs × xps`.
pub fn rho_offdiag_it(
    pair: &TwoPacketParams,
    t: f64,
    xs: &[f64],
    xps: &[f64],
) -> Result<DensityMatrixSlice> {
    pair.check_time(t)?;
    Ok(DensityMatrixSlice::from_fn(xs, xps, t, None, |x, xp| {
        pair.offdiag_at(x, xp, t)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::{rho_exact, Patch};
    use crate::numerics::{to_momentum, Grid, WaveState};
    use crate::propagators::{propagate_it_about, propagate_spectral};
    use crate::states::{density, gaussian, gaussian_superposition, GaussianSpec};

    fn resting_pair() -> TwoPacketParams {
        TwoPacketParams::new(-5.0, 5.0, 1.0, PhysicalParams::default()).unwrap()
    }

    fn lattice(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect()
    }

    #[test]
    fn midpoint_has_full_fringe() {
        let pair = resting_pair();
        let t = 1e3;
        let d = rho_diag_it(&pair, t, &[0.0]).unwrap();
        let p = pair.momentum(0, 0.0, t);
        let direct = 2.0 * pair.prefactor(t) * (-p * p).exp();
        // p₁ = -p₂ at the midpoint: cos = 1, fringe = direct part
        assert!((d.values[0] - 2.0 * direct).abs() < 1e-15);
        assert!(d.in_it_regime);
    }

    #[test]
    fn fringe_bounded_by_envelopes() {
        let pair = resting_pair().with_momenta(0.3, -0.2);
        let t = 500.0;
        let st2 = pair.sigma_tilde().powi(2);
        for x in lattice(-4e3, 4e3, 301) {
            let d = rho_diag_it(&pair, t, &[x]).unwrap().values[0];
            let a1 = pair.momentum(0, x, t) - pair.momenta[0];
            let a2 = pair.momentum(1, x, t) - pair.momenta[1];
            let e1 = (-a1 * a1 / st2).exp();
            let e2 = (-a2 * a2 / st2).exp();
            let fringe = d / pair.prefactor(t) - e1 - e2;
            assert!(fringe.abs() <= 2.0 * (e1 * e2).sqrt() + 1e-15);
            assert!(d >= -1e-18);
        }
    }

    #[test]
    fn offdiag_reduces_to_diag() {
        let pair = resting_pair().with_momenta(1.0, -0.5);
        let t = 2e3;
        let xs = lattice(-6e3, 6e3, 97);
        let diag = rho_diag_it(&pair, t, &xs).unwrap();
        let full = rho_offdiag_it(&pair, t, &xs, &xs).unwrap();
        for (i, v) in diag.values.iter().enumerate() {
            let z = full.get(i, i);
            assert!((z.re - v).abs() < 1e-12 * pair.prefactor(t) * 4.0);
            assert!(z.im.abs() < 1e-12 * pair.prefactor(t));
        }
        assert!(full.hermiticity_residual().unwrap() < 1e-15);
    }

    #[test]
    fn four_peaks_in_modulus() {
        // well before the packets spread into each other
        let pair = resting_pair();
        let t = 1.0;
        let xs = lattice(-10.0, 10.0, 201);
        let rho = rho_offdiag_it(&pair, t, &xs, &xs).unwrap();
        let at = |x: f64, xp: f64| {
            let i = ((x + 10.0) * 10.0).round() as usize;
            let j = ((xp + 10.0) * 10.0).round() as usize;
            rho.get(i, j).norm()
        };
        let peak = at(-5.0, -5.0);
        for (x, xp) in [(-5.0, 5.0), (5.0, -5.0), (5.0, 5.0)] {
            assert!((at(x, xp) - peak).abs() < 1e-12);
        }
        for (x, xp) in [(0.0, 0.0), (-5.0, 0.0), (2.0, -7.0)] {
            assert!(at(x, xp) < 0.05 * peak);
        }
    }

    #[test]
    fn below_regime_is_annotated_not_refused() {
        let d = rho_diag_it(&resting_pair(), 5.0, &[0.0, 1.0]).unwrap();
        assert!(!d.in_it_regime);
        assert!(rho_diag_it(&resting_pair(), 0.0, &[0.0]).is_err());
    }

    /// Per-packet imaging of the two components, superposed with weights
    /// 1/√2, reproduces the closed-form fields.
    #[test]
    fn agrees_with_imaged_packets() {
        let p = PhysicalParams::default();
        let pair = resting_pair().with_momenta(0.4, -0.3);
        let t = 800.0;
        let source = Grid::new(256, -20.0, 20.0).unwrap();
        let out = Grid::new(2048, -4e3, 4e3).unwrap();
        let mut sum = vec![Complex64::new(0.0, 0.0); out.n()];
        for i in 0..2 {
            let spec = GaussianSpec::new(pair.centers[i], 1.0, pair.momenta[i]);
            let m = to_momentum(&gaussian(&spec, &source).unwrap()).unwrap();
            let img = propagate_it_about(&m, pair.centers[i], t, &out, &p)
                .unwrap()
                .state;
            for (s, a) in sum.iter_mut().zip(img.amplitudes()) {
                *s += a / 2f64.sqrt();
            }
        }
        let state = WaveState::new(
            out.clone(),
            sum,
            crate::numerics::Representation::Position,
            t,
        )
        .unwrap();
        let diag = rho_diag_it(&pair, t, &out.xs()).unwrap();
        for (a, b) in density(&state).values.iter().zip(&diag.values) {
            assert!((a - b).abs() < 1e-10);
        }
        let patch = Patch::square(-2e3, 2e3, 64);
        let exact = rho_exact(&state, &patch).unwrap();
        let it = rho_offdiag_it(&pair, t, &exact.xs, &exact.xps).unwrap();
        for (a, b) in exact.values.iter().zip(&it.values) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn close_to_exact_propagation_late() {
        let p = PhysicalParams::default();
        let pair = resting_pair();
        let t = 1e3;
        let g = Grid::new(65536, -1.3e4, 1.3e4).unwrap();
        let s = gaussian_superposition(
            &[
                GaussianSpec::new(-5.0, 1.0, 0.0),
                GaussianSpec::new(5.0, 1.0, 0.0),
            ],
            &g,
        )
        .unwrap();
        let exact = density(&propagate_spectral(&s, t, &p).unwrap().state);
        let it = rho_diag_it(&pair, t, &g.xs()).unwrap();
        let l1: f64 = exact
            .values
            .iter()
            .zip(&it.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * g.dx();
        assert!(l1 < 1e-2, "l1 = {l1}");
    }

    #[test]
    fn two_peak_form_is_normalised() {
        let pair = resting_pair().with_momenta(3.0, -3.0);
        let t = 100.0;
        let xs = lattice(-2000.0, 2000.0, 40001);
        let h = xs[1] - xs[0];
        let total: f64 = xs.iter().map(|x| pair.two_peak_form(*x, t)).sum::<f64>() * h;
        assert!((total - 1.0).abs() < 1e-10);
    }
}
