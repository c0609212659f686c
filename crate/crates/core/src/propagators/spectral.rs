use num_complex::Complex64;

use super::{check_hbar, Method, PropagationResult};
use crate::error::{Error, Result};
use crate::numerics::{to_momentum, to_position, PhysicalParams, WaveState, EDGE_TOLERANCE};

/// Propagation is refused when the predicted centroid ± this many standard
/// deviations of the position density leaves the domain.
pub const ESCAPE_STDDEVS: f64 = 8.0;

/// Predicted `(mean, standard deviation)` of position after free evolution
/// for `t`, from the exact moment relations
/// `⟨x⟩(t) = ⟨x⟩ + ⟨p⟩t/μ` and
/// `Var x(t) = Var x + 2t·Cov(x,p)/μ + Var p·t²/μ²`.
pub fn predicted_spread(state: &WaveState, t: f64, params: &PhysicalParams) -> Result<(f64, f64)> {
    state.require(
        crate::numerics::Representation::Position,
        "predicted_spread",
    )?;
    let grid = state.grid();
    let momentum = to_momentum(state)?;
    let norm = state.norm_sq();
    let xs = grid.xs();
    let ps = grid.ps();

    let mean_x = xs
        .iter()
        .zip(state.amplitudes())
        .map(|(x, a)| x * a.norm_sqr())
        .sum::<f64>()
        * grid.dx()
        / norm;
    let var_x = xs
        .iter()
        .zip(state.amplitudes())
        .map(|(x, a)| (x - mean_x).powi(2) * a.norm_sqr())
        .sum::<f64>()
        * grid.dx()
        / norm;
    let mean_p = ps
        .iter()
        .zip(momentum.amplitudes())
        .map(|(p, a)| p * a.norm_sqr())
        .sum::<f64>()
        * grid.dp()
        / norm;
    let var_p = ps
        .iter()
        .zip(momentum.amplitudes())
        .map(|(p, a)| (p - mean_p).powi(2) * a.norm_sqr())
        .sum::<f64>()
        * grid.dp()
        / norm;

    // Cov(x,p) = Re⟨(x - x̄)ψ | (p - p̄)ψ⟩
    let shifted: Vec<Complex64> = ps
        .iter()
        .zip(momentum.amplitudes())
        .map(|(p, a)| a * (p - mean_p))
        .collect();
    let p_psi = to_position(&WaveState::new(
        grid.clone(),
        shifted,
        crate::numerics::Representation::Momentum,
        state.t(),
    )?)?;
    let cov = xs
        .iter()
        .zip(state.amplitudes())
        .zip(p_psi.amplitudes())
        .map(|((x, a), b)| ((a * (x - mean_x)).conj() * b).re)
        .sum::<f64>()
        * grid.dx()
        / norm;

    let mu = params.mass;
    let mean = mean_x + mean_p * t / mu;
    let var = (var_x + 2.0 * cov * t / mu + var_p * t * t / (mu * mu)).max(0.0);
    Ok((mean, var.sqrt()))
}

/// Exact free evolution by `t` (either sign) via the momentum representation.
pub fn propagate_spectral(
    state: &WaveState,
    t: f64,
    params: &PhysicalParams,
) -> Result<PropagationResult> {
    state.require(
        crate::numerics::Representation::Position,
        "propagate_spectral",
    )?;
    check_hbar(state.grid(), params)?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite time {t}")));
    }
    let grid = state.grid();
    let (mean, std) = predicted_spread(state, t, params)?;
    let lo = mean - ESCAPE_STDDEVS * std;
    let hi = mean + ESCAPE_STDDEVS * std;
    if lo < grid.x_min() || hi > grid.x_max() {
        let needed = (hi - lo).max(grid.length());
        return Err(Error::Regime(format!(
            "packet escapes the grid by t = {t}: predicted support [{lo:.4e}, {hi:.4e}] \
             exceeds [{}, {}]; a domain of length >= {needed:.4e} centred at {mean:.4e} is required",
            grid.x_min(),
            grid.x_max()
        )));
    }

    let momentum = to_momentum(state)?;
    let factor = -t / (2.0 * params.mass * params.hbar);
    let evolved: Vec<Complex64> = grid
        .ps()
        .iter()
        .zip(momentum.amplitudes())
        .map(|(p, a)| a * Complex64::from_polar(1.0, factor * p * p))
        .collect();
    let out = to_position(&WaveState::new(
        grid.clone(),
        evolved,
        crate::numerics::Representation::Momentum,
        state.t() + t,
    )?)?;
    let edge = out.edge_amplitude();
    if edge > EDGE_TOLERANCE {
        log::warn!("spectral propagation to t = {t}: boundary amplitude {edge:.3e} exceeds {EDGE_TOLERANCE:e}");
    }
    Ok(PropagationResult {
        state: out,
        method: Method::Spectral,
        t,
    })
}
