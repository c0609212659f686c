use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_hbar, Method, PropagationResult};
use crate::error::{Error, Result};
use crate::numerics::{Grid, PhysicalParams, Representation, WaveState};
use crate::states::GaussianSpec;

/// Freely evolved amplitude of one normalised packet at `(x, t)`:
///
/// `(σ²/π)^(1/4) (σ² + iħt/μ)^(-1/2)
///   · exp[-(x - X - p₀t/μ)² / (2(σ² + iħt/μ)) + ip₀(x - X)/ħ - ip₀²t/(2μħ)]`
///
/// with the principal square root, which is continuous in t from t = 0.
pub fn analytic_amplitude(
    spec: &GaussianSpec,
    x: f64,
    t: f64,
    params: &PhysicalParams,
) -> Complex64 {
    let (mu, hbar) = (params.mass, params.hbar);
    let s2 = spec.width * spec.width;
    let z = Complex64::new(s2, hbar * t / mu);
    let y = x - spec.center - spec.momentum * t / mu;
    let prefactor = (s2 / PI).powf(0.25) / z.sqrt();
    let gauss = -(y * y) / (2.0 * z);
    let phase = spec.momentum * (x - spec.center) / hbar
        - spec.momentum * spec.momentum * t / (2.0 * mu * hbar);
    prefactor * (gauss + Complex64::new(0.0, phase)).exp()
}

/// Closed-form evolution of a weighted superposition of equal-width packets,
/// sampled on `grid` and normalised with the analytic overlap matrix.
pub fn propagate_gaussian_analytic(
    specs: &[GaussianSpec],
    t: f64,
    grid: &Grid,
    params: &PhysicalParams,
) -> Result<PropagationResult> {
    check_hbar(grid, params)?;
    let first = specs
        .first()
        .ok_or_else(|| Error::InvalidParameter("no packets given".into()))?;
    for s in specs {
        s.validate()?;
        if s.width != first.width {
            return Err(Error::InvalidParameter(format!(
                "analytic propagation needs a common width, got {} and {}",
                first.width, s.width
            )));
        }
    }
    let mut norm_sq = Complex64::new(0.0, 0.0);
    for a in specs {
        for b in specs {
            let overlap = a
                .overlap(b, params.hbar)
                .expect("common width checked above");
            norm_sq += a.weight.conj() * b.weight * overlap;
        }
    }
    if !(norm_sq.re > 0.0) {
        return Err(Error::InvalidParameter(
            "packet weights cancel to a zero state".into(),
        ));
    }
    let scale = 1.0 / norm_sq.re.sqrt();
    let amplitudes = grid
        .xs()
        .into_iter()
        .map(|x| {
            specs
                .iter()
                .map(|s| s.weight * analytic_amplitude(s, x, t, params))
                .sum::<Complex64>()
                * scale
        })
        .collect();
    Ok(PropagationResult {
        state: WaveState::new(grid.clone(), amplitudes, Representation::Position, t)?,
        method: Method::Analytic,
        t,
    })
}
