use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{check_hbar, Method, PropagationResult};
use crate::error::{Error, Result};
use crate::numerics::{PhysicalParams, Representation, WaveState};

/// Largest kernel phase step `μ dx² / (ħ t)` accepted between neighbouring
/// source points.
pub const MAX_KERNEL_STEP_PHASE: f64 = 0.5;

/// Relative amplitude below which source points are skipped.
const SOURCE_CUTOFF: f64 = 1e-17;

/// Brute-force evolution `ψ(x,t) = Σ_x' K(x,t; x',0) ψ(x') dx` with the exact
/// free kernel `K = (μ/(2πiħt))^(1/2) exp[iμ(x-x')²/(2ħt)]`.
///
/// This is an O(N·support) oracle that never touches the FFT. It is only
/// valid where the kernel chirp is resolved: the phase gradient
/// `μ|x-x'|/(ħt)` must stay below the lattice Nyquist wavenumber `π/dx` for
/// every output point and every source point carrying amplitude. Otherwise
/// the lattice sum picks up aliased copies of the packet and the call is
/// refused with the spacing that would be required.
pub fn propagate_kernel(
    state: &WaveState,
    t: f64,
    params: &PhysicalParams,
) -> Result<PropagationResult> {
    state.require(Representation::Position, "propagate_kernel")?;
    check_hbar(state.grid(), params)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "kernel propagation needs t > 0 (kernel is singular at t = 0), got {t}"
        )));
    }
    let grid = state.grid();
    let (mu, hbar) = (params.mass, params.hbar);
    let dx = grid.dx();

    let step_phase = mu * dx * dx / (hbar * t);
    if step_phase > MAX_KERNEL_STEP_PHASE {
        return Err(Error::Regime(format!(
            "kernel phase step mu*dx^2/(hbar*t) = {step_phase:.3e} exceeds {MAX_KERNEL_STEP_PHASE}; \
             need dx <= {:.4e}",
            (MAX_KERNEL_STEP_PHASE * hbar * t / mu).sqrt()
        )));
    }

    let peak = state
        .amplitudes()
        .iter()
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    let source: Vec<(f64, Complex64)> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > peak * SOURCE_CUTOFF)
        .map(|(j, a)| (grid.x(j), *a))
        .collect();
    if source.is_empty() {
        return Err(Error::InvalidParameter(
            "kernel propagation of a zero state".into(),
        ));
    }
    let src_lo = source.first().map(|s| s.0).unwrap();
    let src_hi = source.last().map(|s| s.0).unwrap();
    let out_lo = grid.x(0);
    let out_hi = grid.x(grid.n() - 1);
    let reach = (out_hi - src_lo).max(src_hi - out_lo);
    let gradient = mu * reach / (hbar * t);
    if gradient > PI / dx {
        return Err(Error::Regime(format!(
            "kernel oscillation unresolved: phase gradient {gradient:.4e} exceeds Nyquist {:.4e}; \
             need dx <= {:.4e} (n >= {}) or a smaller domain",
            PI / dx,
            PI * hbar * t / (mu * reach),
            ((grid.length() * mu * reach) / (PI * hbar * t)).ceil() as usize
        )));
    }

    let prefactor = Complex64::new(mu / (2.0 * PI * hbar * t), 0.0).sqrt()
        * Complex64::from_polar(1.0, -PI / 4.0)
        * dx;
    let chirp = mu / (2.0 * hbar * t);
    let amplitudes: Vec<Complex64> = grid
        .xs()
        .par_iter()
        .map(|&x| {
            // fixed summation order per output point
            let mut acc = Complex64::new(0.0, 0.0);
            for &(xp, a) in &source {
                let d = x - xp;
                acc += a * Complex64::from_polar(1.0, chirp * d * d);
            }
            acc * prefactor
        })
        .collect();
    Ok(PropagationResult {
        state: WaveState::new(
            grid.clone(),
            amplitudes,
            Representation::Position,
            state.t() + t,
        )?,
        method: Method::Kernel,
        t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;
    use crate::propagators::{it_error, propagate_gaussian_analytic, propagate_spectral};
    use crate::states::{gaussian, gaussian_superposition, GaussianSpec};

    #[test]
    fn matches_spectral_for_gaussian() {
        let g = Grid::new(2048, -100.0, 100.0).unwrap();
        let p = PhysicalParams::default();
        let s = gaussian(&GaussianSpec::new(0.0, 1.0, 0.0), &g).unwrap();
        let k = propagate_kernel(&s, 5.0, &p).unwrap();
        let f = propagate_spectral(&s, 5.0, &p).unwrap();
        let m = it_error(&f.state, &k.state).unwrap();
        assert!(m.l2_rel < 1e-6, "{m:?}");
        assert!((k.state.norm_sq() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn reproduces_analytic_pair() {
        let g = Grid::new(2048, -100.0, 100.0).unwrap();
        let p = PhysicalParams::default();
        let specs = [
            GaussianSpec::new(-5.0, 1.0, 0.0),
            GaussianSpec::new(5.0, 1.0, 0.0),
        ];
        let s = gaussian_superposition(&specs, &g).unwrap();
        let k = propagate_kernel(&s, 5.0, &p).unwrap();
        let a = propagate_gaussian_analytic(&specs, 5.0, &g, &p).unwrap();
        let m = it_error(&a.state, &k.state).unwrap();
        assert!(m.l2_rel < 1e-6, "{m:?}");
    }

    #[test]
    fn refuses_t_zero_and_unresolved_grids() {
        let g = Grid::new(256, -100.0, 100.0).unwrap();
        let p = PhysicalParams::default();
        let s = gaussian(&GaussianSpec::new(0.0, 3.0, 0.0), &g).unwrap();
        assert!(matches!(
            propagate_kernel(&s, 0.0, &p),
            Err(Error::InvalidParameter(_))
        ));
        assert!(propagate_kernel(&s, -1.0, &p).is_err());
        // dx = 0.78: chirp across the domain is far beyond Nyquist at t = 1
        let err = propagate_kernel(&s, 1.0, &p).unwrap_err();
        assert!(err.is_regime(), "{err}");
        assert!(err.to_string().contains("need dx"));
    }
}
