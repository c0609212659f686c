//! Two-packet density matrices: the pure-state outer product of any grid
//! state, the closed-form asymptotic fields of a separated Gaussian pair,
//! their average over a detector time window, and the static environment
//! overlap model in which interference is scaled by `⟨E₂|E₁⟩`.
//!
//! Matrix elements follow `ρ(x, x') = ψ*(x) ψ(x')`.

mod averaging;
mod environment;
mod fields;

pub use averaging::{
    measure_period, resolved_diagonal, suppression_report, time_average, time_average_diagonal,
    SuppressionRow, MIN_NODES_PER_PERIOD,
};
pub use environment::dt_overlap_model;
pub use fields::{rho_diag_it, rho_offdiag_it, DiagonalField, TwoPacketParams};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{Grid, Representation, WaveState};

/// Temporal and spatial resolution of a detector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectorResolution {
    pub tau: f64,
    pub dx: f64,
}

impl DetectorResolution {
    pub fn new(tau: f64, dx: f64) -> Result<Self> {
        if !(tau >= 0.0 && dx >= 0.0 && tau.is_finite() && dx.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "detector resolution must be finite and non-negative, got tau = {tau}, dx = {dx}"
            )));
        }
        Ok(DetectorResolution { tau, dx })
    }
}

/// Rectangular block of a grid, in coordinates, thinned by `stride`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Patch {
    pub x: (f64, f64),
    pub x_prime: (f64, f64),
    pub stride: usize,
}

impl Patch {
    pub fn square(lo: f64, hi: f64, stride: usize) -> Self {
        Patch {
            x: (lo, hi),
            x_prime: (lo, hi),
            stride,
        }
    }

    pub fn full(grid: &Grid, stride: usize) -> Self {
        Patch::square(grid.x_min(), grid.x(grid.n() - 1), stride)
    }

    fn indices(&self, grid: &Grid) -> Result<(Vec<usize>, Vec<usize>)> {
        if self.stride == 0 {
            return Err(Error::InvalidParameter("patch stride must be >= 1".into()));
        }
        let select = |(lo, hi): (f64, f64)| -> Result<Vec<usize>> {
            let last = grid.x(grid.n() - 1);
            let slack = 1e-9 * grid.dx();
            if !(lo <= hi) || lo < grid.x_min() - slack || hi > last + slack {
                return Err(Error::InvalidParameter(format!(
                    "patch [{lo}, {hi}] outside grid [{}, {last}]",
                    grid.x_min()
                )));
            }
            let idx: Vec<usize> = (0..grid.n())
                .filter(|&j| grid.x(j) >= lo - slack && grid.x(j) <= hi + slack)
                .step_by(self.stride)
                .collect();
            if idx.is_empty() {
                return Err(Error::InvalidParameter(format!(
                    "patch [{lo}, {hi}] holds no grid point"
                )));
            }
            Ok(idx)
        };
        Ok((select(self.x)?, select(self.x_prime)?))
    }
}

/// `ρ(x, x')` on a lattice patch, stored row-major: `values[i * xps.len() + j]`
/// is `ρ(xs[i], xps[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrixSlice {
    pub xs: Vec<f64>,
    pub xps: Vec<f64>,
    pub values: Vec<Complex64>,
    pub t: f64,
    /// Width of the time window the values were averaged over, if any.
    pub averaged_over: Option<f64>,
}

impl DensityMatrixSlice {
    pub(crate) fn from_fn(
        xs: &[f64],
        xps: &[f64],
        t: f64,
        averaged_over: Option<f64>,
        f: impl Fn(f64, f64) -> Complex64 + Sync,
    ) -> Self {
        let values = xs
            .par_iter()
            .flat_map_iter(|&x| xps.iter().map(|&xp| f(x, xp)).collect::<Vec<_>>())
            .collect();
        DensityMatrixSlice {
            xs: xs.to_vec(),
            xps: xps.to_vec(),
            values,
            t,
            averaged_over,
        }
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.xps.len() + j]
    }

    fn is_square(&self) -> bool {
        self.xs == self.xps
    }

    /// `max |ρ(x,x') - conj ρ(x',x)|`; `None` unless both axes coincide.
    pub fn hermiticity_residual(&self) -> Option<f64> {
        if !self.is_square() {
            return None;
        }
        let n = self.xs.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        Some(worst)
    }

    pub fn diagonal(&self) -> Option<Vec<Complex64>> {
        self.is_square()
            .then(|| (0..self.xs.len()).map(|i| self.get(i, i)).collect())
    }

    /// `Σ ρ(x,x) Δx` over the diagonal, for a uniform square patch.
    pub fn trace(&self) -> Option<f64> {
        let diag = self.diagonal()?;
        let h = if self.xs.len() > 1 {
            self.xs[1] - self.xs[0]
        } else {
            1.0
        };
        Some(diag.iter().map(|v| v.re).sum::<f64>() * h)
    }

    /// Largest `|ρ|` with `|x - x'| >= min_separation`.
    pub fn max_offdiagonal(&self, min_separation: f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, x) in self.xs.iter().enumerate() {
            for (j, xp) in self.xps.iter().enumerate() {
                if (x - xp).abs() >= min_separation {
                    worst = worst.max(self.get(i, j).norm());
                }
            }
        }
        worst
    }
}

/// Pure-state density matrix `ψ*(x) ψ(x')` of a normalised position-space
/// state, restricted to `patch`.
pub fn rho_exact(state: &WaveState, patch: &Patch) -> Result<DensityMatrixSlice> {
    state.require(Representation::Position, "rho_exact")?;
    state.require_normalised("rho_exact", 1e-6)?;
    let (rows, cols) = patch.indices(state.grid())?;
    Ok(outer(
        state.amplitudes(),
        state.grid(),
        &rows,
        &cols,
        state.t(),
    ))
}

fn outer(
    amps: &[Complex64],
    grid: &Grid,
    rows: &[usize],
    cols: &[usize],
    t: f64,
) -> DensityMatrixSlice {
    let values = rows
        .par_iter()
        .flat_map_iter(|&i| cols.iter().map(move |&j| amps[i].conj() * amps[j]))
        .collect();
    DensityMatrixSlice {
        xs: rows.iter().map(|&i| grid.x(i)).collect(),
        xps: cols.iter().map(|&j| grid.x(j)).collect(),
        values,
        t,
        averaged_over: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{density, gaussian_superposition, GaussianSpec};

    fn pair(grid: &Grid) -> WaveState {
        gaussian_superposition(
            &[
                GaussianSpec::new(-5.0, 1.0, 0.0),
                GaussianSpec::new(5.0, 1.0, 0.0),
            ],
            grid,
        )
        .unwrap()
    }

    #[test]
    fn diagonal_is_density() {
        let g = Grid::new(256, -20.0, 20.0).unwrap();
        let s = pair(&g);
        let rho = rho_exact(&s, &Patch::full(&g, 1)).unwrap();
        let d = density(&s);
        for (a, b) in rho.diagonal().unwrap().iter().zip(&d.values) {
            assert_eq!(a.re, *b);
            assert_eq!(a.im, 0.0);
        }
        assert!(rho.hermiticity_residual().unwrap() < 1e-14);
        assert!((rho.trace().unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn four_peaks_at_t0() {
        let g = Grid::new(256, -20.0, 20.0).unwrap();
        let rho = rho_exact(&pair(&g), &Patch::full(&g, 1)).unwrap();
        let at = |x: f64, xp: f64| {
            let i = rho.xs.iter().position(|v| (v - x).abs() < 1e-12).unwrap();
            let j = rho.xps.iter().position(|v| (v - xp).abs() < 1e-12).unwrap();
            rho.get(i, j).norm()
        };
        // each |ψ|² peak is 1/(2√π) at a packet centre
        let peak = 0.5 / std::f64::consts::PI.sqrt();
        for x in [-5.0, 5.0] {
            for xp in [-5.0, 5.0] {
                assert!((at(x, xp) - peak).abs() < 1e-10);
            }
        }
        assert!(at(0.0, 0.0) < 1e-5);
        assert!(at(-5.0, 0.0) < 1e-3);
    }

    #[test]
    fn patch_validation() {
        let g = Grid::new(64, -8.0, 8.0).unwrap();
        let s = pair(&Grid::new(256, -20.0, 20.0).unwrap());
        assert!(rho_exact(&s, &Patch::square(-30.0, 0.0, 1)).is_err());
        assert!(rho_exact(&s, &Patch::square(-3.0, 3.0, 0)).is_err());
        let sub = rho_exact(&s, &Patch::square(-3.0, 3.0, 2)).unwrap();
        assert!(sub.xs.len() < 256 && sub.xs.len() > 10);
        let wrong = crate::numerics::to_momentum(
            &gaussian_superposition(&[GaussianSpec::new(0.0, 1.0, 0.0)], &g).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            rho_exact(&wrong, &Patch::full(&g, 1)),
            Err(Error::Contract(_))
        ));
    }

    #[test]
    fn rectangular_patch_has_no_diagonal() {
        let g = Grid::new(128, -20.0, 20.0).unwrap();
        let rho = rho_exact(
            &pair(&g),
            &Patch {
                x: (-8.0, -2.0),
                x_prime: (2.0, 8.0),
                stride: 1,
            },
        )
        .unwrap();
        assert!(rho.diagonal().is_none());
        assert!(rho.hermiticity_residual().is_none());
        assert!(rho.max_offdiagonal(0.0) > 0.1);
    }

    #[test]
    fn detector_resolution_validation() {
        assert!(DetectorResolution::new(0.0, 0.0).is_ok());
        assert!(DetectorResolution::new(-1.0, 0.0).is_err());
        assert!(DetectorResolution::new(1.0, f64::NAN).is_err());
    }
}
