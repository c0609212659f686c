use num_complex::Complex64;
use rayon::prelude::*;

use super::{DensityMatrixSlice, Patch};
use crate::error::{Error, Result};
use crate::numerics::{Representation, WaveState};

/// Reduced density matrix of `α|ψ₁⟩|E₁⟩ + β|ψ₂⟩|E₂⟩` after tracing out the
/// environment, given only the overlap `⟨E₂|E₁⟩`:
///
/// `ρ(x,x') = |α|² ψ₁*(x)ψ₁(x') + |β|² ψ₂*(x)ψ₂(x')
///          + α*β ⟨E₁|E₂⟩ ψ₁*(x)ψ₂(x') + β*α ⟨E₂|E₁⟩ ψ₂*(x)ψ₁(x')`.
///
/// Overlap 0 leaves only the two diagonal blocks; overlap 1 is the pure
/// superposition.
pub fn dt_overlap_model(
    alpha: Complex64,
    beta: Complex64,
    overlap: Complex64,
    psi1: &WaveState,
    psi2: &WaveState,
    patch: &Patch,
) -> Result<DensityMatrixSlice> {
    let weight = alpha.norm_sqr() + beta.norm_sqr();
    if (weight - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "|alpha|^2 + |beta|^2 must be 1, got {weight}"
        )));
    }
    if !(overlap.norm() <= 1.0 + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "environment overlap must satisfy |<E2|E1>| <= 1, got {}",
            overlap.norm()
        )));
    }
    if psi1.grid() != psi2.grid() {
        return Err(Error::GridMismatch(
            "dt_overlap_model needs both states on one grid".into(),
        ));
    }
    psi1.require(Representation::Position, "dt_overlap_model")?;
    psi2.require(Representation::Position, "dt_overlap_model")?;
    let grid = psi1.grid();
    let (rows, cols) = patch.indices(grid)?;
    let (a, b) = (psi1.amplitudes(), psi2.amplitudes());
    let c12 = alpha.conj() * beta * overlap.conj();
    let c21 = beta.conj() * alpha * overlap;
    let (w1, w2) = (alpha.norm_sqr(), beta.norm_sqr());
    let values = rows
        .par_iter()
        .flat_map_iter(|&i| {
            cols.iter().map(move |&j| {
                a[i].conj() * a[j] * w1
                    + b[i].conj() * b[j] * w2
                    + c12 * a[i].conj() * b[j]
                    + c21 * b[i].conj() * a[j]
            })
        })
        .collect();
    Ok(DensityMatrixSlice {
        xs: rows.iter().map(|&i| grid.x(i)).collect(),
        xps: cols.iter().map(|&j| grid.x(j)).collect(),
        values,
        t: psi1.t(),
        averaged_over: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::densmat::rho_exact;
    use crate::numerics::Grid;
    use crate::states::{gaussian, GaussianSpec};

    fn packets(g: &Grid) -> (WaveState, WaveState) {
        (
            gaussian(&GaussianSpec::new(-6.0, 1.0, 0.5), g).unwrap(),
            gaussian(&GaussianSpec::new(6.0, 1.0, -0.5), g).unwrap(),
        )
    }

    #[test]
    fn no_overlap_kills_cross_blocks() {
        let g = Grid::new(256, -20.0, 20.0).unwrap();
        let (p1, p2) = packets(&g);
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        let rho = dt_overlap_model(
            h,
            h,
            Complex64::new(0.0, 0.0),
            &p1,
            &p2,
            &Patch::full(&g, 1),
        )
        .unwrap();
        let (a, b) = (p1.amplitudes(), p2.amplitudes());
        for i in 0..g.n() {
            for j in 0..g.n() {
                let direct = 0.5 * (a[i].conj() * a[j] + b[i].conj() * b[j]);
                assert!((rho.get(i, j) - direct).norm() < 1e-16);
            }
        }
    }

    #[test]
    fn full_overlap_is_the_pure_superposition() {
        let g = Grid::new(256, -20.0, 20.0).unwrap();
        let (p1, p2) = packets(&g);
        let alpha = Complex64::new(0.6, 0.0);
        let beta = Complex64::new(0.0, 0.8);
        let amps = p1
            .amplitudes()
            .iter()
            .zip(p2.amplitudes())
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        let pure = WaveState::new(g.clone(), amps, Representation::Position, 0.0).unwrap();
        let patch = Patch::full(&g, 1);
        let want = rho_exact(&pure, &patch).unwrap();
        let got =
            dt_overlap_model(alpha, beta, Complex64::new(1.0, 0.0), &p1, &p2, &patch).unwrap();
        for (a, b) in want.values.iter().zip(&got.values) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn interference_is_linear_in_overlap() {
        let g = Grid::new(128, -20.0, 20.0).unwrap();
        let (p1, p2) = packets(&g);
        let h = Complex64::new(0.5f64.sqrt(), 0.0);
        let patch = Patch::full(&g, 1);
        let at = |o: f64| dt_overlap_model(h, h, Complex64::new(o, 0.0), &p1, &p2, &patch).unwrap();
        let (r0, rh, r1) = (at(0.0), at(0.5), at(1.0));
        for k in 0..r0.values.len() {
            let full = r1.values[k] - r0.values[k];
            let half = rh.values[k] - r0.values[k];
            assert!((half * 2.0 - full).norm() < 1e-12);
        }
        assert!(r1.hermiticity_residual().unwrap() < 1e-15);
    }

    #[test]
    fn validates_inputs() {
        let g = Grid::new(128, -20.0, 20.0).unwrap();
        let (p1, p2) = packets(&g);
        let patch = Patch::full(&g, 1);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert!(dt_overlap_model(one, one, zero, &p1, &p2, &patch).is_err());
        assert!(dt_overlap_model(one, zero, Complex64::new(1.5, 0.0), &p1, &p2, &patch).is_err());
        let other = gaussian(
            &GaussianSpec::new(0.0, 1.0, 0.0),
            &Grid::new(256, -20.0, 20.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(
            dt_overlap_model(one, zero, zero, &p1, &other, &patch),
            Err(Error::GridMismatch(_))
        ));
    }
}
