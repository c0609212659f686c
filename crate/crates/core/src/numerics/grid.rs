use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Particle mass and reduced Planck constant, atomic units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    pub mass: f64,
    pub hbar: f64,
}

impl Default for PhysicalParams {
    fn default() -> Self {
        PhysicalParams {
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

impl PhysicalParams {
    pub fn new(mass: f64, hbar: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mass must be > 0, got {mass}"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be > 0, got {hbar}"
            )));
        }
        Ok(PhysicalParams { mass, hbar })
    }
}

/// Uniform periodic lattice `x_j = x_min + j·dx`, `j = 0..n`, together with
/// its conjugate momentum lattice `p_k = (k - n/2)·dp`, `dp = 2πħ/(n·dx)`.
///
/// The point `x_max` itself is not on the lattice; it is the periodic image
/// of `x_min`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    n: usize,
    x_min: f64,
    x_max: f64,
    hbar: f64,
}

impl Grid {
    /// Grid with ħ = 1.
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        Self::with_hbar(n, x_min, x_max, 1.0)
    }

    pub fn with_hbar(n: usize, x_min: f64, x_max: f64, hbar: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "grid size must be a power of two >= 2, got {n}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite() && x_max > x_min) {
            return Err(Error::InvalidParameter(format!(
                "grid bounds must satisfy x_max > x_min, got [{x_min}, {x_max}]"
            )));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "hbar must be > 0, got {hbar}"
            )));
        }
        Ok(Grid {
            n,
            x_min,
            x_max,
            hbar,
        })
    }

    /// Smallest power-of-two grid on `[x_min, x_max]` whose spacing does not
    /// exceed `max_dx`.
    pub fn covering(x_min: f64, x_max: f64, max_dx: f64, hbar: f64) -> Result<Self> {
        if !(max_dx > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "max_dx must be > 0, got {max_dx}"
            )));
        }
        let needed = ((x_max - x_min) / max_dx).ceil().max(2.0) as usize;
        Self::with_hbar(needed.next_power_of_two(), x_min, x_max, hbar)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn dx(&self) -> f64 {
        self.length() / self.n as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI * self.hbar / self.length()
    }

    /// Largest representable momentum magnitude (Nyquist).
    pub fn p_max(&self) -> f64 {
        PI * self.hbar / self.dx()
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx()
    }

    /// Momentum of the `k`-th point in ascending order.
    pub fn p(&self, k: usize) -> f64 {
        (k as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.p(k)).collect()
    }

    /// Index of the lattice point nearest to `x`, if inside the domain.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        if x < self.x_min || x > self.x_max {
            return None;
        }
        let j = ((x - self.x_min) / self.dx()).round() as usize;
        Some(j.min(self.n - 1))
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x_min && x <= self.x_max
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spacing_and_conjugate_lattice() {
        let g = Grid::new(8, -4.0, 4.0).unwrap();
        assert_eq!(g.dx(), 1.0);
        assert_relative_eq!(g.dp(), 2.0 * PI / 8.0, max_relative = 1e-15);
        assert_relative_eq!(g.dp() * g.dx() * 8.0, 2.0 * PI, max_relative = 1e-15);

        let g = Grid::new(2, 0.0, 1.0).unwrap();
        assert_eq!(g.dx(), 0.5);

        let g = Grid::new(1024, -200.0, 200.0).unwrap();
        assert_relative_eq!(
            g.dp(),
            2.0 * PI / (1024.0 * 400.0 / 1024.0),
            max_relative = 1e-15
        );
        assert!((g.dp() - 0.015708).abs() < 1e-6);
    }

    #[test]
    fn dp_scales_with_hbar() {
        let g = Grid::with_hbar(64, -1.0, 1.0, 2.5).unwrap();
        assert_relative_eq!(g.dp() * g.dx() * 64.0, 2.0 * PI * 2.5, max_relative = 1e-15);
    }

    #[test]
    fn rejects_bad_sizes_and_bounds() {
        assert!(Grid::new(12, 0.0, 1.0).is_err());
        assert!(Grid::new(1, 0.0, 1.0).is_err());
        assert!(Grid::new(0, 0.0, 1.0).is_err());
        assert!(Grid::new(16, 1.0, 1.0).is_err());
        assert!(Grid::new(16, 2.0, 1.0).is_err());
        assert!(Grid::new(16, f64::NAN, 1.0).is_err());
        assert!(PhysicalParams::new(0.0, 1.0).is_err());
        assert!(PhysicalParams::new(1.0, -1.0).is_err());
    }

    #[test]
    fn momentum_lattice_is_centred() {
        let g = Grid::new(8, -4.0, 4.0).unwrap();
        assert_eq!(g.p(4), 0.0);
        assert_relative_eq!(g.p(0), -4.0 * g.dp());
        assert_relative_eq!(g.p(7), 3.0 * g.dp());
    }

    #[test]
    fn covering_picks_power_of_two() {
        let g = Grid::covering(-10.0, 10.0, 0.3, 1.0).unwrap();
        assert_eq!(g.n(), 128);
        assert!(g.dx() <= 0.3);
    }
}
