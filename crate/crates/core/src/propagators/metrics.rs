use crate::error::{Error, Result};
use crate::numerics::WaveState;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorMetrics {
    /// `‖exact - approx‖ / ‖exact‖`.
    pub l2_rel: f64,
    /// `max |exact - approx|` over lattice points.
    pub linf: f64,
    /// `∫ | |exact|² - |approx|² |`, blind to phases.
    pub density_l1: f64,
}

pub fn it_error(exact: &WaveState, approx: &WaveState) -> Result<ErrorMetrics> {
    if exact.grid() != approx.grid() {
        return Err(Error::GridMismatch(
            "error metrics need a common grid".into(),
        ));
    }
    if exact.representation() != approx.representation() {
        return Err(Error::Contract(
            "error metrics need a common representation".into(),
        ));
    }
    let w = exact.measure();
    let mut diff_sq = 0.0;
    let mut ref_sq = 0.0;
    let mut linf: f64 = 0.0;
    let mut l1 = 0.0;
    for (a, b) in exact.amplitudes().iter().zip(approx.amplitudes()) {
        let d = (a - b).norm();
        diff_sq += d * d;
        ref_sq += a.norm_sqr();
        linf = linf.max(d);
        l1 += (a.norm_sqr() - b.norm_sqr()).abs();
    }
    let l2_rel = if ref_sq > 0.0 {
        (diff_sq / ref_sq).sqrt()
    } else {
        diff_sq.sqrt()
    };
    Ok(ErrorMetrics {
        l2_rel,
        linf,
        density_l1: l1 * w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Grid;
    use crate::states::{gaussian, GaussianSpec};
    use num_complex::Complex64;

    #[test]
    fn identical_and_phase_shifted_states() {
        let g = Grid::new(256, -20.0, 20.0).unwrap();
        let s = gaussian(&GaussianSpec::new(0.0, 1.0, 0.3), &g).unwrap();
        let m = it_error(&s, &s).unwrap();
        assert_eq!((m.l2_rel, m.linf, m.density_l1), (0.0, 0.0, 0.0));

        let rotated = s.clone().scaled(Complex64::from_polar(1.0, 0.7));
        let m = it_error(&s, &rotated).unwrap();
        assert!(m.l2_rel > 0.5);
        assert!(m.density_l1 < 1e-15);
    }

    #[test]
    fn grid_mismatch() {
        let a = gaussian(
            &GaussianSpec::new(0.0, 1.0, 0.0),
            &Grid::new(256, -20.0, 20.0).unwrap(),
        )
        .unwrap();
        let b = gaussian(
            &GaussianSpec::new(0.0, 1.0, 0.0),
            &Grid::new(512, -20.0, 20.0).unwrap(),
        )
        .unwrap();
        assert!(matches!(it_error(&a, &b), Err(Error::GridMismatch(_))));
    }
}
