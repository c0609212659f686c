//! How fast the imaging map approaches exact propagation as t grows.

use super::{it_error, propagate_it, propagate_spectral, ItRegime};
use crate::error::Result;
use crate::numerics::{to_momentum, Grid, PhysicalParams};
use crate::states::{gaussian, GaussianSpec};

/// Grid policy for one time point: the domain spans `coverage` standard
/// deviations of the packet on each side, at spacing no larger than `max_dx`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudyGrid {
    pub max_dx: f64,
    pub coverage: f64,
}

impl Default for StudyGrid {
    fn default() -> Self {
        StudyGrid {
            max_dx: 0.35,
            coverage: 12.0,
        }
    }
}

/// Grid centred on `center` that holds a packet of position standard
/// deviation `std` under `policy`.
pub fn grid_for_spread(center: f64, std: f64, policy: &StudyGrid, hbar: f64) -> Result<Grid> {
    let half = policy.coverage * std;
    Grid::covering(center - half, center + half, policy.max_dx, hbar)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub t: f64,
    pub n: usize,
    pub spreading_ratio: f64,
    pub l2_rel: f64,
    pub linf: f64,
    pub density_l1: f64,
}

/// Imaging map against spectral propagation for a packet of width `width`
/// at rest at the origin, one fresh grid per time.
pub fn it_convergence(
    width: f64,
    times: &[f64],
    params: &PhysicalParams,
    policy: &StudyGrid,
) -> Result<Vec<ConvergenceRow>> {
    let spec = GaussianSpec::new(0.0, width, 0.0);
    times
        .iter()
        .map(|&t| {
            let (mu, hbar) = (params.mass, params.hbar);
            let var = width * width / 2.0 + (hbar * t / mu).powi(2) / (2.0 * width * width);
            let grid = grid_for_spread(0.0, var.sqrt(), policy, hbar)?;
            let s0 = gaussian(&spec, &grid)?;
            let exact = propagate_spectral(&s0, t, params)?;
            let it = propagate_it(&to_momentum(&s0)?, t, &grid, params)?;
            let m = it_error(&exact.state, &it.state)?;
            log::debug!("t = {t}: n = {}, {m:?}", grid.n());
            Ok(ConvergenceRow {
                t,
                n: grid.n(),
                spreading_ratio: ItRegime::spreading_ratio(t, width, params),
                l2_rel: m.l2_rel,
                linf: m.linf,
                density_l1: m.density_l1,
            })
        })
        .collect()
}
