//! Classical counterpart of the imaging map: sample initial momenta from
//! `|ψ̃(p,0)|²`, send every particle out from x = 0 on a straight line and
//! compare where they land with the quantum position density.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{PhysicalParams, Representation};
use crate::rng::{streams, CounterRng};
use crate::states::RealField;
use crate::stats::{chi_square, chi_square_pvalue, ks_statistic};

/// Piecewise-linear cumulative distribution of a lattice density, each value
/// spread uniformly over its cell `[c - h/2, c + h/2]`.
#[derive(Debug, Clone)]
pub struct CellCdf {
    first_edge: f64,
    width: f64,
    cumulative: Vec<f64>,
}

impl CellCdf {
    pub fn new(field: &RealField) -> Result<Self> {
        if let Some(v) = field.values.iter().find(|v| !(**v >= 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "density must be non-negative and finite, found {v}"
            )));
        }
        let total: f64 = field.values.iter().sum();
        if !(total > 0.0 && total.is_finite()) {
            return Err(Error::InvalidParameter(
                "density has zero total mass".into(),
            ));
        }
        let mut cumulative = Vec::with_capacity(field.values.len() + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for v in &field.values {
            acc += v;
            cumulative.push(acc / total);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        let coords = field.coordinates();
        let width = field.measure();
        Ok(CellCdf {
            first_edge: coords[0] - width / 2.0,
            width,
            cumulative,
        })
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let s = (x - self.first_edge) / self.width;
        if s <= 0.0 {
            return 0.0;
        }
        let cells = self.cumulative.len() - 1;
        if s >= cells as f64 {
            return 1.0;
        }
        let k = s.floor() as usize;
        let frac = s - k as f64;
        self.cumulative[k] + frac * (self.cumulative[k + 1] - self.cumulative[k])
    }

    pub fn inverse(&self, u: f64) -> f64 {
        // first edge index whose cumulative exceeds u; the cell before it has mass
        let idx = self.cumulative.partition_point(|&c| c <= u);
        let k = idx.clamp(1, self.cumulative.len() - 1) - 1;
        let (lo, hi) = (self.cumulative[k], self.cumulative[k + 1]);
        let frac = if hi > lo { (u - lo) / (hi - lo) } else { 0.0 };
        self.first_edge + (k as f64 + frac) * self.width
    }
}

/// `n` i.i.d. momenta drawn from a momentum-space density by inverse CDF.
/// Draw `i` uses counter `i` of the momentum-sampling stream of `seed`.
pub fn sample_momenta(momentum_density: &RealField, n: usize, seed: u64) -> Result<Vec<f64>> {
    if momentum_density.representation != Representation::Momentum {
        return Err(Error::Contract(
            "sample_momenta expects a momentum-space density".into(),
        ));
    }
    sample_field(
        momentum_density,
        n,
        &CounterRng::new(seed, streams::MOMENTUM_SAMPLING),
        0,
        1,
    )
}

/// `n` inverse-CDF draws from any lattice density; draw `i` consumes counter
/// `i * lanes + lane` of `rng`, so several variables can share one stream.
pub fn sample_field(
    field: &RealField,
    n: usize,
    rng: &CounterRng,
    lane: u64,
    lanes: u64,
) -> Result<Vec<f64>> {
    let cdf = CellCdf::new(field)?;
    Ok((0..n as u64)
        .into_par_iter()
        .map(|i| cdf.inverse(rng.uniform_at(i * lanes + lane)))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub seed: u64,
    pub momenta: Vec<f64>,
    pub positions: Vec<f64>,
    pub t: f64,
    pub params: PhysicalParams,
}

impl TrajectoryEnsemble {
    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }
}

/// Free classical flight from x = 0: `x_t = p t / μ` for every particle.
pub fn transport(
    momenta: Vec<f64>,
    t: f64,
    params: &PhysicalParams,
    seed: u64,
) -> Result<TrajectoryEnsemble> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "transport needs t >= 0, got {t}"
        )));
    }
    let positions = momenta.iter().map(|p| p * t / params.mass).collect();
    Ok(TrajectoryEnsemble {
        seed,
        momenta,
        positions,
        t,
        params: *params,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityComparison {
    /// KS distance between the landing-position ECDF and the quantum CDF.
    pub ks: f64,
    /// Upper-tail chi-square probability of the landing histogram against
    /// the quantum cell masses (bins merged to ≥ 5 expected counts).
    pub chi2_pvalue_proxy: f64,
    /// Landing positions per cell, normalised as a density.
    pub hist: RealField,
}

pub fn compare_density(
    ensemble: &TrajectoryEnsemble,
    quantum_density: &RealField,
) -> Result<DensityComparison> {
    if quantum_density.representation != Representation::Position {
        return Err(Error::Contract(
            "compare_density expects a position-space density".into(),
        ));
    }
    let tol = 1e-12 * ensemble.t.abs().max(1.0);
    if (ensemble.t - quantum_density.t).abs() > tol {
        return Err(Error::Contract(format!(
            "ensemble at t = {} compared with a density at t = {}",
            ensemble.t, quantum_density.t
        )));
    }
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    let cdf = CellCdf::new(quantum_density)?;
    let mut sorted = ensemble.positions.clone();
    sorted.sort_by(f64::total_cmp);
    let ks = ks_statistic(&sorted, |x| cdf.cdf(x));

    let grid = &quantum_density.grid;
    let h = grid.dx();
    let n = grid.n();
    let mut counts = vec![0.0; n];
    for &x in &sorted {
        let k = ((x - (grid.x_min() - h / 2.0)) / h).floor();
        let k = k.clamp(0.0, (n - 1) as f64) as usize;
        counts[k] += 1.0;
    }
    let total_mass: f64 = quantum_density.values.iter().sum();
    let samples = sorted.len() as f64;
    let expected: Vec<f64> = quantum_density
        .values
        .iter()
        .map(|v| samples * v / total_mass)
        .collect();
    let (stat, dof) = chi_square(&counts, &expected, 5.0);
    let hist = RealField {
        grid: grid.clone(),
        representation: Representation::Position,
        t: ensemble.t,
        values: counts.iter().map(|c| c / (samples * h)).collect(),
    };
    Ok(DensityComparison {
        ks,
        chi2_pvalue_proxy: chi_square_pvalue(stat, dof),
        hist,
    })
}
