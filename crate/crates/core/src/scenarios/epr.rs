//! A two-particle state with (nearly) sharp relative position `x₁ - x₂ = -x₀`
//! and (nearly) sharp total momentum `p₁ + p₂ = 0`, regularised as
//!
//! `Ψ(x₁, x₂) = f(x₁ - x₂) g((x₁ + x₂)/2)`,
//! `f(r) ∝ exp(-(r + x₀)²/(2 s_r²))`, `g(X) ∝ exp(-X²/(2 s_cm²))`.
//!
//! The state factorises in relative and centre-of-mass coordinates, so it is
//! stored as two one-dimensional states: `f` on a grid in `r` and `g` on a
//! grid in `X`. The conjugate momenta are `p_r = (p₁ - p₂)/2` and
//! `P = p₁ + p₂`, and `p₁x₁ + p₂x₂ = p_r r + P X`, so `Ψ̃(p₁, p₂) = f̃(p_r) g̃(P)`
//! with unit Jacobian in both representations.
//!
//! Detector convention for the imaging check: particle 1 is detected on the
//! positive half-line at `x₁ = p₁t₁/μ`, particle 2 on the negative half-line
//! at `x₂ = -p₂t₂/μ` with `x₂` its distance from the source. Requiring
//! `x₂ = x₁ + x₀` then gives `x₀ + (p₁t₁ + p₂t₂)/μ = 0`, and that expression
//! is the residual reported here. Note that for `p₂ = -p₁` and `t₁ = t₂` it
//! equals `x₀` identically.

use num_complex::Complex64;

use crate::ensemble::sample_field;
use crate::error::{Error, Result};
use crate::numerics::{to_momentum, Grid, PhysicalParams, WaveState};
use crate::rng::{streams, CounterRng};
use crate::states::{density, gaussian, observables, GaussianSpec};
use crate::stats::{mean, median, pearson, variance};

/// Grids for the relative and centre-of-mass factors.
#[derive(Debug, Clone, PartialEq)]
pub struct EprGrids {
    pub relative: Grid,
    pub cm: Grid,
}

impl EprGrids {
    /// Grids spanning ±32 widths around each factor's centre with at least
    /// 8 points per width, which resolves both the position profile and,
    /// through the domain length, the momentum profile.
    pub fn auto(x0: f64, s_r: f64, s_cm_inv: f64, hbar: f64) -> Result<Self> {
        let around = |c: f64, s: f64| Grid::covering(c - 32.0 * s, c + 32.0 * s, s / 8.0, hbar);
        Ok(EprGrids {
            relative: around(-x0, s_r)?,
            cm: around(0.0, s_cm_inv)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EprState {
    pub x0: f64,
    pub s_r: f64,
    pub s_cm_inv: f64,
    pub params: PhysicalParams,
    /// `f(r)`, normalised on its grid.
    pub relative: WaveState,
    /// `g(X)`, normalised on its grid.
    pub cm: WaveState,
}

impl EprState {
    /// Two independent particles, each `∝ exp(-x²/(2s²))`:
    /// `exp(-(x₁² + x₂²)/(2s²)) = exp(-r²/(4s²)) exp(-X²/s²)`.
    pub fn product(width: f64, grids: &EprGrids, params: PhysicalParams) -> Result<Self> {
        build(0.0, width * 2f64.sqrt(), width / 2f64.sqrt(), grids, params)
    }

    /// `⟨x₁ - x₂⟩`.
    pub fn mean_relative(&self) -> Result<f64> {
        Ok(observables(&self.relative)?.mean_x)
    }

    pub fn var_relative(&self) -> Result<f64> {
        Ok(observables(&self.relative)?.var_x)
    }

    /// `⟨p₁ + p₂⟩`.
    pub fn mean_total_momentum(&self) -> Result<f64> {
        Ok(observables(&self.cm)?.mean_p)
    }

    pub fn var_total_momentum(&self) -> Result<f64> {
        Ok(observables(&self.cm)?.var_p)
    }

    /// `Ψ(x₁, x₂) = f(x₁ - x₂) g((x₁ + x₂)/2)` for points on the factor
    /// lattices; `None` when `(x₁ - x₂, (x₁ + x₂)/2)` is not a lattice point.
    pub fn amplitude(&self, x1: f64, x2: f64) -> Option<Complex64> {
        let i = self.relative.grid().index_of(x1 - x2)?;
        let j = self.cm.grid().index_of(0.5 * (x1 + x2))?;
        Some(self.relative.amplitudes()[i] * self.cm.amplitudes()[j])
    }
}

fn build(
    x0: f64,
    s_r: f64,
    s_cm_inv: f64,
    grids: &EprGrids,
    params: PhysicalParams,
) -> Result<EprState> {
    for (name, v) in [("s_r", s_r), ("s_cm_inv", s_cm_inv)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "{name} must be > 0, got {v}"
            )));
        }
    }
    if !x0.is_finite() {
        return Err(Error::InvalidParameter("x0 must be finite".into()));
    }
    for g in [&grids.relative, &grids.cm] {
        if g.hbar() != params.hbar {
            return Err(Error::InvalidParameter(
                "grid hbar differs from the physical hbar".into(),
            ));
        }
    }
    let relative = gaussian(&GaussianSpec::new(-x0, s_r, 0.0), &grids.relative)?;
    let cm = gaussian(&GaussianSpec::new(0.0, s_cm_inv, 0.0), &grids.cm)?;
    Ok(EprState {
        x0,
        s_r,
        s_cm_inv,
        params,
        relative,
        cm,
    })
}

/// Regularised pair state. Fails if either factor leaks off its grid or is
/// unresolved; a width hierarchy `s_r ≥ s_cm_inv` is allowed but logged,
/// since the state is then far from the sharp limit.
pub fn epr_build(
    x0: f64,
    s_r: f64,
    s_cm_inv: f64,
    grids: &EprGrids,
    params: PhysicalParams,
) -> Result<EprState> {
    if s_r >= s_cm_inv {
        log::warn!(
            "s_r = {s_r} is not small against s_cm_inv = {s_cm_inv}; the pair is weakly correlated"
        );
    }
    build(x0, s_r, s_cm_inv, grids, params)
}

/// Minimum number of sampled pairs.
pub const MIN_PAIRS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct EprCorrelations {
    pub corr_p: f64,
    pub corr_x: f64,
    /// Mean of `x₂ - x₁`.
    pub mean_offset: f64,
    /// Mean of `p₁ + p₂`.
    pub mean_momentum_sum: f64,
    pub var_relative: f64,
    pub var_momentum_sum: f64,
    pub positions: Vec<(f64, f64)>,
    pub momenta: Vec<(f64, f64)>,
}

/// Momentum pairs `(p₁, p₂)` sampled from `|Ψ̃|²`.
pub fn sample_momentum_pairs(state: &EprState, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let rng = CounterRng::new(seed, streams::PAIR_MOMENTA);
    let pr = sample_field(&density(&to_momentum(&state.relative)?), n, &rng, 0, 2)?;
    let pc = sample_field(&density(&to_momentum(&state.cm)?), n, &rng, 1, 2)?;
    Ok(pr
        .iter()
        .zip(&pc)
        .map(|(r, c)| (0.5 * c + r, 0.5 * c - r))
        .collect())
}

/// Position pairs `(x₁, x₂)` sampled from `|Ψ|²`.
pub fn sample_position_pairs(state: &EprState, n: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    let rng = CounterRng::new(seed, streams::PAIR_POSITIONS);
    let r = sample_field(&density(&state.relative), n, &rng, 0, 2)?;
    let x = sample_field(&density(&state.cm), n, &rng, 1, 2)?;
    Ok(r.iter()
        .zip(&x)
        .map(|(r, c)| (c + 0.5 * r, c - 0.5 * r))
        .collect())
}

/// Position and momentum measurements on `n_pairs` fresh copies each.
pub fn epr_correlations(state: &EprState, n_pairs: usize, seed: u64) -> Result<EprCorrelations> {
    if n_pairs < MIN_PAIRS {
        return Err(Error::InvalidParameter(format!(
            "need at least {MIN_PAIRS} pairs, got {n_pairs}"
        )));
    }
    let positions = sample_position_pairs(state, n_pairs, seed)?;
    let momenta = sample_momentum_pairs(state, n_pairs, seed)?;
    let (x1, x2): (Vec<f64>, Vec<f64>) = positions.iter().copied().unzip();
    let (p1, p2): (Vec<f64>, Vec<f64>) = momenta.iter().copied().unzip();
    let offsets: Vec<f64> = positions.iter().map(|(a, b)| b - a).collect();
    let sums: Vec<f64> = momenta.iter().map(|(a, b)| a + b).collect();
    Ok(EprCorrelations {
        corr_p: pearson(&p1, &p2),
        corr_x: pearson(&x1, &x2),
        mean_offset: mean(&offsets),
        mean_momentum_sum: mean(&sums),
        var_relative: variance(&offsets),
        var_momentum_sum: variance(&sums),
        positions,
        momenta,
    })
}

/// `x₀ + (p₁t₁ + p₂t₂)/μ`.
pub fn it_residual(x0: f64, p1: f64, p2: f64, t1: f64, t2: f64, mass: f64) -> f64 {
    x0 + (p1 * t1 + p2 * t2) / mass
}

#[derive(Debug, Clone, PartialEq)]
pub struct ItConsistency {
    pub residuals: Vec<f64>,
    pub median: f64,
    pub mean: f64,
    pub std: f64,
}

/// Distribution of the imaging-relation residual over sampled momentum
/// pairs, for detection times `t₁`, `t₂`.
pub fn epr_it_consistency(
    state: &EprState,
    t1: f64,
    t2: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<ItConsistency> {
    if !(t1 > 0.0 && t2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "detection times must be > 0, got {t1}, {t2}"
        )));
    }
    let residuals: Vec<f64> = sample_momentum_pairs(state, n_pairs.max(1), seed)?
        .iter()
        .map(|&(p1, p2)| it_residual(state.x0, p1, p2, t1, t2, state.params.mass))
        .collect();
    Ok(ItConsistency {
        median: median(&residuals),
        mean: mean(&residuals),
        std: variance(&residuals).sqrt(),
        residuals,
    })
}
