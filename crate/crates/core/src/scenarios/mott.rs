//! Each emission event picks one direction uniformly on the unit sphere and
//! the particle then follows the classical ray from the origin: only atoms
//! within the impact parameter `b` of that forward ray are ionised.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rng::{streams, CounterRng};
use crate::stats::{chi_square, chi_square_pvalue};

pub type Vec3 = [f64; 3];

fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub enum AtomSource {
    Explicit(Vec<Vec3>),
    /// `count` atoms uniform in the ball of radius `radius`.
    Cloud {
        count: usize,
        radius: f64,
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Emission {
    Isotropic,
    /// Every event emitted along this direction (normalised on use).
    Fixed(Vec3),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MottConfig {
    pub n_events: usize,
    pub atoms: AtomSource,
    pub impact_parameter: f64,
    pub chamber_radius: f64,
    pub emission: Emission,
    pub seed: u64,
}

impl MottConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.impact_parameter > 0.0 && self.impact_parameter.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "impact parameter must be > 0, got {}",
                self.impact_parameter
            )));
        }
        if !(self.chamber_radius > 0.0 && self.chamber_radius.is_finite()) {
            return Err(Error::InvalidParameter("chamber radius must be > 0".into()));
        }
        match &self.atoms {
            AtomSource::Explicit(list) => {
                if let Some(a) = list.iter().find(|a| !(norm(a) <= self.chamber_radius)) {
                    return Err(Error::InvalidParameter(format!(
                        "atom {a:?} outside the chamber"
                    )));
                }
            }
            AtomSource::Cloud { radius, .. } => {
                if !(*radius > 0.0 && *radius <= self.chamber_radius) {
                    return Err(Error::InvalidParameter(format!(
                        "cloud radius {radius} must lie in (0, {}]",
                        self.chamber_radius
                    )));
                }
            }
        }
        if let Emission::Fixed(d) = self.emission {
            if !(norm(&d) > 0.0 && norm(&d).is_finite()) {
                return Err(Error::InvalidParameter(
                    "fixed emission direction must be non-zero".into(),
                ));
            }
        }
        Ok(())
    }

    pub fn atom_positions(&self) -> Vec<Vec3> {
        match &self.atoms {
            AtomSource::Explicit(list) => list.clone(),
            AtomSource::Cloud {
                count,
                radius,
                seed,
            } => {
                let rng = CounterRng::new(*seed, streams::ATOM_CLOUD);
                (0..*count as u64)
                    .into_par_iter()
                    .map(|k| {
                        let r = radius * rng.uniform_at(3 * k).cbrt();
                        let d = unit_vector(rng.uniform_at(3 * k + 1), rng.uniform_at(3 * k + 2));
                        [r * d[0], r * d[1], r * d[2]]
                    })
                    .collect()
            }
        }
    }

    /// Emission direction of event `k`.
    pub fn direction(&self, k: u64) -> Vec3 {
        match self.emission {
            Emission::Fixed(d) => {
                let n = norm(&d);
                [d[0] / n, d[1] / n, d[2] / n]
            }
            Emission::Isotropic => {
                let rng = CounterRng::new(self.seed, streams::EMISSION);
                unit_vector(rng.uniform_at(2 * k), rng.uniform_at(2 * k + 1))
            }
        }
    }
}

/// Uniform point on S² from two uniforms (z uniform in [-1, 1] by
/// Archimedes' hat-box theorem).
fn unit_vector(u1: f64, u2: f64) -> Vec3 {
    let z = 2.0 * u1 - 1.0;
    let phi = 2.0 * PI * u2;
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

#[derive(Debug, Clone, PartialEq)]
pub struct MottEvent {
    pub direction: Vec3,
    pub ionised: Vec<usize>,
    /// Largest distance of an ionised atom from the event ray (0 if none).
    pub max_transverse: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MottStats {
    pub max_transverse_deviation: f64,
    /// `|Σ d̂| / n` over the sampled directions.
    pub mean_resultant_length: f64,
    pub events_with_tracks: usize,
    pub mean_track_length: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MottRun {
    pub atoms: Vec<Vec3>,
    pub events: Vec<MottEvent>,
    pub stats: MottStats,
}

/// Distance of `a` from the forward ray along unit `d`; `None` behind the
/// emitter.
fn ray_distance(a: &Vec3, d: &Vec3) -> Option<f64> {
    let s = dot(a, d);
    if s <= 0.0 {
        return None;
    }
    let perp = [a[0] - s * d[0], a[1] - s * d[1], a[2] - s * d[2]];
    Some(norm(&perp))
}

pub fn mott_run(cfg: &MottConfig) -> Result<MottRun> {
    cfg.validate()?;
    let atoms = cfg.atom_positions();
    let b = cfg.impact_parameter;
    let events: Vec<MottEvent> = (0..cfg.n_events as u64)
        .into_par_iter()
        .map(|k| {
            let d = cfg.direction(k);
            let mut ionised = Vec::new();
            let mut max_transverse: f64 = 0.0;
            for (idx, a) in atoms.iter().enumerate() {
                if let Some(dist) = ray_distance(a, &d) {
                    if dist <= b {
                        ionised.push(idx);
                        max_transverse = max_transverse.max(dist);
                    }
                }
            }
            MottEvent {
                direction: d,
                ionised,
                max_transverse,
            }
        })
        .collect();
    let n = events.len().max(1) as f64;
    let mut resultant = [0.0; 3];
    for e in &events {
        for (r, d) in resultant.iter_mut().zip(&e.direction) {
            *r += d;
        }
    }
    let stats = MottStats {
        max_transverse_deviation: events.iter().map(|e| e.max_transverse).fold(0.0, f64::max),
        mean_resultant_length: norm(&resultant) / n,
        events_with_tracks: events.iter().filter(|e| !e.ionised.is_empty()).count(),
        mean_track_length: events.iter().map(|e| e.ionised.len() as f64).sum::<f64>() / n,
    };
    Ok(MottRun {
        atoms,
        events,
        stats,
    })
}

/// Equal-area partition of S² into `z_bands` bands of equal height in z,
/// each cut into `sectors` equal azimuthal sectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphereBinning {
    pub z_bands: usize,
    pub sectors: usize,
}

impl Default for SphereBinning {
    /// 48 bins.
    fn default() -> Self {
        SphereBinning {
            z_bands: 4,
            sectors: 12,
        }
    }
}

impl SphereBinning {
    pub fn bins(&self) -> usize {
        self.z_bands * self.sectors
    }

    pub fn index(&self, d: &Vec3) -> usize {
        let band =
            (((d[2] + 1.0) / 2.0 * self.z_bands as f64).floor() as usize).min(self.z_bands - 1);
        let phi = d[1].atan2(d[0]).rem_euclid(2.0 * PI);
        let sector =
            ((phi / (2.0 * PI) * self.sectors as f64).floor() as usize).min(self.sectors - 1);
        band * self.sectors + sector
    }
}

/// Minimum number of events for the uniformity statistics to be trusted.
pub const MIN_RELIABLE_EVENTS: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Perception {
    pub binning: SphereBinning,
    pub counts: Vec<u64>,
    pub expected: f64,
    /// Largest `|count - expected| / √expected` over the bins.
    pub max_poisson_z: f64,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
    pub reliable: bool,
}

impl Perception {
    pub fn within_poisson(&self, z: f64) -> bool {
        self.max_poisson_z <= z
    }
}

/// Direction histogram of the events of `cfg` on an equal-area binning.
pub fn mott_perception(cfg: &MottConfig, binning: SphereBinning) -> Result<Perception> {
    cfg.validate()?;
    if binning.z_bands == 0 || binning.sectors == 0 {
        return Err(Error::InvalidParameter(
            "sphere binning needs at least one band and sector".into(),
        ));
    }
    let nb = binning.bins();
    let counts = (0..cfg.n_events as u64)
        .into_par_iter()
        .fold(
            || vec![0u64; nb],
            |mut acc, k| {
                acc[binning.index(&cfg.direction(k))] += 1;
                acc
            },
        )
        .reduce(
            || vec![0u64; nb],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let expected = cfg.n_events as f64 / nb as f64;
    let max_poisson_z = if expected > 0.0 {
        counts
            .iter()
            .map(|&c| (c as f64 - expected).abs() / expected.sqrt())
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    let observed: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let (chi2, dof) = chi_square(&observed, &vec![expected; nb], 5.0);
    let reliable = cfg.n_events >= MIN_RELIABLE_EVENTS;
    if !reliable {
        log::warn!(
            "{} events is below {MIN_RELIABLE_EVENTS}; uniformity statistics are unreliable",
            cfg.n_events
        );
    }
    Ok(Perception {
        binning,
        counts,
        expected,
        max_poisson_z,
        chi2,
        dof,
        p_value: if dof > 0 {
            chi_square_pvalue(chi2, dof)
        } else {
            f64::NAN
        },
        reliable,
    })
}
