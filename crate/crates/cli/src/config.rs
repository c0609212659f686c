//! Experiment configuration: a TOML document with one table per concern.
//! Every table is optional and falls back to the defaults below; unknown
//! keys anywhere are rejected.

use std::path::{Path, PathBuf};

use itlab_core::densmat::TwoPacketParams;
use itlab_core::propagators::Method;
use itlab_core::scenarios::{AtomSource, Emission, MottConfig};
use itlab_core::states::GaussianSpec;
use itlab_core::{Grid, PhysicalParams};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Propagate,
    ItConvergence,
    Ensemble,
    Densmat,
    Mott,
    Epr,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Propagate => "propagate",
            ExperimentKind::ItConvergence => "it-convergence",
            ExperimentKind::Ensemble => "ensemble",
            ExperimentKind::Densmat => "densmat",
            ExperimentKind::Mott => "mott",
            ExperimentKind::Epr => "epr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(&self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Required by `validate-config`; otherwise must agree with the subcommand.
    pub experiment: Option<ExperimentKind>,
    pub seed: u64,
    pub physics: Physics,
    pub grid: GridSpec,
    pub output: Output,
    pub tolerances: Tolerances,
    pub propagate: Propagate,
    pub it_convergence: ItConvergence,
    pub ensemble: Ensemble,
    pub densmat: Densmat,
    pub mott: Mott,
    pub epr: Epr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Physics {
    pub mass: f64,
    pub hbar: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Physics {
            mass: 1.0,
            hbar: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            n: 4096,
            x_min: -100.0,
            x_max: 100.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Output {
    pub dir: PathBuf,
    pub format: Format,
}

impl Default for Output {
    fn default() -> Self {
        Output {
            dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Spreading ratio `ħt/(μσ²)` from which a time counts as asymptotic.
    pub it_regime: f64,
    /// KS acceptance band is `ks_band / √n`.
    pub ks_band: f64,
    /// Largest allowed per-bin Poisson deviation of the Mott histogram.
    pub poisson_z: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            it_regime: 100.0,
            ks_band: 1.95,
            poisson_z: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Propagate {
    pub center: f64,
    pub width: f64,
    pub momentum: f64,
    pub t: f64,
    pub methods: Vec<String>,
}

impl Default for Propagate {
    fn default() -> Self {
        Propagate {
            center: 0.0,
            width: 1.0,
            momentum: 0.0,
            t: 5.0,
            methods: ["spectral", "analytic", "kernel", "it"]
                .map(String::from)
                .to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ItConvergence {
    pub width: f64,
    pub times: Vec<f64>,
    pub max_dx: f64,
    pub coverage: f64,
}

impl Default for ItConvergence {
    fn default() -> Self {
        ItConvergence {
            width: 1.0,
            times: vec![10.0, 100.0, 1000.0, 10000.0],
            max_dx: 0.35,
            coverage: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Ensemble {
    pub width: f64,
    pub momentum: f64,
    pub t: f64,
    pub samples: usize,
    pub max_dx: f64,
    pub coverage: f64,
}

impl Default for Ensemble {
    fn default() -> Self {
        Ensemble {
            width: 1.0,
            momentum: 0.0,
            t: 1000.0,
            samples: 100_000,
            max_dx: 0.35,
            coverage: 12.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Densmat {
    pub x1: f64,
    pub x2: f64,
    pub width: f64,
    /// Momentum difference `p₀₁ - p₀₂` of the two packets.
    pub delta_p: f64,
    /// `p₀₁² - p₀₂²`; the fringe period is `4πμħ/|splitting|`.
    pub splitting: f64,
    pub t_center: f64,
    /// Averaging windows, ascending.
    pub taus: Vec<f64>,
    /// Lattice points per side of the exported off-diagonal patch.
    pub patch_points: usize,
    /// Half width of that patch, in units of the peak width `η`.
    pub patch_half_width: f64,
    /// Spatial bin of the detector reading the exported diagonal.
    pub bin_width: f64,
}

impl Default for Densmat {
    fn default() -> Self {
        let t_osc = 4.0 * std::f64::consts::PI;
        Densmat {
            x1: -5.0,
            x2: 5.0,
            width: 1.0,
            delta_p: 6.0,
            splitting: 1.0,
            t_center: 1e5,
            taus: vec![0.0, t_osc, 10.0 * t_osc, 100.0 * t_osc],
            patch_points: 41,
            patch_half_width: 2.0,
            bin_width: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Mott {
    pub events: usize,
    pub atoms: usize,
    pub cloud_radius: f64,
    pub impact_parameter: f64,
    pub chamber_radius: f64,
    pub z_bands: usize,
    pub sectors: usize,
}

impl Default for Mott {
    fn default() -> Self {
        Mott {
            events: 1000,
            atoms: 10_000,
            cloud_radius: 100.0,
            impact_parameter: 0.5,
            chamber_radius: 100.0,
            z_bands: 4,
            sectors: 12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Epr {
    pub x0: f64,
    pub s_r: f64,
    pub s_cm_inv: f64,
    pub pairs: usize,
    pub t1: f64,
    pub t2: f64,
}

impl Default for Epr {
    fn default() -> Self {
        Epr {
            x0: 5.0,
            s_r: 0.1,
            s_cm_inv: 50.0,
            pairs: 10_000,
            t1: 1000.0,
            t2: 1000.0,
        }
    }
}

/// Parses `text`, applies `key.path=value` overrides, and deserialises.
pub fn parse(text: &str, overrides: &[String]) -> CliResult<ExperimentConfig> {
    let mut doc: toml::Table =
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    ExperimentConfig::deserialize(toml::Value::Table(doc))
        .map_err(|e| CliError::Config(e.message().to_string()))
}

pub fn load(path: Option<&Path>, overrides: &[String]) -> CliResult<ExperimentConfig> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?,
        None => String::new(),
    };
    parse(&text, overrides)
}

/// `a.b.c=value`; the value is read as a TOML literal, falling back to a
/// bare string.
fn apply_override(doc: &mut toml::Table, spec: &str) -> CliResult<()> {
    let (path, raw) = spec.split_once('=').ok_or_else(|| {
        CliError::Config(format!("override '{spec}' is not of the form key=value"))
    })?;
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!(
            "override key '{path}' is malformed"
        )));
    }
    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut table = doc;
    for k in parents {
        table = table
            .entry(k.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override '{path}': '{k}' is not a table")))?;
    }
    table.insert(last.to_string(), value);
    Ok(())
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config(msg()))
    }
}

impl ExperimentConfig {
    pub fn physical_params(&self) -> CliResult<PhysicalParams> {
        Ok(PhysicalParams::new(self.physics.mass, self.physics.hbar)?)
    }

    pub fn build_grid(&self) -> CliResult<Grid> {
        let g = &self.grid;
        Ok(Grid::with_hbar(g.n, g.x_min, g.x_max, self.physics.hbar)?)
    }

    pub fn methods(&self) -> CliResult<Vec<Method>> {
        check(!self.propagate.methods.is_empty(), || {
            "propagate.methods is empty".into()
        })?;
        self.propagate
            .methods
            .iter()
            .map(|m| m.parse::<Method>().map_err(CliError::from))
            .collect()
    }

    pub fn packet(&self) -> GaussianSpec {
        let p = &self.propagate;
        GaussianSpec::new(p.center, p.width, p.momentum)
    }

    pub fn two_packets(&self) -> CliResult<TwoPacketParams> {
        let d = &self.densmat;
        check(d.delta_p != 0.0, || {
            "densmat.delta_p must be non-zero".into()
        })?;
        Ok(
            TwoPacketParams::new(d.x1, d.x2, d.width, self.physical_params()?)?
                .with_momentum_splitting(d.delta_p, d.splitting),
        )
    }

    pub fn mott_config(&self) -> MottConfig {
        let m = &self.mott;
        MottConfig {
            n_events: m.events,
            atoms: AtomSource::Cloud {
                count: m.atoms,
                radius: m.cloud_radius,
                seed: self.seed,
            },
            impact_parameter: m.impact_parameter,
            chamber_radius: m.chamber_radius,
            emission: Emission::Isotropic,
            seed: self.seed,
        }
    }

    /// Checks everything the named experiment will need without running it.
    pub fn validate(&self, kind: ExperimentKind) -> CliResult<()> {
        if let Some(declared) = self.experiment {
            check(declared == kind, || {
                format!(
                    "config declares experiment '{}' but '{}' was requested",
                    declared.name(),
                    kind.name()
                )
            })?;
        }
        self.physical_params()?;
        let tol = &self.tolerances;
        check(
            tol.it_regime > 0.0 && tol.ks_band > 0.0 && tol.poisson_z > 0.0,
            || "tolerances must be positive".into(),
        )?;
        match kind {
            ExperimentKind::Propagate => {
                self.build_grid()?;
                self.methods()?;
                self.packet().validate()?;
                check(self.propagate.t.is_finite(), || {
                    "propagate.t must be finite".into()
                })?;
            }
            ExperimentKind::ItConvergence => {
                let c = &self.it_convergence;
                check(!c.times.is_empty(), || {
                    "it_convergence.times is empty".into()
                })?;
                check(c.times.iter().all(|t| *t > 0.0 && t.is_finite()), || {
                    "it_convergence.times must be positive".into()
                })?;
                check(c.width > 0.0 && c.max_dx > 0.0 && c.coverage > 0.0, || {
                    "it_convergence.width, max_dx and coverage must be positive".into()
                })?;
            }
            ExperimentKind::Ensemble => {
                let e = &self.ensemble;
                check(e.samples > 0, || "ensemble.samples must be positive".into())?;
                check(e.t > 0.0 && e.t.is_finite(), || {
                    "ensemble.t must be positive".into()
                })?;
                check(e.width > 0.0 && e.max_dx > 0.0 && e.coverage > 0.0, || {
                    "ensemble.width, max_dx and coverage must be positive".into()
                })?;
            }
            ExperimentKind::Densmat => {
                let d = &self.densmat;
                self.two_packets()?;
                check(d.t_center > 0.0 && d.t_center.is_finite(), || {
                    "densmat.t_center must be positive".into()
                })?;
                check(!d.taus.is_empty(), || "densmat.taus is empty".into())?;
                check(d.taus.windows(2).all(|w| w[0] <= w[1]), || {
                    "densmat.taus must be ascending".into()
                })?;
                check(
                    d.taus.iter().all(|t| *t >= 0.0 && *t / 2.0 < d.t_center),
                    || "densmat.taus must lie in [0, 2·t_center)".into(),
                )?;
                check(d.bin_width >= 0.0 && d.bin_width.is_finite(), || {
                    "densmat.bin_width must be >= 0".into()
                })?;
                check(d.patch_points >= 2 && d.patch_half_width > 0.0, || {
                    "densmat.patch_points must be >= 2 and patch_half_width > 0".into()
                })?;
            }
            ExperimentKind::Mott => {
                self.mott_config().validate()?;
                check(self.mott.z_bands > 0 && self.mott.sectors > 0, || {
                    "mott.z_bands and mott.sectors must be positive".into()
                })?;
            }
            ExperimentKind::Epr => {
                let e = &self.epr;
                check(e.x0.is_finite() && e.s_r > 0.0 && e.s_cm_inv > 0.0, || {
                    "epr.s_r and epr.s_cm_inv must be positive".into()
                })?;
                check(e.t1 > 0.0 && e.t2 > 0.0, || {
                    "epr.t1 and epr.t2 must be positive".into()
                })?;
                check(e.pairs >= itlab_core::scenarios::MIN_PAIRS, || {
                    format!(
                        "epr.pairs must be at least {}",
                        itlab_core::scenarios::MIN_PAIRS
                    )
                })?;
            }
        }
        Ok(())
    }
}
