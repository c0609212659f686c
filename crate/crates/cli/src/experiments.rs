//! One function per experiment: config in, tables and headline numbers out.

use std::f64::consts::PI;

use itlab_core::densmat::{
    measure_period, resolved_diagonal, suppression_report, time_average, DetectorResolution,
};
use itlab_core::ensemble::{compare_density, sample_momenta, transport};
use itlab_core::numerics::to_momentum;
use itlab_core::propagators::{
    it_convergence, it_error, propagate_gaussian_analytic, propagate_it_about, propagate_kernel,
    propagate_spectral, ItRegime, Method, StudyGrid,
};
use itlab_core::scenarios::{
    epr_build, epr_correlations, epr_it_consistency, mott_perception, mott_run, EprGrids,
    SphereBinning,
};
use itlab_core::states::{density, gaussian, GaussianSpec};
use itlab_core::{Grid, WaveState};

use crate::config::{ExperimentConfig, ExperimentKind};
use crate::error::CliResult;
use crate::export::Table;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Vec<(String, f64)>,
}

impl Outcome {
    fn note(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), value));
    }

    fn flag(&mut self, key: &str, value: bool) {
        self.note(key, if value { 1.0 } else { 0.0 });
    }
}

pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig) -> CliResult<Outcome> {
    match kind {
        ExperimentKind::Propagate => propagate(cfg),
        ExperimentKind::ItConvergence => convergence(cfg),
        ExperimentKind::Ensemble => ensemble(cfg),
        ExperimentKind::Densmat => densmat(cfg),
        ExperimentKind::Mott => mott(cfg),
        ExperimentKind::Epr => epr(cfg),
    }
}

/// The configured packet evolved by each requested method, and every
/// method's distance to the first one listed.
fn propagate(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let params = cfg.physical_params()?;
    let grid = cfg.build_grid()?;
    let spec = cfg.packet();
    let t = cfg.propagate.t;
    let s0 = gaussian(&spec, &grid)?;
    let states = cfg
        .methods()?
        .into_iter()
        .map(|m| {
            let r = match m {
                Method::Spectral => propagate_spectral(&s0, t, &params)?,
                Method::Analytic => propagate_gaussian_analytic(&[spec], t, &grid, &params)?,
                Method::Kernel => propagate_kernel(&s0, t, &params)?,
                Method::It => {
                    propagate_it_about(&to_momentum(&s0)?, spec.center, t, &grid, &params)?
                }
            };
            Ok((m, r.state))
        })
        .collect::<CliResult<Vec<(Method, WaveState)>>>()?;

    let mut columns = vec!["x".to_string()];
    for (m, _) in &states {
        for part in ["re", "im", "density"] {
            columns.push(format!("{part}_{}", m.name()));
        }
    }
    let mut table = Table::new(
        "wavefunction",
        &columns.iter().map(String::as_str).collect::<Vec<_>>(),
    );
    for (j, x) in grid.xs().into_iter().enumerate() {
        let mut row = vec![x];
        for (_, s) in &states {
            let a = s.amplitudes()[j];
            row.extend([a.re, a.im, a.norm_sqr()]);
        }
        table.push(row);
    }

    let mut out = Outcome::default();
    let (reference, exact) = &states[0];
    for (m, s) in &states[1..] {
        let e = it_error(exact, s)?;
        let tag = format!("{}_vs_{}", m.name(), reference.name());
        out.note(&format!("l2_rel_{tag}"), e.l2_rel);
        out.note(&format!("linf_{tag}"), e.linf);
        out.note(&format!("density_l1_{tag}"), e.density_l1);
    }
    out.note(
        "spreading_ratio",
        ItRegime::spreading_ratio(t, spec.width, &params),
    );
    out.tables.push(table);
    Ok(out)
}

fn convergence(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let c = &cfg.it_convergence;
    let params = cfg.physical_params()?;
    let policy = StudyGrid {
        max_dx: c.max_dx,
        coverage: c.coverage,
    };
    let regime = ItRegime {
        threshold: cfg.tolerances.it_regime,
    };
    let rows = it_convergence(c.width, &c.times, &params, &policy)?;
    let mut table = Table::new(
        "it_convergence",
        &[
            "t",
            "n",
            "spreading_ratio",
            "in_regime",
            "l2_rel",
            "linf",
            "density_l1",
        ],
    );
    for r in &rows {
        let in_regime = regime.contains(r.t, c.width, &params);
        table.push(vec![
            r.t,
            r.n as f64,
            r.spreading_ratio,
            f64::from(u8::from(in_regime)),
            r.l2_rel,
            r.linf,
            r.density_l1,
        ]);
    }
    let mut out = Outcome::default();
    out.flag(
        "monotone",
        rows.windows(2).all(|w| w[1].density_l1 < w[0].density_l1),
    );
    if let Some(last) = rows.last() {
        out.note("final_density_l1", last.density_l1);
    }
    out.tables.push(table);
    Ok(out)
}

/// Grid holding a packet of width `width` and mean momentum `p0` both at
/// t = 0 and at `t`.
fn transport_grid(cfg: &ExperimentConfig, width: f64, p0: f64, t: f64) -> CliResult<Grid> {
    let e = &cfg.ensemble;
    let (mu, hbar) = (cfg.physics.mass, cfg.physics.hbar);
    let std = (width * width / 2.0 + (hbar * t / mu).powi(2) / (2.0 * width * width)).sqrt();
    let drift = p0 * t / mu;
    let half = e.coverage * std;
    Ok(Grid::covering(
        drift.min(0.0) - half,
        drift.max(0.0) + half,
        e.max_dx,
        hbar,
    )?)
}

fn ensemble(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let e = &cfg.ensemble;
    let params = cfg.physical_params()?;
    let grid = transport_grid(cfg, e.width, e.momentum, e.t)?;
    let s0 = gaussian(&GaussianSpec::new(0.0, e.width, e.momentum), &grid)?;
    let quantum = density(&propagate_spectral(&s0, e.t, &params)?.state);
    let momenta = sample_momenta(&density(&to_momentum(&s0)?), e.samples, cfg.seed)?;
    let ens = transport(momenta, e.t, &params, cfg.seed)?;
    let cmp = compare_density(&ens, &quantum)?;

    let mut table = Table::new("ensemble_density", &["x", "quantum", "histogram"]);
    for ((x, q), h) in quantum
        .coordinates()
        .into_iter()
        .zip(&quantum.values)
        .zip(&cmp.hist.values)
    {
        table.push(vec![x, *q, *h]);
    }
    let band = cfg.tolerances.ks_band / (e.samples as f64).sqrt();
    let mut out = Outcome::default();
    out.note("samples", e.samples as f64);
    out.note("ks", cmp.ks);
    out.note("ks_band", band);
    out.flag("ks_within_band", cmp.ks < band);
    out.note("chi2_pvalue", cmp.chi2_pvalue_proxy);
    out.tables.push(table);
    Ok(out)
}

fn densmat(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let d = &cfg.densmat;
    let pair = cfg.two_packets()?;
    let (mu, hbar) = (cfg.physics.mass, cfg.physics.hbar);
    let t_c = d.t_center;
    let rows = suppression_report(&pair, t_c, &d.taus)?;
    let mut table = Table::new(
        "suppression",
        &["tau", "offdiag_max", "fringe_contrast", "diag_l1"],
    );
    for r in &rows {
        table.push(vec![r.tau, r.offdiag_max, r.fringe_contrast, r.diag_l1]);
    }

    let c = [pair.classical_center(0, t_c), pair.classical_center(1, t_c)];
    let eta = pair.eta(t_c);
    let t_osc = 4.0 * PI * mu * hbar / d.splitting.abs();
    let span = (20.0 * t_osc).min(t_c);
    let period = measure_period(&pair, c[0], c[1], t_c, span)?;

    let tau_max = *d.taus.last().expect("validated non-empty");
    let axis = |center: f64| -> Vec<f64> {
        let h = d.patch_half_width * eta;
        (0..d.patch_points)
            .map(|k| center - h + 2.0 * h * k as f64 / (d.patch_points - 1) as f64)
            .collect()
    };
    let instant = time_average(&pair, t_c, 0.0, &axis(c[0]), &axis(c[1]))?;
    let averaged = time_average(&pair, t_c, tau_max, &axis(c[0]), &axis(c[1]))?;

    let lo = c[0].min(c[1]) - 8.0 * eta;
    let hi = c[0].max(c[1]) + 8.0 * eta;
    let xs: Vec<f64> = (0..801)
        .map(|k| lo + (hi - lo) * k as f64 / 800.0)
        .collect();
    let detector = DetectorResolution::new(tau_max, d.bin_width)?;
    let diag = resolved_diagonal(&pair, t_c, &detector, &xs)?;
    let mut diag_table = Table::new("diagonal", &["x", "detected", "two_peak"]);
    for (x, v) in xs.iter().zip(&diag.values) {
        diag_table.push(vec![*x, *v, pair.two_peak_form(*x, t_c)]);
    }

    let mut out = Outcome::default();
    out.note("t_osc_predicted", t_osc);
    out.note("t_osc_measured", period);
    out.note("period_rel_error", (period - t_osc).abs() / t_osc);
    let (first, last) = (rows[0], rows[rows.len() - 1]);
    out.note("suppression_ratio", first.offdiag_max / last.offdiag_max);
    out.note("fringe_contrast_instant", first.fringe_contrast);
    out.note("fringe_contrast_averaged", last.fringe_contrast);
    out.note("diag_l1_averaged", last.diag_l1);
    out.flag("in_it_regime", diag.in_it_regime);
    out.tables.extend([
        table,
        Table::from_slice("rho_offdiag_instant", &instant),
        Table::from_slice("rho_offdiag_averaged", &averaged),
        diag_table,
    ]);
    Ok(out)
}

fn mott(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let m = &cfg.mott;
    let mc = cfg.mott_config();
    let run = mott_run(&mc)?;
    let binning = SphereBinning {
        z_bands: m.z_bands,
        sectors: m.sectors,
    };
    let p = mott_perception(&mc, binning)?;

    let mut events = Table::new(
        "mott_events",
        &["event", "dx", "dy", "dz", "ionised", "max_transverse"],
    );
    for (k, ev) in run.events.iter().enumerate() {
        let [dx, dy, dz] = ev.direction;
        events.push(vec![
            k as f64,
            dx,
            dy,
            dz,
            ev.ionised.len() as f64,
            ev.max_transverse,
        ]);
    }
    let mut hist = Table::new(
        "mott_histogram",
        &["bin", "z_band", "sector", "count", "expected"],
    );
    for (b, &count) in p.counts.iter().enumerate() {
        hist.push(vec![
            b as f64,
            (b / binning.sectors) as f64,
            (b % binning.sectors) as f64,
            count as f64,
            p.expected,
        ]);
    }

    let s = run.stats;
    let mut out = Outcome::default();
    out.note("max_transverse_deviation", s.max_transverse_deviation);
    out.flag(
        "collinear",
        s.max_transverse_deviation <= m.impact_parameter,
    );
    out.note("events_with_tracks", s.events_with_tracks as f64);
    out.note("mean_track_length", s.mean_track_length);
    out.note("mean_resultant_length", s.mean_resultant_length);
    out.note("max_poisson_z", p.max_poisson_z);
    out.flag("uniform", p.within_poisson(cfg.tolerances.poisson_z));
    out.note("chi2", p.chi2);
    out.note("dof", p.dof as f64);
    if p.p_value.is_finite() {
        out.note("chi2_pvalue", p.p_value);
    }
    out.flag("reliable", p.reliable);
    out.tables.extend([events, hist]);
    Ok(out)
}

fn epr(cfg: &ExperimentConfig) -> CliResult<Outcome> {
    let e = &cfg.epr;
    let params = cfg.physical_params()?;
    let grids = EprGrids::auto(e.x0, e.s_r, e.s_cm_inv, params.hbar)?;
    let state = epr_build(e.x0, e.s_r, e.s_cm_inv, &grids, params)?;
    let corr = epr_correlations(&state, e.pairs, cfg.seed)?;
    let cons = epr_it_consistency(&state, e.t1, e.t2, e.pairs, cfg.seed)?;

    let mut pairs = Table::new("epr_pairs", &["x1", "x2", "p1", "p2", "residual"]);
    for ((&(x1, x2), &(p1, p2)), r) in corr
        .positions
        .iter()
        .zip(&corr.momenta)
        .zip(&cons.residuals)
    {
        pairs.push(vec![x1, x2, p1, p2, *r]);
    }
    let mut out = Outcome::default();
    out.note("corr_p", corr.corr_p);
    out.note("corr_x", corr.corr_x);
    out.note("mean_offset", corr.mean_offset);
    out.note("mean_momentum_sum", corr.mean_momentum_sum);
    out.note("var_relative", corr.var_relative);
    out.note("var_momentum_sum", corr.var_momentum_sum);
    out.note("residual_median", cons.median);
    out.note("residual_mean", cons.mean);
    out.note("residual_std", cons.std);
    out.tables.push(pairs);
    Ok(out)
}
