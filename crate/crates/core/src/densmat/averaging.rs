use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::fields::{DiagonalField, TwoPacketParams};
use super::{DensityMatrixSlice, DetectorResolution};
use crate::error::{Error, Result};
use crate::quadrature::trapezoid;

/// Trapezoid nodes per period of the fastest term present at a point.
pub const MIN_NODES_PER_PERIOD: usize = 64;

fn window(t_center: f64, tau: f64) -> Result<(f64, f64)> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "averaging window must be >= 0, got {tau}"
        )));
    }
    let lo = t_center - tau / 2.0;
    if !(lo > 0.0 && t_center.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "window [{lo}, {}] reaches t <= 0",
            t_center + tau / 2.0
        )));
    }
    Ok((lo, t_center + tau / 2.0))
}

/// Window means of the four terms `(0,0), (0,1), (1,0), (1,1)` at `(x, x')`.
fn averaged_terms(pair: &TwoPacketParams, lo: f64, hi: f64, x: f64, xp: f64) -> [Complex64; 4] {
    let all = |t: f64| {
        [
            pair.term(0, 0, x, xp, t),
            pair.term(0, 1, x, xp, t),
            pair.term(1, 0, x, xp, t),
            pair.term(1, 1, x, xp, t),
        ]
    };
    if hi == lo {
        return all(lo);
    }
    // frequencies scale as 1/t², so the window start bounds them
    let omega = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| pair.term_frequency(i, j, x, xp, lo))
        .fold(0.0, f64::max);
    let periods = (hi - lo) * omega / (2.0 * PI);
    let nodes =
        ((MIN_NODES_PER_PERIOD as f64 * periods).ceil() as usize).max(MIN_NODES_PER_PERIOD) + 1;
    let sum = trapezoid(|t| Terms(all(t)), lo, hi, nodes);
    sum.0.map(|z| z / (hi - lo))
}

#[derive(Clone, Copy)]
struct Terms([Complex64; 4]);

impl std::ops::Add for Terms {
    type Output = Terms;
    fn add(self, o: Terms) -> Terms {
        Terms(std::array::from_fn(|k| self.0[k] + o.0[k]))
    }
}

impl std::ops::Mul<f64> for Terms {
    type Output = Terms;
    fn mul(self, s: f64) -> Terms {
        Terms(self.0.map(|z| z * s))
    }
}

/// Mean of the asymptotic `ρ(x, x', t)` over `t ∈ [t_c - τ/2, t_c + τ/2]`
/// at every lattice point, by a trapezoid rule with at least
/// [`MIN_NODES_PER_PERIOD`] nodes per period of the fastest term at that
/// point. `τ = 0` gives the instantaneous field.
pub fn time_average(
    pair: &TwoPacketParams,
    t_center: f64,
    tau: f64,
    xs: &[f64],
    xps: &[f64],
) -> Result<DensityMatrixSlice> {
    let (lo, hi) = window(t_center, tau)?;
    pair.check_time(lo)?;
    Ok(DensityMatrixSlice::from_fn(
        xs,
        xps,
        t_center,
        Some(tau),
        |x, xp| averaged_terms(pair, lo, hi, x, xp).iter().sum(),
    ))
}

/// Diagonal of [`time_average`], without building the full square.
pub fn time_average_diagonal(
    pair: &TwoPacketParams,
    t_center: f64,
    tau: f64,
    xs: &[f64],
) -> Result<DiagonalField> {
    let (lo, hi) = window(t_center, tau)?;
    pair.check_time(lo)?;
    let values = xs
        .par_iter()
        .map(|&x| {
            averaged_terms(pair, lo, hi, x, x)
                .iter()
                .sum::<Complex64>()
                .re
        })
        .collect();
    Ok(DiagonalField {
        xs: xs.to_vec(),
        values,
        t: t_center,
        in_it_regime: pair.in_regime(lo),
    })
}

/// Diagonal seen by a detector that integrates over `res.tau` in time and
/// reports the mean over a bin of width `res.dx` centred on each `x`. The
/// bin mean uses at least [`MIN_NODES_PER_PERIOD`] nodes per spatial
/// fringe period `2πħt/(μ|X₂ - X₁|)`.
pub fn resolved_diagonal(
    pair: &TwoPacketParams,
    t_center: f64,
    res: &DetectorResolution,
    xs: &[f64],
) -> Result<DiagonalField> {
    let (lo, hi) = window(t_center, res.tau)?;
    pair.check_time(lo)?;
    let at = |x: f64| {
        averaged_terms(pair, lo, hi, x, x)
            .iter()
            .sum::<Complex64>()
            .re
    };
    let fringe = 2.0 * PI * pair.params.hbar * lo
        / (pair.params.mass * (pair.centers[1] - pair.centers[0]).abs());
    let nodes = ((MIN_NODES_PER_PERIOD as f64 * res.dx / fringe).ceil() as usize)
        .max(MIN_NODES_PER_PERIOD)
        + 1;
    let values = xs
        .par_iter()
        .map(|&x| {
            if res.dx == 0.0 {
                at(x)
            } else {
                trapezoid(at, x - res.dx / 2.0, x + res.dx / 2.0, nodes) / res.dx
            }
        })
        .collect();
    Ok(DiagonalField {
        xs: xs.to_vec(),
        values,
        t: t_center,
        in_it_regime: pair.in_regime(lo),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuppressionRow {
    pub tau: f64,
    /// Largest `|ρ̄|` over the off-diagonal peaks `(cᵢ, cⱼ)`, `i ≠ j`, where
    /// `cᵢ` are the classical packet centres at `t_c`.
    pub offdiag_max: f64,
    /// Fringe visibility `|ρ̄₁₂ + ρ̄₂₁| / (2√(ρ̄₁₁ ρ̄₂₂))` on the diagonal,
    /// maximised over one fringe period around the midpoint of the centres.
    pub fringe_contrast: f64,
    /// L¹ distance of the averaged diagonal to the classical two-peak form.
    pub diag_l1: f64,
}

/// Diagonal lattice points used by [`suppression_report`].
pub const REPORT_DIAGONAL_POINTS: usize = 4001;
const FRINGE_SAMPLES: usize = 33;

/// Off-diagonal peak height, midpoint fringe contrast and distance to the
/// classical two-peak diagonal for each window width in `taus`.
pub fn suppression_report(
    pair: &TwoPacketParams,
    t_center: f64,
    taus: &[f64],
) -> Result<Vec<SuppressionRow>> {
    if taus.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidParameter(
            "window widths must be sorted ascending".into(),
        ));
    }
    let c = [
        pair.classical_center(0, t_center),
        pair.classical_center(1, t_center),
    ];
    let eta = pair.eta(t_center);
    let lo_x = c[0].min(c[1]) - 8.0 * eta;
    let hi_x = c[0].max(c[1]) + 8.0 * eta;
    let diag_xs: Vec<f64> = (0..REPORT_DIAGONAL_POINTS)
        .map(|k| lo_x + (hi_x - lo_x) * k as f64 / (REPORT_DIAGONAL_POINTS - 1) as f64)
        .collect();
    let mid = 0.5 * (c[0] + c[1]);
    let spacing = 2.0 * PI * pair.params.hbar * t_center
        / (pair.params.mass * (pair.centers[1] - pair.centers[0]).abs());
    let fringe_xs: Vec<f64> = (0..FRINGE_SAMPLES)
        .map(|k| mid + spacing * (k as f64 / (FRINGE_SAMPLES - 1) as f64 - 0.5))
        .collect();

    taus.iter()
        .map(|&tau| {
            let (lo, hi) = window(t_center, tau)?;
            pair.check_time(lo)?;
            let offdiag_max = [(c[0], c[1]), (c[1], c[0])]
                .iter()
                .map(|&(x, xp)| {
                    averaged_terms(pair, lo, hi, x, xp)
                        .iter()
                        .sum::<Complex64>()
                        .norm()
                })
                .fold(0.0, f64::max);
            let fringe_contrast = fringe_xs
                .par_iter()
                .map(|&x| {
                    let t = averaged_terms(pair, lo, hi, x, x);
                    (t[1] + t[2]).norm() / (2.0 * (t[0].re * t[3].re).sqrt())
                })
                .reduce(|| 0.0, f64::max);
            let diag = time_average_diagonal(pair, t_center, tau, &diag_xs)?;
            let diag_l1 = diag.l1_distance(|x| pair.two_peak_form(x, t_center));
            Ok(SuppressionRow {
                tau,
                offdiag_max,
                fringe_contrast,
                diag_l1,
            })
        })
        .collect()
}

/// Oscillation period of `Re ρ(x, x', t)` near `t_c`, measured from the
/// zero crossings over `[t_c - span/2, t_c + span/2]`.
pub fn measure_period(
    pair: &TwoPacketParams,
    x: f64,
    xp: f64,
    t_center: f64,
    span: f64,
) -> Result<f64> {
    let (lo, hi) = window(t_center, span)?;
    pair.check_time(lo)?;
    let omega = (0..2)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| pair.term_frequency(i, j, x, xp, lo))
        .fold(0.0, f64::max);
    if !(omega > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "no oscillation at ({x}, {xp})"
        )));
    }
    let step = 2.0 * PI / omega / MIN_NODES_PER_PERIOD as f64;
    let samples = ((hi - lo) / step).ceil() as usize + 1;
    let h = (hi - lo) / (samples - 1) as f64;
    let re: Vec<f64> = (0..samples)
        .map(|k| pair.offdiag_at(x, xp, lo + k as f64 * h).re)
        .collect();
    let crossings: Vec<f64> = re
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[0] < 0.0) != (w[1] < 0.0))
        .map(|(k, w)| lo + h * (k as f64 + w[0] / (w[0] - w[1])))
        .collect();
    if crossings.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "only {} zero crossings in the window; widen it",
            crossings.len()
        )));
    }
    let first = crossings[0];
    let last = crossings[crossings.len() - 1];
    Ok(2.0 * (last - first) / (crossings.len() - 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::PhysicalParams;

    fn moving_pair() -> TwoPacketParams {
        TwoPacketParams::new(-5.0, 5.0, 1.0, PhysicalParams::default())
            .unwrap()
            .with_momentum_splitting(6.0, 1.0)
    }

    #[test]
    fn zero_window_is_instantaneous() {
        let pair = moving_pair();
        let xs = [-3e3, 0.0, 2e3];
        let avg = time_average(&pair, 1e3, 0.0, &xs, &xs).unwrap();
        let inst = super::super::rho_offdiag_it(&pair, 1e3, &xs, &xs).unwrap();
        assert_eq!(avg.values, inst.values);
        assert_eq!(avg.averaged_over, Some(0.0));
    }

    #[test]
    fn window_must_stay_positive() {
        let pair = moving_pair();
        assert!(time_average(&pair, 10.0, 20.0, &[0.0], &[0.0]).is_err());
        assert!(time_average(&pair, 10.0, -1.0, &[0.0], &[0.0]).is_err());
        assert!(suppression_report(&pair, 1e3, &[10.0, 1.0]).is_err());
    }

    #[test]
    fn period_matches_splitting() {
        let pair = moving_pair();
        let t = 1e4;
        let (x, xp) = (pair.classical_center(0, t), pair.classical_center(1, t));
        let p1 = pair.momentum(0, x, t);
        let p2 = pair.momentum(1, xp, t);
        let predicted = 4.0 * PI / (p1 * p1 - p2 * p2).abs();
        let measured = measure_period(&pair, x, xp, t, 10.0 * predicted).unwrap();
        assert!(
            (measured / predicted - 1.0).abs() < 0.01,
            "{measured} vs {predicted}"
        );
    }

    #[test]
    fn averaging_suppresses_offdiagonal_peak() {
        let pair = moving_pair();
        let t = 1e4;
        let t_osc = 4.0 * PI;
        let rows =
            suppression_report(&pair, t, &[0.0, 0.5 * t_osc, 10.5 * t_osc, 100.5 * t_osc]).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].offdiag_max < w[0].offdiag_max);
        }
        assert!(rows[0].offdiag_max / rows[3].offdiag_max > 100.0);
        assert!((rows[0].fringe_contrast - 1.0).abs() < 1e-2);
    }

    /// Packets at rest: the midpoint fringe is stationary and survives any
    /// window, so the diagonal never relaxes to the two-peak form.
    #[test]
    fn resting_pair_keeps_its_fringes() {
        let pair = TwoPacketParams::new(-5.0, 5.0, 1.0, PhysicalParams::default()).unwrap();
        let t = 1e4;
        let rows = suppression_report(&pair, t, &[0.0, 400.0 * PI]).unwrap();
        assert!((rows[0].fringe_contrast - 1.0).abs() < 1e-2);
        assert!(rows[1].fringe_contrast > 0.9);
        assert!(rows[1].diag_l1 > 0.1);
    }

    #[test]
    fn averaged_slice_stays_hermitian() {
        let pair = moving_pair();
        let xs = [-2e3, -50.0, 0.0, 700.0, 3e3];
        let avg = time_average(&pair, 1e3, 40.0, &xs, &xs).unwrap();
        let scale = pair.prefactor(1e3 - 20.0);
        assert!(avg.hermiticity_residual().unwrap() < 1e-13 * scale);
    }

    /// The stationary fringe of a resting pair is removed by a spatial bin
    /// one fringe period wide, not by the time window.
    #[test]
    fn spatial_bin_removes_stationary_fringe() {
        let pair = TwoPacketParams::new(-80.0, 80.0, 1.0, PhysicalParams::default()).unwrap();
        let t = 1e4;
        let eta = pair.eta(t);
        let xs: Vec<f64> = (0..201)
            .map(|k| -3.0 * eta + 6.0 * eta * k as f64 / 200.0)
            .collect();
        let fringe = 2.0 * PI * t / 160.0;
        let timed = resolved_diagonal(
            &pair,
            t,
            &DetectorResolution::new(400.0 * PI, 0.0).unwrap(),
            &xs,
        )
        .unwrap();
        let binned = resolved_diagonal(
            &pair,
            t,
            &DetectorResolution::new(0.0, fringe).unwrap(),
            &xs,
        )
        .unwrap();
        // reference: the two-peak form seen through the same bin. What the
        // bin leaves of the fringe is first order in fringe/η ≈ 0.04.
        let binned_two_peak = |x: f64| {
            crate::quadrature::simpson(
                |y| pair.two_peak_form(y, t),
                x - fringe / 2.0,
                x + fringe / 2.0,
                256,
            ) / fringe
        };
        let raw = timed.l1_distance(|x| pair.two_peak_form(x, t));
        let resolved = binned.l1_distance(binned_two_peak);
        assert!(raw > 0.1, "{raw}");
        assert!(resolved < 1e-2, "{resolved}");
        let plain = time_average_diagonal(&pair, t, 0.0, &xs).unwrap();
        let zero =
            resolved_diagonal(&pair, t, &DetectorResolution::new(0.0, 0.0).unwrap(), &xs).unwrap();
        assert_eq!(plain.values, zero.values);
    }
}
