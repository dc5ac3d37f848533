use super::design::{drive_state, effective_frequency, predicted_coupling, retune};
use super::{ExperimentConfig, ProbeSpec, Runner, SummaryRow, SweepGrid};
use crate::modulation::sideband_spectrum;
use crate::transmon::FluxPulse;
use crate::{Error, Result};

/// Dressed sideband spectrum of qubit 1 binned on the probe grid.
///
/// The sideband of qubit 1 that crosses qubit 2 is split into two half-weight
/// lines at ω̄2 ± |g·J_n(A)|; the summary is the gap 2|g·J_n(A)|.
pub fn run_spectroscopy(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    cfg.validate()?;
    let n = cfg.resonance.order;
    let xs = cfg.sweep.values();
    let probe = match cfg.analysis.probe {
        Some(p) => p,
        None => default_probe(cfg)?,
    };
    let bins: Vec<f64> = (0..probe.points)
        .map(|k| probe.start + (probe.stop - probe.start) * k as f64 / (probe.points - 1) as f64)
        .collect();
    let step = bins[1] - bins[0];

    let columns = runner.try_map(&xs, |&v| {
        let p = retune(cfg, cfg.at(v)?)?;
        let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max)?;
        let coupling = predicted_coupling(&cfg.system, &state, &p.pulse1, &p.pulse2, n)?;
        let w = effective_frequency(&state, &p.pulse1, &p.pulse2)?;
        let half_gap = coupling.magnitude.abs();
        let omega2 = state.omega_bar()[1];

        let lines = if state.modulated[0] && w > 0.0 {
            // spacing of the spectrum equals w = base·ω_p
            let pulse = FluxPulse { omega_p: w / state.profiles[0].base_harmonic as f64, ..p.pulse1 };
            sideband_spectrum(&state.profiles[0], &pulse, cfg.analysis.n_max)?.peaks
        } else {
            vec![(state.omega_bar()[0], 1.0)]
        };
        let crossing = state.omega_bar()[0] - n as f64 * w;
        let mut column = vec![0.0; bins.len()];
        let mut deposit = |f: f64, weight: f64| {
            let k = ((f - probe.start) / step).round();
            if k >= 0.0 && (k as usize) < bins.len() {
                column[k as usize] += weight;
            }
        };
        for (f, weight) in lines {
            if (f - crossing).abs() < 1e-9 && half_gap > 0.0 {
                deposit(omega2 - half_gap, 0.5 * weight);
                deposit(omega2 + half_gap, 0.5 * weight);
            } else {
                deposit(f, weight);
            }
        }
        let mut row = SummaryRow::new(v, 2.0 * half_gap);
        row.reference = Some(coupling.strength());
        row.extra = vec![coupling.argument_a, omega2 - half_gap, omega2 + half_gap];
        Ok((column, row))
    })?;

    let mut grid = SweepGrid::new(cfg.sweep.axis.label(), "probe [GHz]", "weight");
    grid.x = xs;
    grid.y = bins;
    for (column, row) in columns {
        grid.z.push(column);
        grid.summary.push(row);
    }
    grid.summary_columns = vec!["A".into(), "lower [GHz]".into(), "upper [GHz]".into()];
    grid.metadata.insert("order".into(), n.to_string());
    grid.metadata.insert("value".into(), "gap 2|g J_n(A)| [GHz]".into());
    grid.stamp(cfg, "spectroscopy");
    grid.check_shape()?;
    Ok(grid)
}

fn default_probe(cfg: &ExperimentConfig) -> Result<ProbeSpec> {
    let p = retune(cfg, cfg.at(cfg.sweep.start)?)?;
    let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max)?;
    let w = effective_frequency(&state, &p.pulse1, &p.pulse2)?;
    let reach = (cfg.analysis.n_max as f64 + 1.0) * w.max(0.01);
    let center = state.omega_bar()[0];
    if !center.is_finite() {
        return Err(Error::Numeric("non-finite averaged frequency".into()));
    }
    Ok(ProbeSpec {
        start: center - reach,
        stop: center + reach,
        points: 2001,
    })
}
