use super::design::{drive_state, retune};
use super::{ExperimentConfig, ProbeSpec, Runner, SummaryRow, SweepGrid};
use crate::modulation::sideband_spectrum;
use crate::Result;

/// Undressed sideband spectra of both qubits against the swept parameter.
pub fn run_spectrum(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    cfg.validate()?;
    let xs = cfg.sweep.values();
    let probe = match cfg.analysis.probe {
        Some(p) => p,
        None => {
            let p = retune(cfg, cfg.at(cfg.sweep.start)?)?;
            let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max)?;
            let [w1, w2] = state.omega_bar();
            let reach = (cfg.analysis.n_max as f64 + 1.0) * 2.0 * p.pulse1.omega_p.max(p.pulse2.omega_p);
            ProbeSpec {
                start: w1.min(w2) - reach,
                stop: w1.max(w2) + reach,
                points: 2001,
            }
        }
    };
    let bins: Vec<f64> = (0..probe.points)
        .map(|k| probe.start + (probe.stop - probe.start) * k as f64 / (probe.points - 1) as f64)
        .collect();
    let step = bins[1] - bins[0];

    let columns = runner.try_map(&xs, |&v| {
        let p = retune(cfg, cfg.at(v)?)?;
        let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max)?;
        let mut column = vec![0.0; bins.len()];
        let mut spacing = [0.0; 2];
        for (i, pulse) in [p.pulse1, p.pulse2].iter().enumerate() {
            let profile = &state.profiles[i];
            let peaks = if state.modulated[i] {
                let s = sideband_spectrum(profile, pulse, cfg.analysis.n_max)?;
                spacing[i] = profile.base_harmonic as f64 * pulse.omega_p;
                s.peaks
            } else {
                vec![(profile.omega_bar, 1.0)]
            };
            for (f, weight) in peaks {
                let k = ((f - probe.start) / step).round();
                if k >= 0.0 && (k as usize) < bins.len() {
                    column[k as usize] += weight;
                }
            }
        }
        let [w1, w2] = state.omega_bar();
        let mut row = SummaryRow::new(v, w1);
        row.extra = vec![state.profiles[0].excursion, spacing[0], w2, state.profiles[1].excursion, spacing[1]];
        Ok((column, row))
    })?;

    let mut grid = SweepGrid::new(cfg.sweep.axis.label(), "probe [GHz]", "weight");
    grid.x = xs;
    grid.y = bins;
    for (column, row) in columns {
        grid.z.push(column);
        grid.summary.push(row);
    }
    grid.summary_columns = vec![
        "epsilon1 [GHz]".into(),
        "spacing1 [GHz]".into(),
        "omega_bar2 [GHz]".into(),
        "epsilon2 [GHz]".into(),
        "spacing2 [GHz]".into(),
    ];
    grid.metadata.insert("value".into(), "omega_bar1 [GHz]".into());
    grid.stamp(cfg, "spectrum");
    grid.check_shape()?;
    Ok(grid)
}
