use super::design::{check_resonance, drive_state, predicted_coupling, retune, DriveState};
use super::{exchange_row, fit_exchange, simulate, Axis, ExperimentConfig, Runner, SweepGrid};
use crate::{Error, Result};

/// δφ_p sweep of the dual-drive exchange: fitted 2g per column against 2|g·J_n(A)|.
pub fn run_phase_sweep(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    let n = cfg.resonance.order;
    dual_phase_sweep(cfg, runner, "phase-sweep", |state, p1, p2| {
        check_resonance(state, p1, p2, n)
    })
}

pub(super) fn dual_phase_sweep<F>(
    cfg: &ExperimentConfig,
    runner: &Runner,
    experiment: &str,
    check: F,
) -> Result<SweepGrid>
where
    F: Fn(&DriveState, &crate::transmon::FluxPulse, &crate::transmon::FluxPulse) -> Result<()>
        + Sync
        + Send,
{
    cfg.validate()?;
    if cfg.sweep.axis != Axis::Dphi {
        return Err(Error::config("sweep.axis", "this experiment sweeps dphi"));
    }
    let n = cfg.resonance.order;
    let xs = cfg.sweep.values();
    let columns = runner.try_map(&xs, |&v| {
        let p = retune(cfg, cfg.at(v)?)?;
        let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max)?;
        check(&state, &p.pulse1, &p.pulse2)?;
        let coupling = predicted_coupling(&cfg.system, &state, &p.pulse1, &p.pulse2, n)?;
        let trace = simulate(cfg, &cfg.system, &p)?;
        let mut row = exchange_row(v, fit_exchange(cfg, &trace))?;
        row.reference = Some(coupling.strength());
        row.extra = vec![coupling.argument_a, coupling.strength(), p.pulse1.omega_p];
        Ok((trace, row))
    })?;

    let mut grid = SweepGrid::new(Axis::Dphi.label(), "t [s]", "P10");
    grid.x = xs;
    grid.y = columns.first().map(|(t, _)| t.times.clone()).unwrap_or_default();
    for (trace, row) in columns {
        grid.z.push(trace.population("10")?.to_vec());
        grid.summary.push(row);
    }
    grid.summary_columns = vec!["A".into(), "analytic_2g [GHz]".into(), "omega_p [GHz]".into()];
    grid.metadata.insert("order".into(), n.to_string());
    grid.metadata.insert("value".into(), "fitted 2g_eff [GHz]".into());
    grid.stamp(cfg, experiment);
    grid.check_shape()?;
    Ok(grid)
}
