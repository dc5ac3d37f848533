use super::design::{drive_state, effective_frequency, predicted_coupling, resonance_offset, retune};
use super::{exchange_row, fit_exchange, simulate, Axis, ExperimentConfig, Runner, SweepGrid};
use crate::Result;

/// |10⟩ population against time for every value of the swept axis.
///
/// Each column carries its fitted exchange frequency and the detuned-Rabi
/// prediction √((2gJ_n)² + δ²), with δ = Δ̄ + n·ω_eff. On the ω_p axis the
/// transfer-weighted resonance center is compared with −Δ̄/(n·base).
pub fn run_chevron(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    cfg.validate()?;
    let n = cfg.resonance.order;
    let xs = cfg.sweep.values();
    let columns = runner.try_map(&xs, |&v| {
        let mut p = cfg.at(v)?;
        if cfg.sweep.axis != Axis::OmegaP {
            p = retune(cfg, p)?;
        }
        let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max)?;
        let offset = resonance_offset(&state, &p.pulse1, &p.pulse2, n)?;
        let coupling = predicted_coupling(&cfg.system, &state, &p.pulse1, &p.pulse2, n)?;
        let trace = simulate(cfg, &cfg.system, &p)?;
        let p10 = trace.population("10")?.to_vec();
        let transfer = 1.0 - p10.iter().copied().fold(f64::INFINITY, f64::min);
        let mut row = exchange_row(v, fit_exchange(cfg, &trace))?;
        row.reference = Some(coupling.strength().hypot(offset));
        row.extra = vec![transfer, coupling.strength(), offset];
        Ok((trace.times, p10, row, state, p))
    })?;

    let mut grid = SweepGrid::new(cfg.sweep.axis.label(), "t [s]", "P10");
    grid.x = xs.clone();
    grid.y = columns.first().map(|c| c.0.clone()).unwrap_or_default();
    if cfg.sweep.axis == Axis::OmegaP && n != 0 && !columns.is_empty() {
        let transfers: Vec<f64> = columns.iter().map(|c| c.2.extra[0]).collect();
        let peak = transfers.iter().copied().fold(0.0, f64::max);
        let (mut weight, mut moment) = (0.0, 0.0);
        for (x, t) in xs.iter().zip(&transfers) {
            if *t >= 0.5 * peak {
                weight += t;
                moment += t * x;
            }
        }
        // analytic resonance: Δ̄ + n·base·ω_p = 0; ω̄ does not depend on ω_p
        let (_, _, _, state, p) = &columns[0];
        let base = effective_frequency(state, &p.pulse1, &p.pulse2)? / p.pulse1.omega_p.max(p.pulse2.omega_p);
        let analytic = -state.detuning() / (n as f64 * base);
        if weight > 0.0 {
            grid.metadata.insert("resonance_center [GHz]".into(), format!("{:.9}", moment / weight));
        }
        grid.metadata.insert("resonance_analytic [GHz]".into(), format!("{analytic:.9}"));
        let step = if xs.len() > 1 { (xs[1] - xs[0]).abs() } else { 0.0 };
        grid.metadata.insert("grid_step [GHz]".into(), format!("{step:.9}"));
    }
    for (_, p10, row, _, _) in columns {
        grid.z.push(p10);
        grid.summary.push(row);
    }
    grid.summary_columns = vec!["transfer".into(), "analytic_2g [GHz]".into(), "detuning [GHz]".into()];
    grid.metadata.insert("order".into(), n.to_string());
    grid.metadata.insert("value".into(), "fitted exchange frequency [GHz]".into());
    grid.stamp(cfg, "chevron");
    grid.check_shape()?;
    Ok(grid)
}
