use super::{fit_exchange, simulate, Axis, ExperimentConfig, Point, Runner, SummaryRow, SweepGrid};
use crate::coupling::coupler_mediated_coupling;
use crate::dynamics::TwoQubitSystem;
use crate::transmon::{bias_for_frequency, qubit_frequency, FluxPulse};
use crate::{Error, Result};

/// Coupler-mediated exchange against coupler flux, both qubits at ω(q2, Φ̄2).
pub fn run_coupler_sweep(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    cfg.validate()?;
    if cfg.sweep.axis != Axis::FluxC {
        return Err(Error::config("sweep.axis", "coupler sweeps use flux_c"));
    }
    let omega = qubit_frequency(&cfg.system.q2, cfg.pulse2.phi_bar)?;
    let xs = cfg.sweep.values();
    let check = cfg.analysis.dynamics_check;
    let reference_index = xs
        .iter()
        .enumerate()
        .min_by(|a, b| {
            (a.1 - cfg.analysis.reference_flux_c)
                .abs()
                .total_cmp(&(b.1 - cfg.analysis.reference_flux_c).abs())
        })
        .map(|(i, _)| i);

    let columns = runner.try_map(&xs, |&v| {
        let coupler = cfg.at(v)?.coupler.expect("validated coupler");
        let g = match coupler_mediated_coupling(omega, omega, &coupler) {
            Ok(g) => g,
            Err(Error::ModelValidity(_)) => {
                let mut row = SummaryRow::new(v, f64::NAN);
                row.flagged = true;
                row.extra = vec![f64::NAN, f64::NAN];
                return Ok((Vec::new(), None, row));
            }
            Err(e) => return Err(e),
        };
        let mut row = SummaryRow::new(v, 2.0 * g.abs());
        let mut fitted = f64::NAN;
        let mut trace_out = None;
        if check {
            let system = TwoQubitSystem {
                g,
                levels: 2,
                ..cfg.system
            };
            let point = Point {
                pulse1: FluxPulse::dc(bias_for_frequency(&system.q1, omega)?),
                pulse2: FluxPulse::dc(cfg.pulse2.phi_bar),
                coupler: None,
            };
            let trace = simulate(cfg, &system, &point)?;
            match fit_exchange(cfg, &trace) {
                Ok(f) => {
                    fitted = f.frequency;
                    row.uncertainty = f.residual_rms;
                }
                Err(Error::NoOscillation(_)) => row.flagged = true,
                Err(e) => return Err(e),
            }
            let p10 = trace.population("10")?.to_vec();
            trace_out = Some(trace.times);
            row.extra = vec![g, fitted];
            return Ok((p10, trace_out, row));
        }
        row.extra = vec![g, fitted];
        Ok((vec![2.0 * g.abs()], trace_out, row))
    })?;

    let mut grid = if check {
        SweepGrid::new(Axis::FluxC.label(), "t [s]", "P10")
    } else {
        SweepGrid::new(Axis::FluxC.label(), "index", "two_g [GHz]")
    };
    grid.x = xs;
    let times = columns.iter().find_map(|c| c.1.clone());
    grid.y = match (&times, check) {
        (Some(t), true) => t.clone(),
        _ => vec![0.0],
    };
    for (i, (mut column, _, mut row)) in columns.into_iter().enumerate() {
        if column.len() != grid.y.len() {
            column = vec![f64::NAN; grid.y.len()];
        }
        if Some(i) == reference_index {
            let reference = cfg.analysis.reference_two_g;
            row.reference = Some(reference);
            if !((row.value - reference).abs() <= cfg.analysis.tolerance * reference) {
                row.flagged = true;
            }
        }
        grid.z.push(column);
        grid.summary.push(row);
    }
    grid.summary_columns = vec!["g_tilde [GHz]".into(), "fitted_two_g [GHz]".into()];
    grid.metadata.insert("qubit_frequency [GHz]".into(), format!("{omega:.9}"));
    grid.metadata.insert("value".into(), "model 2|g_tilde| [GHz]".into());
    grid.stamp(cfg, "coupler-sweep");
    grid.check_shape()?;
    Ok(grid)
}
