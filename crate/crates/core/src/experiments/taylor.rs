use super::{ExperimentConfig, Runner, SummaryRow, SweepGrid};
use crate::modulation::{average_deviation, fourier_coefficients, taylor_harmonics};
use crate::transmon::MAX_DERIVATIVE_ORDER;
use crate::Result;

/// Taylor against Fourier harmonics of the driven qubit for orders 1..=10.
///
/// z holds the Taylor minus Fourier amplitude of each harmonic; the summary
/// value is the mean deviation of the order-N Taylor series from the exact
/// trace, the reference that of the Fourier series truncated at harmonic N.
pub fn run_taylor_fourier(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    cfg.validate()?;
    let point = cfg.at(cfg.sweep.start)?;
    let driven = point.driven()?;
    let params = if driven == 0 { cfg.system.q1 } else { cfg.system.q2 };
    let pulse = *point.pulse(driven);
    let k_max = cfg.analysis.k_max.max(MAX_DERIVATIVE_ORDER);
    let fourier = fourier_coefficients(&params, &pulse, k_max)?;

    let orders: Vec<u32> = (1..=MAX_DERIVATIVE_ORDER).collect();
    let rows = runner.try_map(&orders, |&order| {
        let taylor = taylor_harmonics(&params, &pulse, order)?;
        let differences: Vec<f64> = (0..=k_max)
            .map(|k| taylor.coefficient(k) - fourier.coefficient(k))
            .collect();
        let truncated = |t: f64| {
            let theta = pulse.drive_phase(t);
            fourier
                .fourier
                .iter()
                .filter(|(k, _)| *k <= order)
                .map(|&(k, f)| f * (k as f64 * theta).cos())
                .sum::<f64>()
        };
        let taylor_dev = average_deviation(|t| taylor.at_time(&pulse, t), &params, &pulse)?;
        let fourier_dev = average_deviation(truncated, &params, &pulse)?;
        let mut row = SummaryRow::new(order as f64, taylor_dev);
        row.reference = Some(fourier_dev);
        row.extra = vec![fourier_dev];
        Ok((differences, row))
    })?;

    let mut grid = SweepGrid::new("order", "harmonic", "taylor_minus_fourier [GHz]");
    grid.x = orders.iter().map(|&o| o as f64).collect();
    grid.y = (0..=k_max).map(f64::from).collect();
    for (column, row) in rows {
        grid.z.push(column);
        grid.summary.push(row);
    }
    grid.summary_columns = vec!["fourier_deviation [GHz]".into()];
    grid.metadata.insert("driven_qubit".into(), (driven + 1).to_string());
    grid.metadata.insert("phi_bar [Phi0]".into(), format!("{}", pulse.phi_bar));
    grid.metadata.insert("phi_tilde [Phi0]".into(), format!("{}", pulse.phi_tilde));
    grid.metadata.insert("value".into(), "taylor mean deviation [GHz]".into());
    grid.stamp(cfg, "taylor-fourier");
    grid.check_shape()?;
    Ok(grid)
}
