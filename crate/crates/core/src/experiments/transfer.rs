use super::{Axis, ExperimentConfig, Runner, SummaryRow, SweepGrid};
use crate::io::TransferTable;
use crate::modulation::{excursion_from_shift, fourier_coefficients};
use crate::transmon::qubit_frequency;
use crate::{Error, Result};

/// Attenuated modulation against drive frequency, and the amplitude recovered
/// from the dc shift of the averaged frequency.
pub fn run_transfer_calibration(
    cfg: &ExperimentConfig,
    table: &TransferTable,
    runner: &Runner,
) -> Result<SweepGrid> {
    cfg.validate()?;
    if cfg.sweep.axis != Axis::OmegaP {
        return Err(Error::config("sweep.axis", "transfer calibration sweeps omega_p"));
    }
    let xs = cfg.sweep.values();
    for &w in &xs {
        table.factor(w)?;
    }
    let driven = cfg.at(cfg.sweep.start)?.driven()?;
    let params = if driven == 0 { cfg.system.q1 } else { cfg.system.q2 };
    let programmed = cfg.at(cfg.sweep.start)?.pulse(driven).phi_tilde;

    let rows = runner.try_map(&xs, |&w| {
        let point = cfg.at(w)?;
        let pulse = *point.pulse(driven);
        let factor = table.factor(w)?;
        let effective = pulse.with_amplitude(factor * programmed);
        let profile = fourier_coefficients(&params, &effective, cfg.analysis.k_max)?;
        let shift = profile.omega_bar - qubit_frequency(&params, pulse.phi_bar)?;
        let recovered = excursion_from_shift(&params, pulse.phi_bar, w, shift)? / programmed;
        let mut row = SummaryRow::new(w, recovered);
        row.reference = Some(factor);
        row.flagged = (recovered - factor).abs() > 1e-3;
        row.extra = vec![effective.phi_tilde, shift, profile.excursion];
        Ok(row)
    })?;

    let mut grid = SweepGrid::new(Axis::OmegaP.label(), "phi_tilde_programmed [Phi0]", "dc_shift [GHz]");
    grid.x = xs;
    grid.y = vec![programmed];
    grid.z = rows.iter().map(|r| vec![r.extra[1]]).collect();
    grid.summary = rows;
    grid.summary_columns = vec![
        "phi_tilde_effective [Phi0]".into(),
        "dc_shift [GHz]".into(),
        "epsilon [GHz]".into(),
    ];
    grid.metadata.insert("driven_qubit".into(), (driven + 1).to_string());
    grid.metadata.insert("value".into(), "recovered transfer factor".into());
    grid.stamp(cfg, "transfer");
    grid.check_shape()?;
    Ok(grid)
}
