use super::phase::dual_phase_sweep;
use super::{ExperimentConfig, Runner, SweepGrid};
use crate::{Error, Result};

/// Largest accepted |ω̄1 − ω̄2| for the zeroth-order exchange, GHz.
pub const AVERAGE_TOLERANCE: f64 = 1e-4;

/// δφ_p sweep of the zeroth-order exchange between qubits with equal averaged frequencies.
pub fn run_parametric_resonance(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    if cfg.resonance.order != 0 {
        return Err(Error::config("resonance.order", "parametric resonance uses order 0"));
    }
    dual_phase_sweep(cfg, runner, "param-res", |state, _, _| {
        let detuning = state.detuning();
        if detuning.abs() > AVERAGE_TOLERANCE {
            return Err(Error::ResonanceMismatch(format!(
                "time-averaged frequencies differ by {:.4} MHz (tolerance {:.1} MHz)",
                detuning * 1e3,
                AVERAGE_TOLERANCE * 1e3
            )));
        }
        Ok(())
    })
}
