//! Operating-point design: excursions, time-averaged frequencies, and
//! bringing a drive pair onto a sideband resonance.

use std::f64::consts::PI;

use crate::coupling::{phase_coupling_dual, DualDrive, PhaseCoupling};
use crate::dynamics::TwoQubitSystem;
use crate::modulation::{fourier_coefficients, ModulationProfile};
use crate::transmon::{qubit_frequency, FluxPulse, TransmonParams, FLUX_LIMIT};
use crate::{Error, Result};

use super::{ExperimentConfig, Point, Retune};

/// Largest accepted |Δ̄ + n·ω_eff| in GHz.
pub const RESONANCE_TOLERANCE: f64 = 1e-4;

const EDGE: f64 = 1e-6;

/// Time-averaged picture of both drives.
#[derive(Clone, Debug, PartialEq)]
pub struct DriveState {
    pub profiles: [ModulationProfile; 2],
    pub modulated: [bool; 2],
}

impl DriveState {
    pub fn omega_bar(&self) -> [f64; 2] {
        [self.profiles[0].omega_bar, self.profiles[1].omega_bar]
    }

    pub fn excursion(&self) -> [f64; 2] {
        [self.profiles[0].excursion, self.profiles[1].excursion]
    }

    /// Δ̄ = ω̄2 − ω̄1.
    pub fn detuning(&self) -> f64 {
        self.profiles[1].omega_bar - self.profiles[0].omega_bar
    }
}

fn profile(params: &TransmonParams, pulse: &FluxPulse, k_max: u32) -> Result<ModulationProfile> {
    if pulse.phi_tilde == 0.0 {
        let f = qubit_frequency(params, pulse.phi_bar)?;
        return Ok(ModulationProfile {
            omega_bar: f,
            excursion: 0.0,
            fourier: vec![(0, f)],
            base_harmonic: crate::modulation::base_harmonic(pulse.phi_bar),
        });
    }
    fourier_coefficients(params, pulse, k_max)
}

pub fn drive_state(
    system: &TwoQubitSystem,
    p1: &FluxPulse,
    p2: &FluxPulse,
    k_max: u32,
) -> Result<DriveState> {
    Ok(DriveState {
        profiles: [profile(&system.q1, p1, k_max)?, profile(&system.q2, p2, k_max)?],
        modulated: [p1.phi_tilde > 0.0, p2.phi_tilde > 0.0],
    })
}

/// Common effective drive frequency base·ω_p of the modulated qubits.
pub fn effective_frequency(state: &DriveState, p1: &FluxPulse, p2: &FluxPulse) -> Result<f64> {
    let pulses = [p1, p2];
    let rates: Vec<f64> = (0..2)
        .filter(|&i| state.modulated[i])
        .map(|i| state.profiles[i].base_harmonic as f64 * pulses[i].omega_p)
        .collect();
    match rates.as_slice() {
        [] => Ok(0.0),
        [w] => Ok(*w),
        [a, b] if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) => Ok(*a),
        [a, b] => Err(Error::ResonanceMismatch(format!(
            "effective drive frequencies differ ({a} vs {b} GHz)"
        ))),
        _ => unreachable!(),
    }
}

/// Δ̄ + n·ω_eff in GHz.
pub fn resonance_offset(state: &DriveState, p1: &FluxPulse, p2: &FluxPulse, n: i32) -> Result<f64> {
    Ok(state.detuning() + n as f64 * effective_frequency(state, p1, p2)?)
}

pub fn check_resonance(state: &DriveState, p1: &FluxPulse, p2: &FluxPulse, n: i32) -> Result<()> {
    let offset = resonance_offset(state, p1, p2, n)?;
    if offset.abs() > RESONANCE_TOLERANCE {
        return Err(Error::ResonanceMismatch(format!(
            "order-{n} sideband is detuned by {:.4} MHz (tolerance {:.1} MHz)",
            offset * 1e3,
            RESONANCE_TOLERANCE * 1e3
        )));
    }
    Ok(())
}

/// Dual-drive description with signed excursions folded into the phases.
pub fn dual_drive(state: &DriveState, p1: &FluxPulse, p2: &FluxPulse) -> Result<DualDrive> {
    let pulses = [p1, p2];
    let sweet = |i: usize| state.profiles[i].base_harmonic == 2;
    let flags = match state.modulated {
        [true, true] => [sweet(0), sweet(1)],
        [true, false] => [sweet(0); 2],
        [false, true] => [sweet(1); 2],
        [false, false] => [false; 2],
    };
    let omega_p = match state.modulated {
        [true, true] => {
            if p1.omega_p != p2.omega_p {
                return Err(Error::ResonanceMismatch(format!(
                    "dual drives need equal frequencies ({} vs {} GHz)",
                    p1.omega_p, p2.omega_p
                )));
            }
            p1.omega_p
        }
        [false, true] => p2.omega_p,
        _ => p1.omega_p,
    };
    let phase = |i: usize| {
        let prof = &state.profiles[i];
        let flip = if prof.signed_excursion() < 0.0 {
            PI / prof.base_harmonic as f64
        } else {
            0.0
        };
        pulses[i].phi_p + flip
    };
    Ok(DualDrive {
        eps1: state.profiles[0].excursion,
        eps2: state.profiles[1].excursion,
        omega_p,
        phi_p1: phase(0),
        phi_p2: phase(1),
        sweet: flags,
    })
}

/// Closed-form coupling g·J_n(A) of the drive pair.
pub fn predicted_coupling(
    system: &TwoQubitSystem,
    state: &DriveState,
    p1: &FluxPulse,
    p2: &FluxPulse,
    n: i32,
) -> Result<PhaseCoupling> {
    if !state.modulated[0] && !state.modulated[1] {
        return Ok(PhaseCoupling {
            order: n,
            argument_a: 0.0,
            magnitude: if n == 0 { system.g } else { 0.0 },
            prefactor_phase: 0.0,
            interaction_phase: 0.0,
        });
    }
    phase_coupling_dual(system.g, &dual_drive(state, p1, p2)?, n)
}

/// Bring `point` onto resonance as requested by the config.
pub fn retune(cfg: &ExperimentConfig, point: Point) -> Result<Point> {
    let n = cfg.resonance.order;
    let k_max = cfg.analysis.k_max;
    let mut p = point;
    match cfg.resonance.retune {
        Retune::None => {}
        Retune::OmegaP => {
            if n == 0 {
                return Err(Error::config(
                    "resonance.retune",
                    "omega_p retuning needs a non-zero sideband order",
                ));
            }
            let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, k_max)?;
            let omega_eff = -state.detuning() / n as f64;
            if !(omega_eff > 0.0) {
                return Err(Error::ResonanceMismatch(format!(
                    "order-{n} resonance needs a negative drive frequency (Δ̄ = {:.4} GHz)",
                    state.detuning()
                )));
            }
            for (pulse, prof) in [(&mut p.pulse1, &state.profiles[0]), (&mut p.pulse2, &state.profiles[1])] {
                pulse.omega_p = omega_eff / prof.base_harmonic as f64;
            }
        }
        Retune::PhiBar2 => {
            let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, k_max)?;
            let omega_eff = effective_frequency(&state, &p.pulse1, &p.pulse2)?;
            let target = state.omega_bar()[0] - n as f64 * omega_eff;
            p.pulse2.phi_bar = bias_for_average(&cfg.system.q2, p.pulse2.phi_tilde, target)?;
        }
        Retune::PhiTilde2 => {
            let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, k_max)?;
            let omega_eff = effective_frequency(&state, &p.pulse1, &p.pulse2)?;
            let target = state.omega_bar()[0] - n as f64 * omega_eff;
            p.pulse2.phi_tilde = amplitude_for_average(&cfg.system.q2, p.pulse2.phi_bar, target)?;
        }
    }
    Ok(p)
}

/// Time-averaged frequency ω̄(Φ̄, Φ̃) in GHz.
pub fn average_frequency(params: &TransmonParams, phi_bar: f64, phi_tilde: f64) -> Result<f64> {
    crate::modulation::average_frequency(params, phi_bar, phi_tilde)
}

/// Bias Φ̄ ≥ 0 at which a qubit modulated with amplitude Φ̃ averages to `target` GHz.
pub fn bias_for_average(params: &TransmonParams, phi_tilde: f64, target: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = FLUX_LIMIT - phi_tilde - EDGE;
    if !(hi > lo) {
        return Err(Error::NoSolution(format!("amplitude {phi_tilde} leaves no room for a bias")));
    }
    let f = |b: f64| average_frequency(params, b, phi_tilde).map(|w| w - target);
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::NoSolution(format!(
            "average frequency {target:.6} GHz is outside [{:.6}, {:.6}] for amplitude {phi_tilde}",
            f_hi + target,
            f_lo + target
        )));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Amplitude Φ̃ > 0 at which a qubit biased at Φ̄ averages to `target` GHz.
pub fn amplitude_for_average(params: &TransmonParams, phi_bar: f64, target: f64) -> Result<f64> {
    let f = |t: f64| average_frequency(params, phi_bar, t).map(|w| w - target);
    let mut lo = 0.0;
    let mut hi = FLUX_LIMIT - phi_bar.abs() - EDGE;
    let (f_lo, f_hi) = (f(lo)?, f(hi)?);
    if f_lo < 0.0 || f_hi > 0.0 {
        return Err(Error::NoSolution(format!(
            "average frequency {target:.6} GHz is outside [{:.6}, {:.6}] at bias {phi_bar}",
            f_hi + target,
            f_lo + target
        )));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Amplitude Φ̃ at which the base-harmonic excursion equals `target` GHz.
pub fn amplitude_for_excursion(params: &TransmonParams, phi_bar: f64, target: f64) -> Result<f64> {
    if target == 0.0 {
        return Ok(0.0);
    }
    let excursion = |t: f64| -> Result<f64> {
        Ok(fourier_coefficients(params, &FluxPulse::new(phi_bar, t, 1.0, 0.0)?, 2)?.excursion)
    };
    let mut lo = 0.0;
    let mut hi = FLUX_LIMIT - phi_bar.abs() - EDGE;
    if excursion(hi)? < target {
        return Err(Error::NoSolution(format!(
            "excursion {target} GHz is not reachable at bias {phi_bar}"
        )));
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if excursion(mid)? < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bias and amplitude for a qubit that must reach excursion `eps` while averaging to `omega_bar`.
pub fn bias_and_amplitude(
    params: &TransmonParams,
    eps: f64,
    omega_bar: f64,
    initial_bias: f64,
) -> Result<(f64, f64)> {
    let mut bias = initial_bias;
    let mut amplitude = 0.0;
    for _ in 0..100 {
        let next_amplitude = amplitude_for_excursion(params, bias, eps)?;
        let next_bias = bias_for_average(params, next_amplitude, omega_bar)?;
        let done = (next_bias - bias).abs() < 1e-12 && (next_amplitude - amplitude).abs() < 1e-12;
        bias = next_bias;
        amplitude = next_amplitude;
        if done {
            return Ok((bias, amplitude));
        }
    }
    Err(Error::NoSolution(format!(
        "no bias/amplitude pair reaches excursion {eps} GHz at average {omega_bar} GHz"
    )))
}
