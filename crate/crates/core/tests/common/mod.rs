#![allow(dead_code)]

use phasemod::dynamics::{Integration, TwoQubitSystem};
use phasemod::experiments::design::{amplitude_for_excursion, average_frequency, bias_and_amplitude};
use phasemod::experiments::{Axis, ExperimentConfig, Retune, SweepSpec};
use phasemod::transmon::{FluxPulse, TransmonParams};

pub const OMEGA_P: f64 = 0.5;
pub const PARK1: f64 = 0.25;

pub fn base_config() -> ExperimentConfig {
    phasemod::io::load(None, None).expect("paper-device profile")
}

/// Qubit 1 at Φ̄ = 0.25 with excursion `eps1`; qubit 2 biased and driven so that
/// its excursion is `eps2` and ω̄2 = ω̄1 − n·ω_p.
pub fn dual_pulses(eps1: f64, eps2: f64, n: i32) -> (FluxPulse, FluxPulse) {
    let s = TwoQubitSystem::paper_device();
    let t1 = amplitude_for_excursion(&s.q1, PARK1, eps1).unwrap();
    let w1 = average_frequency(&s.q1, PARK1, t1).unwrap();
    let target = w1 - n as f64 * OMEGA_P;
    let (b2, t2) = if eps2 > 0.0 {
        bias_and_amplitude(&s.q2, eps2, target, 0.3).unwrap()
    } else {
        (phasemod::transmon::bias_for_frequency(&s.q2, target).unwrap(), 0.0)
    };
    (
        FluxPulse::new(PARK1, t1, OMEGA_P, 0.0).unwrap(),
        FluxPulse::new(b2, t2, OMEGA_P, 0.0).unwrap(),
    )
}

pub fn phase_config(eps1: f64, eps2: f64, n: i32, points: usize, t_final: f64) -> ExperimentConfig {
    let (p1, p2) = dual_pulses(eps1, eps2, n);
    let mut cfg = base_config();
    cfg.pulse1 = p1;
    cfg.pulse2 = p2;
    cfg.resonance.order = n;
    cfg.resonance.retune = if n == 0 { Retune::None } else { Retune::OmegaP };
    cfg.sweep = SweepSpec {
        axis: Axis::Dphi,
        start: 0.0,
        stop: std::f64::consts::TAU,
        points,
    };
    cfg.time = Integration {
        t_final,
        dt: 1.5e-12,
        samples: 2001,
    };
    cfg
}

pub fn q2() -> TransmonParams {
    TransmonParams::paper_q2()
}

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}
