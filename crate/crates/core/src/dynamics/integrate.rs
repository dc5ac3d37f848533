use std::collections::BTreeMap;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::system::TwoQubitSystem;
use crate::transmon::{frequency_unchecked, FluxPulse, FLUX_LIMIT};
use crate::{Error, Result, NS_PER_S};

/// Largest tolerated deviation of ‖ψ‖ from 1.
pub const NORM_TOLERANCE: f64 = 1e-6;

/// Required steps per period of the fastest rotating-frame frequency.
const STEPS_PER_PERIOD: f64 = 50.0;

/// Default cap on the number of recorded samples.
const DEFAULT_SAMPLES: usize = 4001;

type State = Vec<Complex64>;

/// Time grid of one evolution, all in seconds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Integration {
    pub t_final: f64,
    pub dt: f64,
    /// Number of recorded samples including t = 0 and t_final.
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimeTrace {
    /// Sample times in seconds.
    pub times: Vec<f64>,
    /// Population series keyed by basis label ("n1n2").
    pub populations: BTreeMap<String, Vec<f64>>,
    pub norm: Vec<f64>,
    /// Final amplitudes in the integrator's frame, ordered as the labels of the system basis.
    pub final_state: Vec<Complex64>,
    pub final_labels: Vec<String>,
}

impl TimeTrace {
    pub fn population(&self, label: &str) -> Result<&[f64]> {
        self.populations
            .get(label)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::InvalidInput(format!("trace has no population {label:?}")))
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.norm.iter().map(|n| (n - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Per-evolution drive data: parking frequencies and δω_i(t) = ω_i(Φ_i(t)) − ω_i(Φ̄_i).
struct Drives<'a> {
    system: &'a TwoQubitSystem,
    pulses: [&'a FluxPulse; 2],
    park: [f64; 2],
}

impl<'a> Drives<'a> {
    fn new(system: &'a TwoQubitSystem, p1: &'a FluxPulse, p2: &'a FluxPulse) -> Result<Self> {
        system.validate()?;
        p1.validate()?;
        p2.validate()?;
        Ok(Drives {
            system,
            pulses: [p1, p2],
            park: [
                frequency_unchecked(&system.q1, p1.phi_bar),
                frequency_unchecked(&system.q2, p2.phi_bar),
            ],
        })
    }

    /// δω_1, δω_2 at time `t_ns`.
    #[inline]
    fn detuning(&self, t_ns: f64) -> [f64; 2] {
        let q = [&self.system.q1, &self.system.q2];
        let mut out = [0.0; 2];
        for i in 0..2 {
            let p = self.pulses[i];
            if p.phi_tilde == 0.0 {
                continue;
            }
            let flux = p.phi_bar + p.phi_tilde * (TAU * p.omega_p * t_ns + p.phi_p).cos();
            out[i] = frequency_unchecked(q[i], flux) - self.park[i];
        }
        out
    }

    /// Largest |δω_i| reachable during the drive.
    fn max_detuning(&self) -> f64 {
        let q = [&self.system.q1, &self.system.q2];
        (0..2)
            .flat_map(|i| {
                let p = self.pulses[i];
                [p.phi_bar + p.phi_tilde, p.phi_bar - p.phi_tilde]
                    .into_iter()
                    .map(move |f| (frequency_unchecked(q[i], f) - self.park[i]).abs())
            })
            .fold(0.0, f64::max)
    }
}

struct Grid {
    steps: usize,
    h_ns: f64,
    stride: usize,
}

fn make_grid(integration: &Integration, fastest: f64) -> Result<Grid> {
    let Integration {
        t_final,
        dt,
        samples,
    } = *integration;
    if !(t_final > 0.0 && dt > 0.0) || !t_final.is_finite() || !dt.is_finite() {
        return Err(Error::InvalidInput(format!(
            "t_final > 0 and dt > 0 required (t_final = {t_final}, dt = {dt})"
        )));
    }
    if samples < 2 {
        return Err(Error::InvalidInput(format!("samples >= 2 violated (samples = {samples})")));
    }
    let limit = 1.0 / (STEPS_PER_PERIOD * fastest * NS_PER_S);
    if fastest > 0.0 && dt > limit * (1.0 + 1e-9) {
        return Err(Error::InvalidInput(format!(
            "dt = {dt:e} s exceeds 1/(50·{fastest:.4} GHz) = {limit:e} s for this configuration"
        )));
    }
    let steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let stride = steps.div_ceil(samples - 1).max(1);
    Ok(Grid {
        steps,
        h_ns: t_final * NS_PER_S / steps as f64,
        stride,
    })
}

fn check_initial(psi0: &[Complex64], dim: usize) -> Result<()> {
    if psi0.len() != dim {
        return Err(Error::InvalidInput(format!(
            "initial state has {} amplitudes, expected {dim}",
            psi0.len()
        )));
    }
    let norm: f64 = psi0.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!("initial state not normalised (norm² = {norm})")));
    }
    Ok(())
}

/// Coupling term between `a` and `b`: amplitude g·X_ab rotating at ΔE_ab in the integrator frame.
struct Pair {
    a: usize,
    b: usize,
    coupling: f64,
    rotation: f64,
}

/// Right-hand side dψ/dt = −2πi·H_frame(t)·ψ with time in ns.
trait Generator {
    fn apply(&self, t_ns: f64, psi: &[Complex64], out: &mut [Complex64]);
}

/// Lab Hamiltonian in the frame rotating at the parking Duffing energies.
struct LabFrame<'a> {
    drives: Drives<'a>,
    occupation: Vec<[f64; 2]>,
    pairs: Vec<Pair>,
}

impl Generator for LabFrame<'_> {
    fn apply(&self, t_ns: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let dw = self.drives.detuning(t_ns);
        for (a, o) in out.iter_mut().enumerate() {
            let [n1, n2] = self.occupation[a];
            let e = n1 * dw[0] + n2 * dw[1];
            *o = psi[a] * Complex64::new(0.0, -TAU * e);
        }
        for p in &self.pairs {
            let c = Complex64::from_polar(p.coupling, TAU * p.rotation * t_ns);
            out[p.a] += Complex64::new(0.0, -TAU) * c * psi[p.b];
            out[p.b] += Complex64::new(0.0, -TAU) * c.conj() * psi[p.a];
        }
    }
}

/// Interaction picture with phases Θ_a(t) read from a precomputed half-step table.
struct InteractionFrame {
    occupation: Vec<[f64; 2]>,
    energies: Vec<f64>,
    pairs: Vec<Pair>,
    /// δF_i at multiples of h/2.
    phase_table: Vec<[f64; 2]>,
    half_step: f64,
}

impl InteractionFrame {
    fn theta(&self, a: usize, t_ns: f64, f: [f64; 2]) -> f64 {
        let [n1, n2] = self.occupation[a];
        TAU * (self.energies[a] * t_ns + n1 * f[0] + n2 * f[1])
    }
}

impl Generator for InteractionFrame {
    fn apply(&self, t_ns: f64, psi: &[Complex64], out: &mut [Complex64]) {
        let slot = (t_ns / self.half_step).round() as usize;
        let f = self.phase_table[slot.min(self.phase_table.len() - 1)];
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for p in &self.pairs {
            let phase = self.theta(p.a, t_ns, f) - self.theta(p.b, t_ns, f);
            let c = Complex64::from_polar(p.coupling, phase);
            out[p.a] += Complex64::new(0.0, -TAU) * c * psi[p.b];
            out[p.b] += Complex64::new(0.0, -TAU) * c.conj() * psi[p.a];
        }
    }
}

fn rk4<G: Generator>(
    generator: &G,
    grid: &Grid,
    mut psi: State,
    labels: &[String],
) -> Result<TimeTrace> {
    let dim = psi.len();
    let mut k1 = vec![Complex64::new(0.0, 0.0); dim];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let h = grid.h_ns;

    let expected = grid.steps / grid.stride + 2;
    let mut times = Vec::with_capacity(expected);
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(expected); dim];
    let mut norms = Vec::with_capacity(expected);
    let mut record = |i: usize, psi: &State| -> Result<()> {
        let mut norm = 0.0;
        for (a, z) in psi.iter().enumerate() {
            let p = z.norm_sqr();
            norm += p;
            series[a].push(p);
        }
        times.push(i as f64 * h / NS_PER_S);
        norms.push(norm);
        let drift = (norm - 1.0).abs();
        if drift > NORM_TOLERANCE || !norm.is_finite() {
            return Err(Error::StepSize {
                drift,
                dt: h / NS_PER_S,
            });
        }
        Ok(())
    };

    record(0, &psi)?;
    for i in 0..grid.steps {
        let t = i as f64 * h;
        generator.apply(t, &psi, &mut k1);
        for a in 0..dim {
            tmp[a] = psi[a] + k1[a] * (0.5 * h);
        }
        generator.apply(t + 0.5 * h, &tmp, &mut k2);
        for a in 0..dim {
            tmp[a] = psi[a] + k2[a] * (0.5 * h);
        }
        generator.apply(t + 0.5 * h, &tmp, &mut k3);
        for a in 0..dim {
            tmp[a] = psi[a] + k3[a] * h;
        }
        generator.apply(t + h, &tmp, &mut k4);
        for a in 0..dim {
            psi[a] += (k1[a] + (k2[a] + k3[a]) * 2.0 + k4[a]) * (h / 6.0);
        }
        let done = i + 1;
        if done % grid.stride == 0 || done == grid.steps {
            record(done, &psi)?;
        }
    }

    let populations = labels.iter().cloned().zip(series).collect();
    Ok(TimeTrace {
        times,
        populations,
        norm: norms,
        final_state: psi,
        final_labels: labels.to_vec(),
    })
}

/// RK4 evolution of the full Duffing Hamiltonian, sampled at up to 4001 points.
pub fn evolve(
    system: &TwoQubitSystem,
    pulse1: &FluxPulse,
    pulse2: &FluxPulse,
    psi0: &[Complex64],
    t_final: f64,
    dt: f64,
) -> Result<TimeTrace> {
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    evolve_with(
        system,
        pulse1,
        pulse2,
        psi0,
        &Integration {
            t_final,
            dt,
            samples: (steps + 1).min(DEFAULT_SAMPLES),
        },
    )
}

/// [`evolve`] with an explicit sampling density.
pub fn evolve_with(
    system: &TwoQubitSystem,
    pulse1: &FluxPulse,
    pulse2: &FluxPulse,
    psi0: &[Complex64],
    integration: &Integration,
) -> Result<TimeTrace> {
    let drives = Drives::new(system, pulse1, pulse2)?;
    check_initial(psi0, system.dim())?;
    let [w1, w2] = drives.park;
    let energies: Vec<f64> = (0..system.dim()).map(|a| system.level_energy(a, w1, w2)).collect();
    let pairs: Vec<Pair> = system
        .exchange_pairs(false)
        .into_iter()
        .map(|(a, b, x)| Pair {
            a,
            b,
            coupling: system.g * x,
            rotation: energies[a] - energies[b],
        })
        .collect();
    let fastest = pairs.iter().map(|p| p.rotation.abs()).fold(0.0, f64::max)
        + drives.max_detuning();
    let grid = make_grid(integration, fastest)?;
    let occupation = (0..system.dim())
        .map(|a| {
            let (n1, n2) = system.occupation(a);
            [n1 as f64, n2 as f64]
        })
        .collect();
    let labels: Vec<String> = (0..system.dim()).map(|a| system.label(a)).collect();
    let generator = LabFrame {
        drives,
        occupation,
        pairs,
    };
    rk4(&generator, &grid, psi0.to_vec(), &labels)
}

/// RK4 evolution of the rotating-wave interaction-picture Hamiltonian on the
/// states with at most two excitations.
pub fn evolve_interaction_picture(
    system: &TwoQubitSystem,
    pulse1: &FluxPulse,
    pulse2: &FluxPulse,
    psi0: &[Complex64],
    t_final: f64,
    dt: f64,
) -> Result<TimeTrace> {
    let steps = (t_final / dt).ceil().max(1.0) as usize;
    evolve_interaction_picture_with(
        system,
        pulse1,
        pulse2,
        psi0,
        &Integration {
            t_final,
            dt,
            samples: (steps + 1).min(DEFAULT_SAMPLES),
        },
    )
}

pub fn evolve_interaction_picture_with(
    system: &TwoQubitSystem,
    pulse1: &FluxPulse,
    pulse2: &FluxPulse,
    psi0: &[Complex64],
    integration: &Integration,
) -> Result<TimeTrace> {
    let drives = Drives::new(system, pulse1, pulse2)?;
    check_initial(psi0, system.dim())?;
    let basis: Vec<usize> = (0..system.dim())
        .filter(|&a| {
            let (n1, n2) = system.occupation(a);
            n1 + n2 <= 2
        })
        .collect();
    let outside: f64 = (0..system.dim())
        .filter(|a| !basis.contains(a))
        .map(|a| psi0[a].norm_sqr())
        .sum();
    if outside > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "initial state has weight {outside:e} outside the two-excitation subspace"
        )));
    }
    let [w1, w2] = drives.park;
    let energies: Vec<f64> = basis.iter().map(|&a| system.level_energy(a, w1, w2)).collect();
    let local = |a: usize| basis.iter().position(|&b| b == a);
    let pairs: Vec<Pair> = system
        .exchange_pairs(true)
        .into_iter()
        .filter_map(|(a, b, x)| {
            let (la, lb) = (local(a)?, local(b)?);
            Some(Pair {
                a: la,
                b: lb,
                coupling: system.g * x,
                rotation: energies[la] - energies[lb],
            })
        })
        .collect();
    let fastest = pairs.iter().map(|p| p.rotation.abs()).fold(0.0, f64::max)
        + drives.max_detuning();
    let grid = make_grid(integration, fastest)?;

    // δF_i(t) = ∫₀ᵗ δω_i by the trapezoidal rule on half steps.
    let half = 0.5 * grid.h_ns;
    let slots = 2 * grid.steps + 1;
    let mut table = Vec::with_capacity(slots);
    let mut acc = [0.0; 2];
    let mut last = drives.detuning(0.0);
    table.push(acc);
    for j in 1..slots {
        let now = drives.detuning(j as f64 * half);
        for i in 0..2 {
            acc[i] += 0.5 * half * (last[i] + now[i]);
        }
        last = now;
        table.push(acc);
    }

    let occupation = basis
        .iter()
        .map(|&a| {
            let (n1, n2) = system.occupation(a);
            [n1 as f64, n2 as f64]
        })
        .collect();
    let labels: Vec<String> = basis.iter().map(|&a| system.label(a)).collect();
    let generator = InteractionFrame {
        occupation,
        energies,
        pairs,
        phase_table: table,
        half_step: half,
    };
    let psi: State = basis.iter().map(|&a| psi0[a]).collect();
    rk4(&generator, &grid, psi, &labels)
}

/// Frame energies used by [`evolve`]: Duffing levels at the parking frequencies.
pub fn parking_frequencies(system: &TwoQubitSystem, p1: &FluxPulse, p2: &FluxPulse) -> Result<[f64; 2]> {
    if p1.phi_bar.abs() >= FLUX_LIMIT || p2.phi_bar.abs() >= FLUX_LIMIT {
        return Err(Error::Domain("parking flux outside (-0.5, 0.5)".into()));
    }
    Ok(Drives::new(system, p1, p2)?.park)
}
