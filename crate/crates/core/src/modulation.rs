//! Harmonic decomposition of a flux-modulated qubit frequency.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::coupling::bessel_jn;
use crate::transmon::{dfreq_dflux, frequency_trace, frequency_unchecked, qubit_frequency};
use crate::transmon::{FluxPulse, TransmonParams, FLUX_LIMIT, MAX_DERIVATIVE_ORDER};
use crate::{Error, Result, NS_PER_S};

/// Bias below which a pulse counts as sitting on the sweet spot.
pub const SWEET_SPOT_TOLERANCE: f64 = 1e-9;

const MIN_INTERVALS: usize = 4096;
const MAX_INTERVALS: usize = 1 << 20;
const QUADRATURE_TOLERANCE: f64 = 1e-9;

/// ω(t) = f_0 + Σ_k f_k cos(k·θ(t)) with θ the drive phase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulationProfile {
    pub omega_bar: f64,
    pub excursion: f64,
    /// Signed cosine amplitudes (k, f_k), starting at k = 0.
    pub fourier: Vec<(u32, f64)>,
    pub base_harmonic: u32,
}

impl ModulationProfile {
    fn from_coefficients(coefficients: Vec<f64>, base_harmonic: u32) -> Self {
        let excursion = coefficients
            .get(base_harmonic as usize)
            .copied()
            .unwrap_or(0.0)
            .abs();
        ModulationProfile {
            omega_bar: coefficients[0],
            excursion,
            fourier: coefficients
                .into_iter()
                .enumerate()
                .map(|(k, f)| (k as u32, f))
                .collect(),
            base_harmonic,
        }
    }

    /// Signed amplitude of harmonic `k` (0 if not tabulated).
    pub fn coefficient(&self, k: u32) -> f64 {
        self.fourier
            .iter()
            .find(|(m, _)| *m == k)
            .map_or(0.0, |(_, f)| *f)
    }

    /// Signed amplitude of the base harmonic.
    pub fn signed_excursion(&self) -> f64 {
        self.coefficient(self.base_harmonic)
    }

    /// Reconstructed frequency at drive phase θ.
    pub fn at_phase(&self, theta: f64) -> f64 {
        self.fourier
            .iter()
            .map(|&(k, f)| f * (k as f64 * theta).cos())
            .sum()
    }

    /// Reconstructed frequency at time `t` (seconds) under `pulse`.
    pub fn at_time(&self, pulse: &FluxPulse, t: f64) -> f64 {
        self.at_phase(pulse.drive_phase(t))
    }
}

/// Bessel-weighted sideband peaks of a modulated qubit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SidebandSpectrum {
    /// (frequency in GHz, weight).
    pub peaks: Vec<(f64, f64)>,
    pub n_min: i32,
    pub n_max: i32,
}

pub fn base_harmonic(phi_bar: f64) -> u32 {
    if phi_bar.abs() < SWEET_SPOT_TOLERANCE {
        2
    } else {
        1
    }
}

/// Fourier coefficients f_0..f_{k_max} of ω(θ) = ω(Φ̄ + Φ̃ cos θ).
pub fn fourier_coefficients(
    params: &TransmonParams,
    pulse: &FluxPulse,
    k_max: u32,
) -> Result<ModulationProfile> {
    if !(pulse.omega_p > 0.0) {
        return Err(Error::DegenerateDrive(pulse.omega_p));
    }
    if k_max < 2 {
        return Err(Error::InvalidInput(format!("k_max >= 2 violated (k_max = {k_max})")));
    }
    pulse.validate()?;
    let coefficients = converged_coefficients(params, pulse.phi_bar, pulse.phi_tilde, k_max)?;
    Ok(ModulationProfile::from_coefficients(
        coefficients,
        base_harmonic(pulse.phi_bar),
    ))
}

fn converged_coefficients(
    params: &TransmonParams,
    phi_bar: f64,
    phi_tilde: f64,
    k_max: u32,
) -> Result<Vec<f64>> {
    let mut intervals = MIN_INTERVALS;
    let mut previous = simpson_coefficients(params, phi_bar, phi_tilde, k_max, intervals);
    while intervals < MAX_INTERVALS {
        intervals *= 2;
        let next = simpson_coefficients(params, phi_bar, phi_tilde, k_max, intervals);
        let change = previous
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        previous = next;
        if change < QUADRATURE_TOLERANCE {
            return Ok(previous);
        }
    }
    Err(Error::Numeric(format!(
        "Fourier quadrature did not converge with {MAX_INTERVALS} intervals per period"
    )))
}

/// Composite Simpson over θ ∈ [0, 2π] of cos(kθ)·ω(θ)/(π(1 + δ_k0)).
fn simpson_coefficients(
    params: &TransmonParams,
    phi_bar: f64,
    phi_tilde: f64,
    k_max: u32,
    intervals: usize,
) -> Vec<f64> {
    let h = TAU / intervals as f64;
    let samples: Vec<(f64, f64)> = (0..=intervals)
        .map(|i| {
            let theta = i as f64 * h;
            let weight = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let omega = frequency_unchecked(params, phi_bar + phi_tilde * theta.cos());
            (theta, weight * omega)
        })
        .collect();
    (0..=k_max)
        .map(|k| {
            let sum: f64 = samples
                .iter()
                .map(|&(theta, w)| w * (k as f64 * theta).cos())
                .sum();
            let norm = if k == 0 { 2.0 * PI } else { PI };
            sum * h / 3.0 / norm
        })
        .collect()
}

/// Time-averaged frequency for a bias/amplitude pair.
pub(crate) fn average_frequency(params: &TransmonParams, phi_bar: f64, phi_tilde: f64) -> Result<f64> {
    Ok(converged_coefficients(params, phi_bar, phi_tilde, 2)?[0])
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Harmonic amplitudes from the power-reduced Taylor series of ω(Φ̄ + Φ̃ cos θ) truncated at `order`.
pub fn taylor_harmonics(
    params: &TransmonParams,
    pulse: &FluxPulse,
    order: u32,
) -> Result<ModulationProfile> {
    if order == 0 || order > MAX_DERIVATIVE_ORDER {
        return Err(Error::InvalidInput(format!(
            "1 <= order <= {MAX_DERIVATIVE_ORDER} violated (order = {order})"
        )));
    }
    pulse.validate()?;
    let derivatives = (1..=order)
        .map(|n| dfreq_dflux(params, pulse.phi_bar, n))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Numeric(format!("Taylor derivative failed: {e}")))?;
    let mut coefficients = vec![0.0; order.max(2) as usize + 1];
    coefficients[0] = qubit_frequency(params, pulse.phi_bar)?;
    for n in 1..=order {
        // Φ̃ⁿ cosⁿθ = Φ̃ⁿ/2ⁿ · Σ_j C(n, j) cos((n − 2j)θ)
        let scale = pulse.phi_tilde.powi(n as i32) / (2f64.powi(n as i32) * factorial(n))
            * derivatives[n as usize - 1];
        for m in (n % 2..=n).step_by(2) {
            let weight = binomial(n, (n - m) / 2);
            coefficients[m as usize] += if m == 0 { weight } else { 2.0 * weight } * scale;
        }
    }
    Ok(ModulationProfile::from_coefficients(
        coefficients,
        base_harmonic(pulse.phi_bar),
    ))
}

/// Mean |approx(t) − ω(Φ(t))| over one drive period sampled at 2000 points.
pub fn average_deviation(
    approx: impl Fn(f64) -> f64,
    params: &TransmonParams,
    pulse: &FluxPulse,
) -> Result<f64> {
    if !(pulse.omega_p > 0.0) {
        return Err(Error::DegenerateDrive(pulse.omega_p));
    }
    const POINTS: usize = 2000;
    let period = 1.0 / (pulse.omega_p * NS_PER_S);
    let grid: Vec<f64> = (0..POINTS).map(|i| period * i as f64 / POINTS as f64).collect();
    let exact = frequency_trace(params, pulse, &grid)?;
    let total: f64 = grid
        .iter()
        .zip(&exact)
        .map(|(&t, &w)| (approx(t) - w).abs())
        .sum();
    Ok(total / POINTS as f64)
}

/// Peaks at ω̄ + k·(base·ω_p) weighted by J_k(ε_p/(base·ω_p))².
pub fn sideband_spectrum(
    profile: &ModulationProfile,
    pulse: &FluxPulse,
    n_max: u32,
) -> Result<SidebandSpectrum> {
    if !(pulse.omega_p > 0.0) {
        return Err(Error::DegenerateDrive(pulse.omega_p));
    }
    if n_max == 0 {
        return Err(Error::InvalidInput("n_max >= 1 violated".into()));
    }
    let spacing = profile.base_harmonic as f64 * pulse.omega_p;
    let z = profile.excursion / spacing;
    let n = n_max as i32;
    let peaks = (-n..=n)
        .map(|k| (profile.omega_bar + k as f64 * spacing, bessel_jn(k, z).powi(2)))
        .collect();
    Ok(SidebandSpectrum {
        peaks,
        n_min: -n,
        n_max: n,
    })
}

/// Modulation amplitude whose dc shift ω̄ − ω(Φ̄) equals `observed_dc_shift`.
///
/// The shift is strictly decreasing in Φ̃ because the dispersion is concave,
/// so a bisection on Φ̃ is exact up to the quadrature tolerance.
pub fn excursion_from_shift(
    params: &TransmonParams,
    phi_bar: f64,
    omega_p: f64,
    observed_dc_shift: f64,
) -> Result<f64> {
    if !(omega_p > 0.0) {
        return Err(Error::DegenerateDrive(omega_p));
    }
    if !phi_bar.is_finite() || phi_bar.abs() >= FLUX_LIMIT {
        return Err(Error::Domain(format!("bias {phi_bar} outside (-0.5, 0.5)")));
    }
    if !observed_dc_shift.is_finite() || observed_dc_shift > 0.0 {
        return Err(Error::NoSolution(format!(
            "dc shift {observed_dc_shift} GHz is positive; modulation only lowers the average frequency"
        )));
    }
    if observed_dc_shift == 0.0 {
        return Ok(0.0);
    }
    let static_frequency = qubit_frequency(params, phi_bar)?;
    let shift = |phi_tilde: f64| -> Result<f64> {
        Ok(average_frequency(params, phi_bar, phi_tilde)? - static_frequency)
    };
    let mut lo = 0.0;
    let mut hi = FLUX_LIMIT - phi_bar.abs() - 1e-6;
    if shift(hi)? > observed_dc_shift {
        return Err(Error::NoSolution(format!(
            "dc shift {observed_dc_shift} GHz is beyond the largest achievable shift at bias {phi_bar}"
        )));
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if shift(mid)? > observed_dc_shift {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
