//! Flux-to-frequency map of a symmetric-SQUID transmon and the frequency
//! trace it produces under a sinusoidal flux pulse.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, NS_PER_S};

/// Largest |flux| (in Φ0) accepted anywhere in the crate.
pub const FLUX_LIMIT: f64 = 0.5;

/// Highest derivative order supported by [`dfreq_dflux`].
pub const MAX_DERIVATIVE_ORDER: u32 = 10;

/// Energies of one flux-tunable transmon, all as E/h in GHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransmonParams {
    pub e_c: f64,
    pub e_j1: f64,
    pub e_j2: f64,
    /// Signed anharmonicity α/2π; negative for a transmon.
    pub anharmonicity: f64,
}

impl TransmonParams {
    pub fn new(e_c: f64, e_j1: f64, e_j2: f64, anharmonicity: f64) -> Result<Self> {
        let p = TransmonParams {
            e_c,
            e_j1,
            e_j2,
            anharmonicity,
        };
        p.validate()?;
        Ok(p)
    }

    /// Q1 of the reference device: 5.477 GHz at the sweet spot.
    pub fn paper_q1() -> Self {
        // E_JΣ = (5.477 + 0.24)² / (8 · 0.24)
        let e_j = (5.477_f64 + 0.24).powi(2) / (8.0 * 0.24) / 2.0;
        TransmonParams {
            e_c: 0.240,
            e_j1: e_j,
            e_j2: e_j,
            anharmonicity: -0.248,
        }
    }

    /// Q2 of the reference device: E_C = 240 MHz, E_J1 = E_J2 = 8.286 GHz.
    pub fn paper_q2() -> Self {
        TransmonParams {
            e_c: 0.240,
            e_j1: 8.286,
            e_j2: 8.286,
            anharmonicity: -0.248,
        }
    }

    pub fn e_j_sum(&self) -> f64 {
        self.e_j1 + self.e_j2
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.e_c, self.e_j1, self.e_j2, self.anharmonicity]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("transmon energies must be finite".into()));
        }
        if self.e_c <= 0.0 {
            return Err(Error::InvalidInput(format!("e_c > 0 violated (e_c = {})", self.e_c)));
        }
        if self.e_j1 <= 0.0 || self.e_j2 <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "e_j1, e_j2 > 0 violated (e_j1 = {}, e_j2 = {})",
                self.e_j1, self.e_j2
            )));
        }
        if self.e_j_sum() / self.e_c <= 20.0 {
            return Err(Error::InvalidInput(format!(
                "(e_j1 + e_j2) / e_c > 20 violated (ratio = {:.3})",
                self.e_j_sum() / self.e_c
            )));
        }
        if self.anharmonicity >= 0.0 {
            return Err(Error::InvalidInput(format!(
                "anharmonicity < 0 violated (anharmonicity = {})",
                self.anharmonicity
            )));
        }
        Ok(())
    }

    fn plasma_scale(&self) -> f64 {
        8.0 * self.e_c * self.e_j_sum()
    }
}

/// One parametric flux drive Φ(t) = Φ̄ + Φ̃ cos(2π f_p t + φ_p).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FluxPulse {
    /// Parking flux in Φ0.
    pub phi_bar: f64,
    /// Modulation amplitude in Φ0.
    pub phi_tilde: f64,
    /// Drive frequency ω_p/2π in GHz.
    pub omega_p: f64,
    /// Drive phase in radians.
    pub phi_p: f64,
}

impl FluxPulse {
    pub fn new(phi_bar: f64, phi_tilde: f64, omega_p: f64, phi_p: f64) -> Result<Self> {
        let p = FluxPulse {
            phi_bar,
            phi_tilde,
            omega_p,
            phi_p,
        };
        p.validate()?;
        Ok(p)
    }

    /// A static bias with no modulation.
    pub fn dc(phi_bar: f64) -> Self {
        FluxPulse {
            phi_bar,
            phi_tilde: 0.0,
            omega_p: 0.0,
            phi_p: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.phi_bar, self.phi_tilde, self.omega_p, self.phi_p]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(Error::InvalidInput("flux pulse fields must be finite".into()));
        }
        if self.phi_tilde < 0.0 {
            return Err(Error::InvalidInput(format!(
                "phi_tilde >= 0 violated (phi_tilde = {})",
                self.phi_tilde
            )));
        }
        if self.phi_bar.abs() + self.phi_tilde >= FLUX_LIMIT {
            return Err(Error::InvalidInput(format!(
                "|phi_bar| + phi_tilde < 0.5 violated (|{}| + {} = {})",
                self.phi_bar,
                self.phi_tilde,
                self.phi_bar.abs() + self.phi_tilde
            )));
        }
        if self.omega_p < 0.0 {
            return Err(Error::InvalidInput(format!(
                "omega_p >= 0 violated (omega_p = {})",
                self.omega_p
            )));
        }
        Ok(())
    }

    /// Drive phase θ(t) = 2π f_p t + φ_p at time `t` in seconds.
    pub fn drive_phase(&self, t: f64) -> f64 {
        TAU * self.omega_p * (t * NS_PER_S) + self.phi_p
    }

    /// Instantaneous flux at time `t` in seconds.
    pub fn flux_at(&self, t: f64) -> f64 {
        self.phi_bar + self.phi_tilde * self.drive_phase(t).cos()
    }

    pub fn with_phase(mut self, phi_p: f64) -> Self {
        self.phi_p = phi_p;
        self
    }

    pub fn with_amplitude(mut self, phi_tilde: f64) -> Self {
        self.phi_tilde = phi_tilde;
        self
    }

    pub fn with_frequency(mut self, omega_p: f64) -> Self {
        self.omega_p = omega_p;
        self
    }
}

/// 0→1 transition frequency in GHz of a symmetric-SQUID transmon at `flux` (Φ0).
pub fn qubit_frequency(params: &TransmonParams, flux: f64) -> Result<f64> {
    if !flux.is_finite() || flux.abs() >= FLUX_LIMIT {
        return Err(Error::Domain(format!(
            "flux {flux} outside the open interval (-0.5, 0.5) Φ0"
        )));
    }
    Ok(frequency_unchecked(params, flux))
}

#[inline]
pub(crate) fn frequency_unchecked(params: &TransmonParams, flux: f64) -> f64 {
    (params.plasma_scale() * (PI * flux).cos().abs()).sqrt() - params.e_c
}

/// Same dispersion continued to complex flux; valid inside |Re z| < 0.5 where cos > 0.
fn frequency_complex(params: &TransmonParams, flux: Complex64) -> Complex64 {
    (params.plasma_scale() * (flux * PI).cos()).sqrt() - params.e_c
}

/// Non-negative bias at which the unmodulated qubit sits at `frequency` GHz.
pub fn bias_for_frequency(params: &TransmonParams, frequency: f64) -> Result<f64> {
    let mut c = (frequency + params.e_c).powi(2) / params.plasma_scale();
    if c > 1.0 && c < 1.0 + 1e-12 {
        c = 1.0;
    }
    if !(c > 0.0 && c <= 1.0) || frequency + params.e_c <= 0.0 {
        return Err(Error::NoSolution(format!(
            "frequency {frequency} GHz is outside the tunable band of this transmon"
        )));
    }
    Ok(c.acos() / PI)
}

/// Samples ω(Φ(t)) on `t_grid` (seconds).
pub fn frequency_trace(
    params: &TransmonParams,
    pulse: &FluxPulse,
    t_grid: &[f64],
) -> Result<Vec<f64>> {
    if pulse.phi_tilde < 0.0 || !pulse.phi_tilde.is_finite() || pulse.omega_p < 0.0 {
        pulse.validate()?;
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("time grid must be strictly increasing".into()));
    }
    t_grid
        .iter()
        .map(|&t| {
            let flux = pulse.flux_at(t);
            if flux.abs() >= FLUX_LIMIT {
                return Err(Error::Domain(format!(
                    "instantaneous flux {flux:.6} Φ0 at t = {t:e} s leaves (-0.5, 0.5)"
                )));
            }
            Ok(frequency_unchecked(params, flux))
        })
        .collect()
}

/// `order`-th flux derivative of [`qubit_frequency`] in GHz/Φ0^order.
///
/// Evaluated with a Cauchy contour integral on a circle of radius half the
/// distance to the flux-domain edge; the trapezoidal rule on that circle
/// converges geometrically and stays well conditioned up to order 10.
pub fn dfreq_dflux(params: &TransmonParams, flux: f64, order: u32) -> Result<f64> {
    if order == 0 || order > MAX_DERIVATIVE_ORDER {
        return Err(Error::InvalidInput(format!(
            "derivative order must be in 1..={MAX_DERIVATIVE_ORDER}, got {order}"
        )));
    }
    if !flux.is_finite() || flux.abs() >= FLUX_LIMIT {
        return Err(Error::Domain(format!(
            "derivative stencil around {flux} leaves the flux domain"
        )));
    }
    let radius = 0.5 * (FLUX_LIMIT - flux.abs());
    if radius < 1e-6 {
        return Err(Error::Domain(format!(
            "derivative stencil around {flux} leaves the flux domain"
        )));
    }
    const NODES: usize = 96;
    let n = order as i32;
    let sum: Complex64 = (0..NODES)
        .map(|j| {
            let theta = TAU * j as f64 / NODES as f64;
            let w = Complex64::from_polar(1.0, theta);
            frequency_complex(params, flux + w * radius) * Complex64::from_polar(1.0, -(n as f64) * theta)
        })
        .sum();
    let factorial: f64 = (1..=order).map(f64::from).product();
    Ok(sum.re / NODES as f64 * factorial / radius.powi(n))
}
