//! Closed-form effective couplings generated by parametric flux drives.

mod bessel;
mod coupler;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use bessel::{bessel_jn, bessel_jn_derivative, MAX_ARGUMENT, MAX_ORDER};
pub use coupler::{coupler_mediated_coupling, find_zero_coupling_flux, CouplerParams};

use crate::modulation::fourier_coefficients;
use crate::transmon::{FluxPulse, TransmonParams};
use crate::{Error, Result};

/// Effective exchange coupling produced by one or two parametric drives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhaseCoupling {
    pub order: i32,
    /// Signed Bessel argument A.
    pub argument_a: f64,
    /// g·J_n(A) in GHz, signed.
    pub magnitude: f64,
    /// arg(C_φ) in radians.
    pub prefactor_phase: f64,
    /// φ_n′ for two drives, β_n for one.
    pub interaction_phase: f64,
}

impl PhaseCoupling {
    /// Splitting / exchange frequency 2|g·J_n(A)| in GHz.
    pub fn strength(&self) -> f64 {
        2.0 * self.magnitude.abs()
    }
}

/// Two drives at a common frequency acting on both qubits.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualDrive {
    /// Excursions ε_1, ε_2 in GHz.
    pub eps1: f64,
    pub eps2: f64,
    /// Physical drive frequency in GHz.
    pub omega_p: f64,
    pub phi_p1: f64,
    pub phi_p2: f64,
    /// Qubits parked at the sweet spot respond at twice the drive frequency and phase.
    pub sweet: [bool; 2],
}

impl DualDrive {
    /// Common effective drive frequency and the two effective phases.
    pub fn effective(&self) -> Result<(f64, f64, f64)> {
        let scale = |s: bool| if s { 2.0 } else { 1.0 };
        let w1 = self.omega_p * scale(self.sweet[0]);
        let w2 = self.omega_p * scale(self.sweet[1]);
        if w1 != w2 {
            return Err(Error::ResonanceMismatch(format!(
                "effective drive frequencies differ after sweet-spot doubling ({w1} vs {w2} GHz)"
            )));
        }
        Ok((
            w1,
            self.phi_p1 * scale(self.sweet[0]),
            self.phi_p2 * scale(self.sweet[1]),
        ))
    }
}

fn check_drive(omega_p: f64) -> Result<()> {
    if !(omega_p > 0.0) || !omega_p.is_finite() {
        return Err(Error::DegenerateDrive(omega_p));
    }
    Ok(())
}

fn check_excursions(eps1: f64, eps2: f64) -> Result<()> {
    if !(eps1 >= 0.0 && eps2 >= 0.0) || !eps1.is_finite() || !eps2.is_finite() {
        return Err(Error::InvalidInput(format!(
            "excursions must be finite and >= 0 (eps1 = {eps1}, eps2 = {eps2})"
        )));
    }
    Ok(())
}

fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// g·J_n(ε_p/ω_p) for a single drive.
pub fn effective_coupling_single(g: f64, eps_p: f64, omega_p: f64, n: i32) -> Result<f64> {
    check_drive(omega_p)?;
    Ok(g * bessel_jn(n, eps_p / omega_p))
}

/// Single-drive coupling record including β_n = n(φ_p + π) + (ε/ω) sin φ_p.
pub fn single_drive_coupling(
    g: f64,
    eps_p: f64,
    omega_p: f64,
    phi_p: f64,
    n: i32,
) -> Result<PhaseCoupling> {
    check_drive(omega_p)?;
    let z = eps_p / omega_p;
    Ok(PhaseCoupling {
        order: n,
        argument_a: z,
        magnitude: g * bessel_jn(n, z),
        prefactor_phase: z * phi_p.sin(),
        interaction_phase: n as f64 * (phi_p + PI) + z * phi_p.sin(),
    })
}

/// Signed Bessel argument of the dual-drive coupling.
pub fn bessel_argument_a(eps1: f64, eps2: f64, omega_p: f64, dphi: f64) -> Result<f64> {
    check_drive(omega_p)?;
    check_excursions(eps1, eps2)?;
    Ok(signed_a(eps1 / omega_p, eps2 / omega_p, dphi))
}

fn signed_a(a: f64, b: f64, dphi: f64) -> f64 {
    let (s, c) = dphi.sin_cos();
    sgn(-(0.5 * dphi).sin()) * (a - b * c).hypot(b * s)
}

/// Auxiliary phase φ entering φ_n′, chosen so that
/// A·sin(θ + (φ1 + π + φ2)/2 + φ) = b·sin(θ + φ2) − a·sin(θ + φ1) holds exactly.
fn auxiliary_phase(a: f64, b: f64, dphi: f64, big_a: f64) -> f64 {
    if big_a == 0.0 {
        return 0.0;
    }
    let (s, c) = (0.5 * dphi).sin_cos();
    ((a - b) * c / big_a).atan2((a + b) * s / big_a)
}

/// Dual-drive coupling with the first drive at phase 0 and the second at `dphi`.
pub fn phase_coupling(
    g: f64,
    eps1: f64,
    eps2: f64,
    omega_p: f64,
    dphi: f64,
    n: i32,
    sweet_spot: [bool; 2],
) -> Result<PhaseCoupling> {
    phase_coupling_dual(
        g,
        &DualDrive {
            eps1,
            eps2,
            omega_p,
            phi_p1: 0.0,
            phi_p2: dphi,
            sweet: sweet_spot,
        },
        n,
    )
}

/// Dual-drive coupling for arbitrary absolute drive phases.
pub fn phase_coupling_dual(g: f64, drive: &DualDrive, n: i32) -> Result<PhaseCoupling> {
    check_drive(drive.omega_p)?;
    check_excursions(drive.eps1, drive.eps2)?;
    let (w, phi1, phi2) = drive.effective()?;
    let a = drive.eps1 / w;
    let b = drive.eps2 / w;
    let dphi = phi2 - phi1;
    let big_a = signed_a(a, b, dphi);
    let varphi = auxiliary_phase(a, b, dphi, big_a);
    Ok(PhaseCoupling {
        order: n,
        argument_a: big_a,
        magnitude: g * bessel_jn(n, big_a),
        prefactor_phase: a * phi1.sin() - b * phi2.sin(),
        interaction_phase: n as f64 * (0.5 * (phi1 + PI + phi2) + varphi),
    })
}

/// |d(g·J_n(A))/dδφ| in GHz per radian.
pub fn phase_sensitivity(
    g: f64,
    eps1: f64,
    eps2: f64,
    omega_p: f64,
    dphi: f64,
    n: i32,
) -> Result<f64> {
    check_drive(omega_p)?;
    check_excursions(eps1, eps2)?;
    let a = eps1 / omega_p;
    let b = eps2 / omega_p;
    let big_a = signed_a(a, b, dphi);
    let dj = bessel_jn(n - 1, big_a) - bessel_jn(n + 1, big_a);
    if big_a == 0.0 {
        // A vanishes only for a = b at δφ ≡ 0; there ab·sinδφ/A → −b·cos(δφ/2).
        return Ok((0.5 * g * dj * b * (0.5 * dphi).cos()).abs());
    }
    Ok((0.5 * g * dj * a * b * dphi.sin() / big_a).abs())
}

/// Coupling fluctuation caused by a phase jitter.
pub fn jitter_fluctuation(sensitivity: f64, jitter: f64) -> Result<f64> {
    if !(jitter >= 0.0) {
        return Err(Error::InvalidInput(format!("jitter >= 0 violated (jitter = {jitter})")));
    }
    Ok(sensitivity * jitter)
}

/// 1/f dephasing rate λ·|∂ω̄/∂Φ̃|·A_ac in 1/µs.
pub fn dephasing_rate(
    lambda: f64,
    params: &TransmonParams,
    pulse: &FluxPulse,
    a_ac: f64,
) -> Result<f64> {
    if !(a_ac >= 0.0) {
        return Err(Error::InvalidInput(format!("a_ac >= 0 violated (a_ac = {a_ac})")));
    }
    if a_ac == 0.0 {
        return Ok(0.0);
    }
    let h = 1e-4;
    let average = |phi_tilde: f64| -> Result<f64> {
        let p = pulse.with_amplitude(phi_tilde.abs()).with_frequency(pulse.omega_p.max(1e-3));
        Ok(fourier_coefficients(params, &p, 2)?.omega_bar)
    };
    let slope = (average(pulse.phi_tilde + h)? - average(pulse.phi_tilde - h)?) / (2.0 * h);
    // GHz (cycles) → angular rate per µs
    Ok(lambda * slope.abs() * a_ac * 2.0 * PI * 1e3)
}
