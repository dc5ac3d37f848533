//! Static qubit-qubit coupling mediated by a detuned tunable coupler.

use serde::{Deserialize, Serialize};

use crate::transmon::{frequency_unchecked, qubit_frequency, TransmonParams, FLUX_LIMIT};
use crate::{Error, Result};

/// Minimum coupler detuning, in units of the qubit-coupler coupling.
const DISPERSIVE_RATIO: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplerParams {
    pub coupler_params: TransmonParams,
    pub g_1c: f64,
    pub g_2c: f64,
    pub g_12: f64,
    /// Coupler bias in Φ0.
    pub flux_c: f64,
}

impl CouplerParams {
    /// Coupler with the reference couplings (115, 78 and 7.5 MHz) and α_c = −184 MHz.
    /// E_JΣ is chosen so that 2|g̃| = 21 MHz at Φ_c = 0.093 for qubits resonant at 5.401 GHz.
    pub fn reference() -> Self {
        CouplerParams {
            coupler_params: TransmonParams {
                e_c: 0.184,
                e_j1: 13.225,
                e_j2: 13.225,
                anharmonicity: -0.184,
            },
            g_1c: 0.115,
            g_2c: 0.078,
            g_12: 0.0075,
            flux_c: 0.093,
        }
    }

    pub fn with_flux(mut self, flux_c: f64) -> Self {
        self.flux_c = flux_c;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.coupler_params.validate()?;
        if !(self.g_1c > 0.0 && self.g_2c > 0.0) {
            return Err(Error::InvalidInput(format!(
                "g_1c, g_2c > 0 violated (g_1c = {}, g_2c = {})",
                self.g_1c, self.g_2c
            )));
        }
        if !self.g_12.is_finite() {
            return Err(Error::InvalidInput("g_12 must be finite".into()));
        }
        if !self.flux_c.is_finite() || self.flux_c.abs() >= FLUX_LIMIT {
            return Err(Error::InvalidInput(format!(
                "|flux_c| < 0.5 violated (flux_c = {})",
                self.flux_c
            )));
        }
        Ok(())
    }
}

/// Effective qubit-qubit coupling g̃ in GHz, including counter-rotating terms.
pub fn coupler_mediated_coupling(omega1: f64, omega2: f64, coupler: &CouplerParams) -> Result<f64> {
    if coupler.g_1c < 0.0 || coupler.g_2c < 0.0 {
        return Err(Error::InvalidInput("coupler couplings must be >= 0".into()));
    }
    let omega_c = qubit_frequency(&coupler.coupler_params, coupler.flux_c)?;
    for (omega, g, label) in [(omega1, coupler.g_1c, 1), (omega2, coupler.g_2c, 2)] {
        if omega_c - omega < DISPERSIVE_RATIO * g || omega_c <= omega {
            return Err(Error::ModelValidity(format!(
                "coupler at {omega_c:.4} GHz is not dispersive with respect to qubit {label} at {omega:.4} GHz (g = {g})"
            )));
        }
    }
    Ok(mediated(omega1, omega2, omega_c, coupler))
}

fn mediated(omega1: f64, omega2: f64, omega_c: f64, c: &CouplerParams) -> f64 {
    let delta = 1.0 / (omega1 - omega_c) + 1.0 / (omega2 - omega_c);
    let sigma = 1.0 / (omega1 + omega_c) + 1.0 / (omega2 + omega_c);
    c.g_12 + 0.5 * c.g_1c * c.g_2c * (delta - sigma)
}

/// Coupler flux in [0, 0.5) at which g̃ changes sign, found by scan then bisection to 1e-6 Φ0.
pub fn find_zero_coupling_flux(omega1: f64, omega2: f64, coupler: &CouplerParams) -> Result<f64> {
    const SCAN: usize = 500;
    let at = |flux: f64| -> Option<f64> {
        coupler_mediated_coupling(omega1, omega2, &coupler.with_flux(flux)).ok()
    };
    let mut previous: Option<(f64, f64)> = None;
    for i in 0..SCAN {
        let flux = 0.49 * i as f64 / (SCAN - 1) as f64;
        let Some(value) = at(flux) else {
            previous = None;
            continue;
        };
        if value == 0.0 {
            return Ok(flux);
        }
        if let Some((lo_flux, lo_value)) = previous {
            if lo_value.signum() != value.signum() {
                return Ok(bisect(omega1, omega2, coupler, lo_flux, flux, lo_value));
            }
        }
        previous = Some((flux, value));
    }
    Err(Error::NoZero(format!(
        "g̃ keeps one sign over the dispersive coupler range for qubits at {omega1} and {omega2} GHz"
    )))
}

fn bisect(omega1: f64, omega2: f64, c: &CouplerParams, mut lo: f64, mut hi: f64, lo_value: f64) -> f64 {
    let value = |flux: f64| mediated(omega1, omega2, frequency_unchecked(&c.coupler_params, flux), c);
    let lo_sign = lo_value.signum();
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if value(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_coupling_only() {
        let c = CouplerParams {
            g_1c: 0.0,
            g_2c: 0.0,
            ..CouplerParams::reference()
        };
        assert_eq!(coupler_mediated_coupling(5.4, 5.3, &c).unwrap(), 0.0075);
    }

    #[test]
    fn far_coupler_decouples() {
        let mut c = CouplerParams::reference();
        c.coupler_params.e_j1 = 1e6;
        c.coupler_params.e_j2 = 1e6;
        let g = coupler_mediated_coupling(5.4, 5.4, &c).unwrap();
        assert!((g - c.g_12).abs() < 1e-4, "{g}");
    }

    #[test]
    fn reference_operating_point() {
        let g = coupler_mediated_coupling(5.401, 5.401, &CouplerParams::reference()).unwrap();
        let two_g = 2.0 * g.abs();
        assert!((two_g - 0.021).abs() < 0.3 * 0.021, "{two_g}");
    }

    #[test]
    fn non_dispersive_configuration_is_rejected() {
        let c = CouplerParams::reference().with_flux(0.3);
        assert!(matches!(
            coupler_mediated_coupling(5.401, 5.401, &c),
            Err(Error::ModelValidity(_))
        ));
    }

    #[test]
    fn no_zero_without_direct_coupling() {
        let c = CouplerParams {
            g_12: 0.0,
            ..CouplerParams::reference()
        };
        assert!(matches!(find_zero_coupling_flux(4.7, 4.7, &c), Err(Error::NoZero(_))));
    }

    #[test]
    fn zero_is_bracketed_and_accurate() {
        let c = CouplerParams::reference();
        let flux = find_zero_coupling_flux(4.7, 4.7, &c).unwrap();
        assert!(flux > 0.0 && flux < 0.49);
        let g = coupler_mediated_coupling(4.7, 4.7, &c.with_flux(flux)).unwrap();
        assert!(g.abs() < 1e-6, "{g}");
        let lo = coupler_mediated_coupling(4.7, 4.7, &c.with_flux(flux - 0.01)).unwrap();
        let hi = coupler_mediated_coupling(4.7, 4.7, &c.with_flux(flux + 0.01)).unwrap();
        assert!(lo * hi < 0.0);
    }

    #[test]
    fn coupling_monotone_between_zero_and_working_point() {
        let c = CouplerParams::reference();
        let zero = find_zero_coupling_flux(4.7, 4.7, &c).unwrap();
        let mut last = 0.0;
        for i in 1..=40 {
            let flux = zero + (0.49 - zero) * i as f64 / 40.0;
            let Ok(g) = coupler_mediated_coupling(4.7, 4.7, &c.with_flux(flux)) else {
                break;
            };
            assert!(g.abs() > last);
            last = g.abs();
        }
        assert!(last > 0.0);
    }
}
