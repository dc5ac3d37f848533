//! Virtual experiments: parameter sweeps that combine the analytic couplings
//! with time-domain simulations and fits, returned as [`SweepGrid`] tables.

mod amplitude;
mod chevron;
mod coupler;
pub mod design;
mod phase;
mod resonance;
mod runner;
mod spectroscopy;
mod spectrum;
mod taylor;
mod transfer;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use amplitude::run_amplitude_coupling;
pub use chevron::run_chevron;
pub use coupler::run_coupler_sweep;
pub use phase::run_phase_sweep;
pub use resonance::run_parametric_resonance;
pub use runner::Runner;
pub use spectroscopy::run_spectroscopy;
pub use spectrum::run_spectrum;
pub use taylor::run_taylor_fourier;
pub use transfer::run_transfer_calibration;

use crate::coupling::CouplerParams;
use crate::dynamics::{
    evolve_interaction_picture_with, evolve_with, fit_damped_cosine, DampedCosine, Integration,
    TimeTrace, TwoQubitSystem,
};
use crate::transmon::FluxPulse;
use crate::{Error, Result};

/// Name of the tool written into every output header.
pub const TOOL_NAME: &str = "phasemod";

/// One extracted value per sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub x: f64,
    pub value: f64,
    /// Residual RMS of the fit that produced `value`, or 0 for closed-form values.
    pub uncertainty: f64,
    /// Analytic or nominal value to compare against.
    pub reference: Option<f64>,
    /// Set when the extraction failed or is unreliable.
    pub flagged: bool,
    /// Values for the grid's `summary_columns`, in order.
    pub extra: Vec<f64>,
}

impl SummaryRow {
    pub fn new(x: f64, value: f64) -> Self {
        SummaryRow {
            x,
            value,
            uncertainty: 0.0,
            reference: None,
            flagged: false,
            extra: Vec::new(),
        }
    }
}

/// Two-dimensional sweep result: `z[i][j]` belongs to `x[i]`, `y[j]`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SweepGrid {
    pub x_name: String,
    pub y_name: String,
    pub z_name: String,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    pub summary: Vec<SummaryRow>,
    /// Names of the additional summary columns.
    pub summary_columns: Vec<String>,
    pub metadata: BTreeMap<String, String>,
}

impl SweepGrid {
    pub fn new(x_name: &str, y_name: &str, z_name: &str) -> Self {
        SweepGrid {
            x_name: x_name.into(),
            y_name: y_name.into(),
            z_name: z_name.into(),
            ..SweepGrid::default()
        }
    }

    pub fn check_shape(&self) -> Result<()> {
        if self.z.len() != self.x.len() || self.z.iter().any(|row| row.len() != self.y.len()) {
            return Err(Error::Numeric(format!(
                "grid z is not {}x{}",
                self.x.len(),
                self.y.len()
            )));
        }
        if self.summary.iter().any(|r| r.extra.len() != self.summary_columns.len()) {
            return Err(Error::Numeric("summary rows do not match summary columns".into()));
        }
        Ok(())
    }

    fn stamp(&mut self, cfg: &ExperimentConfig, experiment: &str) {
        self.metadata.insert("experiment".into(), experiment.into());
        self.metadata.insert("config_hash".into(), cfg.hash());
        self.metadata.insert("tool".into(), TOOL_NAME.into());
        self.metadata.insert("version".into(), env!("CARGO_PKG_VERSION").into());
        self.metadata.insert("config".into(), crate::io::canonical_toml(cfg));
    }
}

/// Swept parameter of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Phase of drive 2 relative to drive 1, radians.
    Dphi,
    /// Common drive frequency, GHz.
    OmegaP,
    PhiTilde1,
    PhiTilde2,
    /// Coupler bias, Φ0.
    FluxC,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Dphi => "dphi [rad]",
            Axis::OmegaP => "omega_p [GHz]",
            Axis::PhiTilde1 => "phi_tilde1 [Phi0]",
            Axis::PhiTilde2 => "phi_tilde2 [Phi0]",
            Axis::FluxC => "flux_c [Phi0]",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: Axis,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepSpec {
    pub fn values(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// How the drive is brought onto the sideband resonance Δ̄ + n·ω_eff = 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Retune {
    /// Use the configured values; they must already be resonant.
    #[default]
    None,
    /// Set the drive frequency to −Δ̄/n.
    OmegaP,
    /// Move the bias of qubit 2 until ω̄2 = ω̄1 − n·ω_eff.
    PhiBar2,
    /// Change the modulation amplitude of qubit 2 until ω̄2 = ω̄1 − n·ω_eff.
    PhiTilde2,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceSpec {
    pub order: i32,
    #[serde(default)]
    pub retune: Retune,
}

impl Default for ResonanceSpec {
    fn default() -> Self {
        ResonanceSpec {
            order: 1,
            retune: Retune::None,
        }
    }
}

/// Probe-frequency grid of the analytic spectra, GHz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

/// Frame used by the time-domain simulations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    /// Full Duffing Hamiltonian including counter-rotating terms.
    #[default]
    Lab,
    /// Rotating-wave interaction picture, two-excitation subspace.
    Interaction,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisSpec {
    pub frame: Frame,
    /// Peak-to-peak |10⟩ population below which no oscillation is reported.
    pub min_contrast: f64,
    /// Highest Fourier harmonic evaluated.
    pub k_max: u32,
    /// Sidebands on each side in spectra.
    pub n_max: u32,
    /// Coarse resonance scan of the amplitude experiment.
    pub scan_points: usize,
    /// Half-width of that scan, GHz.
    pub scan_span: f64,
    /// Cross-check coupler couplings with a two-level simulation.
    pub dynamics_check: bool,
    pub probe: Option<ProbeSpec>,
    /// Reference coupling strength 2g, GHz, and the bias at which it applies.
    pub reference_two_g: f64,
    pub reference_flux_c: f64,
    /// Relative deviation beyond which a summary row is flagged.
    pub tolerance: f64,
}

impl Default for AnalysisSpec {
    fn default() -> Self {
        AnalysisSpec {
            frame: Frame::Lab,
            min_contrast: 0.02,
            k_max: 12,
            n_max: 4,
            scan_points: 21,
            scan_span: 0.02,
            dynamics_check: false,
            probe: None,
            reference_two_g: 0.021,
            reference_flux_c: 0.093,
            tolerance: 0.05,
        }
    }
}

/// Complete description of one experiment; output is a pure function of it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub system: TwoQubitSystem,
    pub pulse1: FluxPulse,
    pub pulse2: FluxPulse,
    #[serde(default)]
    pub resonance: ResonanceSpec,
    pub sweep: SweepSpec,
    pub time: Integration,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupler: Option<CouplerParams>,
    #[serde(default)]
    pub analysis: AnalysisSpec,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let cfg_err = |field: &str, e: Error| Error::config(field, e.to_string());
        self.system.validate().map_err(|e| cfg_err("system", e))?;
        self.pulse1.validate().map_err(|e| cfg_err("pulse1", e))?;
        self.pulse2.validate().map_err(|e| cfg_err("pulse2", e))?;
        if let Some(c) = &self.coupler {
            c.validate().map_err(|e| cfg_err("coupler", e))?;
        }
        let s = &self.sweep;
        if !s.start.is_finite() || !s.stop.is_finite() {
            return Err(Error::config("sweep", "start and stop must be finite"));
        }
        if s.points == 0 {
            return Err(Error::config("sweep.points", "points >= 1"));
        }
        for v in s.values() {
            self.at(v).map_err(|e| cfg_err("sweep", e))?;
        }
        let t = &self.time;
        if !(t.t_final > 0.0 && t.dt > 0.0 && t.dt <= t.t_final) {
            return Err(Error::config("time", "0 < dt <= t_final"));
        }
        if t.samples < 2 {
            return Err(Error::config("time.samples", "samples >= 2"));
        }
        let a = &self.analysis;
        if a.k_max < 2 {
            return Err(Error::config("analysis.k_max", "k_max >= 2"));
        }
        if !(a.min_contrast >= 0.0 && a.min_contrast < 1.0) {
            return Err(Error::config("analysis.min_contrast", "0 <= min_contrast < 1"));
        }
        if a.n_max < 1 {
            return Err(Error::config("analysis.n_max", "n_max >= 1"));
        }
        if a.scan_points < 3 || !(a.scan_span > 0.0) {
            return Err(Error::config("analysis.scan_points", "scan_points >= 3 and scan_span > 0"));
        }
        if let Some(p) = a.probe {
            if p.points < 2 || !(p.stop > p.start) {
                return Err(Error::config("analysis.probe", "points >= 2 and stop > start"));
            }
        }
        Ok(())
    }

    /// Pulses and coupler at sweep value `v`.
    pub fn at(&self, v: f64) -> Result<Point> {
        let mut p = Point {
            pulse1: self.pulse1,
            pulse2: self.pulse2,
            coupler: self.coupler,
        };
        match self.sweep.axis {
            Axis::Dphi => p.pulse2.phi_p = self.pulse1.phi_p + v,
            Axis::OmegaP => {
                p.pulse1.omega_p = v;
                p.pulse2.omega_p = v;
            }
            Axis::PhiTilde1 => p.pulse1.phi_tilde = v,
            Axis::PhiTilde2 => p.pulse2.phi_tilde = v,
            Axis::FluxC => {
                let c = p.coupler.as_mut().ok_or_else(|| {
                    Error::config("coupler", "required when sweeping flux_c")
                })?;
                c.flux_c = v;
                c.validate()?;
            }
        }
        p.pulse1.validate()?;
        p.pulse2.validate()?;
        Ok(p)
    }

    /// Hex SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        crate::io::config_hash(self)
    }
}

/// Per-point drive settings produced by [`ExperimentConfig::at`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub pulse1: FluxPulse,
    pub pulse2: FluxPulse,
    pub coupler: Option<CouplerParams>,
}

impl Point {
    /// Index (0 or 1) of the first modulated qubit.
    pub fn driven(&self) -> Result<usize> {
        if self.pulse1.phi_tilde > 0.0 {
            Ok(0)
        } else if self.pulse2.phi_tilde > 0.0 {
            Ok(1)
        } else {
            Err(Error::config("pulse1.phi_tilde", "at least one pulse must be modulated"))
        }
    }

    pub fn pulse(&self, i: usize) -> &FluxPulse {
        if i == 0 {
            &self.pulse1
        } else {
            &self.pulse2
        }
    }
}

/// Evolve |10⟩ under the point's drives in the configured frame.
pub(crate) fn simulate(cfg: &ExperimentConfig, system: &TwoQubitSystem, p: &Point) -> Result<TimeTrace> {
    let psi0 = system.basis_state("10")?;
    match cfg.analysis.frame {
        Frame::Lab => evolve_with(system, &p.pulse1, &p.pulse2, &psi0, &cfg.time),
        Frame::Interaction => {
            evolve_interaction_picture_with(system, &p.pulse1, &p.pulse2, &psi0, &cfg.time)
        }
    }
}

/// Damped-cosine fit of the |10⟩ population; flat traces give `NoOscillation`.
pub(crate) fn fit_exchange(cfg: &ExperimentConfig, trace: &TimeTrace) -> Result<DampedCosine> {
    let p10 = trace.population("10")?;
    let (lo, hi) = p10
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if hi - lo < cfg.analysis.min_contrast {
        return Err(Error::NoOscillation(format!(
            "|10> population varies by only {:.2e}",
            hi - lo
        )));
    }
    fit_damped_cosine(&trace.times, p10)
}

/// Summary row of an exchange fit; no oscillation gives a flagged zero.
pub(crate) fn exchange_row(x: f64, fit: Result<DampedCosine>) -> Result<SummaryRow> {
    match fit {
        Ok(f) => {
            let mut row = SummaryRow::new(x, f.frequency);
            row.uncertainty = f.residual_rms;
            row.flagged = f.residual_rms > 0.05 * f.amplitude;
            Ok(row)
        }
        Err(Error::NoOscillation(_)) => {
            let mut row = SummaryRow::new(x, 0.0);
            row.flagged = true;
            Ok(row)
        }
        Err(e) => Err(e),
    }
}
