//! Parametric phase modulation of coupled flux-tunable transmons.
//!
//! The crate is organised bottom-up:
//!
//! * [`transmon`] maps flux to qubit frequency and samples a modulated trace.
//! * [`modulation`] decomposes the modulated frequency into Fourier and Taylor
//!   harmonics and derives sideband spectra.
//! * [`coupling`] holds the closed-form sideband and phase-tunable couplings,
//!   the Bessel numerics they rest on, and the coupler-mediated static coupling.
//! * [`dynamics`] integrates the two-qubit Duffing model in the time domain and
//!   fits the resulting population oscillations.
//! * [`experiments`] orchestrates parameter sweeps into [`experiments::SweepGrid`]s.
//! * [`io`] parses experiment configs and reads/writes grid tables.
//!
//! Units are fixed throughout: frequencies are f = ω/2π in GHz, flux is in
//! units of Φ0, phases in radians and times in seconds.

pub mod coupling;
pub mod dynamics;
mod error;
pub mod experiments;
pub mod io;
pub mod modulation;
pub mod transmon;

pub use error::{Error, Result};

/// Nanoseconds per second; frequencies in GHz pair naturally with ns.
pub(crate) const NS_PER_S: f64 = 1e9;
