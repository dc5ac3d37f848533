mod common;

use std::f64::consts::{PI, TAU};

use common::*;
use phasemod::coupling::{find_zero_coupling_flux, phase_coupling, CouplerParams};
use phasemod::dynamics::Integration;
use phasemod::experiments::design::{drive_state, predicted_coupling, retune};
use phasemod::experiments::*;
use phasemod::io::{self, TransferTable};
use phasemod::transmon::{bias_for_frequency, FluxPulse};
use phasemod::Error;

fn one_worker() -> Runner {
    Runner::new(1).unwrap()
}

#[test]
fn equal_excursions_cancel_the_first_sideband() {
    let cfg = phase_config(0.2, 0.2, 1, 5, 7e-7);
    let grid = run_phase_sweep(&cfg, &Runner::default()).unwrap();
    let min = grid.summary.iter().map(|r| r.value).fold(f64::INFINITY, f64::min);
    assert!(min < 0.02 * cfg.system.g, "{min}");
    let first = &grid.summary[0];
    assert_eq!(first.value, 0.0);
    assert!(first.flagged);
}

#[test]
fn sweet_spot_profile_has_extrema_at_zero_and_pi() {
    let mut cfg = io::load(None, Some("sweet-spot-first-order")).unwrap();
    cfg.sweep.points = 9;
    let grid = run_phase_sweep(&cfg, &Runner::default()).unwrap();
    let v: Vec<f64> = grid.summary.iter().map(|r| r.value).collect();
    let (imin, imax) = (
        (0..9).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap(),
        (0..9).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap(),
    );
    // both drives at the sweet spot respond at 2δφ: minima at 0, π, 2π; maxima between
    assert!([0, 4, 8].contains(&imin), "{v:?}");
    assert!([2, 6].contains(&imax), "{v:?}");
    for r in &grid.summary {
        assert!(rel(r.value, r.reference.unwrap()) < 0.05, "{r:?}");
    }
}

#[test]
fn off_resonant_phase_sweep_is_rejected() {
    let mut cfg = phase_config(0.25, 0.15, 1, 3, 1e-7);
    cfg.resonance.retune = Retune::None;
    cfg.pulse1.omega_p = 0.45;
    cfg.pulse2.omega_p = 0.45;
    let err = run_phase_sweep(&cfg, &one_worker()).unwrap_err();
    assert!(matches!(err, Error::ResonanceMismatch(_)), "{err}");
    assert!(err.is_config());
}

#[test]
fn phase_sweep_needs_the_phase_axis() {
    let mut cfg = phase_config(0.25, 0.15, 1, 3, 1e-7);
    cfg.sweep.axis = Axis::OmegaP;
    cfg.sweep.start = 0.4;
    cfg.sweep.stop = 0.6;
    assert!(run_phase_sweep(&cfg, &one_worker()).unwrap_err().is_config());
}

#[test]
fn drive_frequency_chevron_is_centred_on_the_resonance() {
    let mut cfg = phase_config(0.25, 0.15, 1, 21, 1e-6);
    cfg.resonance.retune = Retune::None;
    cfg.sweep = SweepSpec {
        axis: Axis::OmegaP,
        start: 0.49,
        stop: 0.51,
        points: 21,
    };
    cfg.time.samples = 1001;
    cfg.analysis.frame = Frame::Interaction;
    let grid = run_chevron(&cfg, &Runner::default()).unwrap();
    let center: f64 = grid.metadata["resonance_center [GHz]"].parse().unwrap();
    let analytic: f64 = grid.metadata["resonance_analytic [GHz]"].parse().unwrap();
    let step: f64 = grid.metadata["grid_step [GHz]"].parse().unwrap();
    assert!((center - analytic).abs() <= step, "{center} vs {analytic}");
    assert!((analytic - OMEGA_P).abs() < 1e-9);

    // far wings stay under the detuned-Rabi bound, summed in amplitude over sidebands
    for row in &grid.summary {
        if (row.x - center).abs() < 4.0 * row.extra[1] {
            continue;
        }
        let (mut p1, mut p2) = (cfg.pulse1, cfg.pulse2);
        p1.omega_p = row.x;
        p2.omega_p = row.x;
        let state = drive_state(&cfg.system, &p1, &p2, cfg.analysis.k_max).unwrap();
        let mut amplitude = 0.0;
        for k in -4..=4 {
            let two_g = predicted_coupling(&cfg.system, &state, &p1, &p2, k).unwrap().strength();
            let detuning = if k == 1 { row.x - center } else { state.detuning() + k as f64 * row.x };
            amplitude += two_g / two_g.hypot(detuning);
        }
        assert!(row.extra[0] < amplitude * amplitude, "{row:?}");
    }
    assert_eq!(grid.z.len(), 21);
    assert_eq!(grid.z[0].len(), 1001);
}

#[test]
fn phase_chevron_is_slowest_at_zero() {
    let mut cfg = phase_config(0.25, 0.15, 1, 9, 1.2e-6);
    cfg.time.samples = 801;
    let grid = run_chevron(&cfg, &Runner::default()).unwrap();
    let v: Vec<f64> = grid.summary.iter().map(|r| r.value).collect();
    let imin = (0..v.len()).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap();
    assert!(imin == 0 || imin == 8, "{v:?}");
}

/// Qubit 1 static at 0.25, qubit 2 driven near 0.3: a gap of about 0.5 GHz.
fn perturbative_amplitude_config() -> ExperimentConfig {
    let mut cfg = base_config();
    let w1 = phasemod::transmon::qubit_frequency(&cfg.system.q1, 0.25).unwrap();
    let b2 = bias_for_frequency(&cfg.system.q2, w1 + 0.5).unwrap();
    cfg.pulse1 = FluxPulse::new(0.25, 0.0, 0.5, 0.0).unwrap();
    cfg.pulse2 = FluxPulse::new(b2, 0.004, 0.5, 0.0).unwrap();
    // qubit 2 above qubit 1: the order −1 sideband closes the gap
    cfg.resonance = ResonanceSpec {
        order: -1,
        retune: Retune::None,
    };
    cfg.sweep = SweepSpec {
        axis: Axis::PhiTilde2,
        start: 0.004,
        stop: 0.008,
        points: 2,
    };
    cfg.time = Integration {
        t_final: 4e-6,
        dt: 2e-11,
        samples: 1001,
    };
    cfg.analysis.frame = Frame::Interaction;
    cfg.analysis.scan_span = 0.004;
    cfg
}

#[test]
fn amplitude_sweep_is_linear_and_matches_bessel_at_small_amplitude() {
    let cfg = perturbative_amplitude_config();
    let grid = run_amplitude_coupling(&cfg, &Runner::default()).unwrap();
    for r in &grid.summary {
        assert!(rel(r.value, r.reference.unwrap()) < 0.05, "{r:?}");
    }
    let slope: Vec<f64> = grid.summary.iter().map(|r| r.value / r.x).collect();
    assert!(rel(slope[1], slope[0]) < 0.03, "{slope:?}");
    // the resonance moves with the dc shift of the driven qubit; the static
    // dispersive shift offsets both points equally
    let (found, predicted): (Vec<f64>, Vec<f64>) = grid.summary.iter().map(|r| (r.extra[0], r.extra[3])).unzip();
    let shift = found[1] - found[0];
    assert!(shift < 0.0);
    assert!(rel(shift, predicted[1] - predicted[0]) < 0.2, "{shift}");
}

#[test]
fn amplitude_sweep_needs_an_amplitude_axis() {
    let mut cfg = perturbative_amplitude_config();
    cfg.sweep.axis = Axis::Dphi;
    assert!(run_amplitude_coupling(&cfg, &one_worker()).unwrap_err().is_config());
}

#[test]
fn spectroscopy_gap_is_the_closed_form_coupling() {
    let cfg = phase_config(0.25, 0.15, 1, 13, 1e-7);
    let grid = run_spectroscopy(&cfg, &one_worker()).unwrap();
    for (row, &d) in grid.summary.iter().zip(&grid.x) {
        let p = retune(&cfg, cfg.at(d).unwrap()).unwrap();
        let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max).unwrap();
        let c = predicted_coupling(&cfg.system, &state, &p.pulse1, &p.pulse2, 1).unwrap();
        assert_eq!(row.value, 2.0 * c.magnitude.abs());
        let direct = phase_coupling(cfg.system.g, 0.25, 0.15, OMEGA_P, d, 1, [false; 2]).unwrap();
        assert!((row.value - direct.strength()).abs() < 1e-9);
    }
    for column in &grid.z {
        let total: f64 = column.iter().sum();
        assert!((total - 1.0).abs() < 1e-6, "{total}");
    }
}

#[test]
fn zero_coupling_spectroscopy_column_is_unsplit() {
    let cfg = phase_config(0.2, 0.2, 1, 3, 1e-7);
    let grid = run_spectroscopy(&cfg, &one_worker()).unwrap();
    let row = &grid.summary[0];
    assert!(row.value < 1e-12);
    assert!((row.extra[1] - row.extra[2]).abs() < 1e-12);
}

#[test]
fn identity_transfer_is_recovered() {
    let cfg = io::load(None, Some("transfer")).unwrap();
    let table = TransferTable::new(vec![(0.0, 1.0), (1.0, 1.0)]).unwrap();
    let grid = run_transfer_calibration(&cfg, &table, &one_worker()).unwrap();
    for r in &grid.summary {
        assert!((r.value - 1.0).abs() < 1e-3, "{r:?}");
    }
}

#[test]
fn attenuation_reduces_the_observed_shift_and_round_trips() {
    let cfg = io::load(None, Some("transfer")).unwrap();
    let table = TransferTable::new(vec![(0.0, 1.0), (0.2, 0.8), (0.6, 0.4)]).unwrap();
    let grid = run_transfer_calibration(&cfg, &table, &one_worker()).unwrap();
    for r in &grid.summary {
        assert!((r.value - r.reference.unwrap()).abs() < 1e-3);
        assert!(!r.flagged);
    }
    let shifts: Vec<f64> = grid.summary.iter().map(|r| r.extra[1].abs()).collect();
    assert!(shifts.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn transfer_table_must_cover_the_sweep() {
    let cfg = io::load(None, Some("transfer")).unwrap();
    let table = TransferTable::new(vec![(0.1, 1.0), (0.3, 0.5)]).unwrap();
    let err = run_transfer_calibration(&cfg, &table, &one_worker()).unwrap_err();
    assert!(err.is_config(), "{err}");
}

#[test]
fn coupler_dynamics_reproduce_the_model() {
    let mut cfg = io::load(None, Some("coupler-sweep")).unwrap();
    cfg.sweep = SweepSpec {
        axis: Axis::FluxC,
        start: 0.06,
        stop: 0.093,
        points: 2,
    };
    cfg.analysis.dynamics_check = true;
    cfg.time = Integration {
        t_final: 3e-7,
        dt: 1.5e-12,
        samples: 1201,
    };
    let grid = run_coupler_sweep(&cfg, &Runner::default()).unwrap();
    for r in &grid.summary {
        assert!(rel(r.extra[1], r.value) < 0.005, "{r:?}");
    }
    let working = &grid.summary[1];
    assert_eq!(working.reference, Some(0.021));
    assert!(!working.flagged, "{working:?}");
}

#[test]
fn coupling_grows_from_its_zero_to_the_working_point() {
    let mut cfg = io::load(None, Some("coupler-sweep")).unwrap();
    let q = cfg.system.q2;
    cfg.pulse2.phi_bar = bias_for_frequency(&q, 4.7).unwrap();
    let zero = find_zero_coupling_flux(4.7, 4.7, &CouplerParams::reference()).unwrap();
    cfg.sweep = SweepSpec {
        axis: Axis::FluxC,
        start: zero,
        stop: 0.25,
        points: 40,
    };
    let grid = run_coupler_sweep(&cfg, &one_worker()).unwrap();
    let v: Vec<f64> = grid.summary.iter().map(|r| r.value).collect();
    assert!(v[0] < 1e-6);
    assert!(v.windows(2).all(|w| w[1] > w[0]), "{v:?}");
}

#[test]
fn non_dispersive_coupler_points_are_flagged() {
    let mut cfg = io::load(None, Some("coupler-sweep")).unwrap();
    cfg.sweep.stop = 0.3;
    let grid = run_coupler_sweep(&cfg, &one_worker()).unwrap();
    let last = grid.summary.last().unwrap();
    assert!(last.flagged && last.value.is_nan());
}

#[test]
fn parametric_resonance_reports_the_mismatch() {
    let mut cfg = phase_config(0.3, 0.3, 0, 3, 1e-7);
    cfg.pulse2.phi_bar += 0.002;
    match run_parametric_resonance(&cfg, &one_worker()) {
        Err(Error::ResonanceMismatch(m)) => assert!(m.contains("MHz"), "{m}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn zeroth_order_gap_is_minimal_at_pi() {
    let cfg = phase_config(0.3, 0.3, 0, 5, 1e-7);
    let grid = run_spectroscopy(&cfg, &one_worker()).unwrap();
    let v: Vec<f64> = grid.summary.iter().map(|r| r.value).collect();
    assert!((v[0] - 2.0 * cfg.system.g).abs() < 1e-12);
    assert!(v[2] < v[1] && v[1] < v[0]);
    assert!((grid.x[2] - PI).abs() < 1e-12);
}

#[test]
fn sweet_spot_spectrum_spacing_doubles() {
    let cfg = io::load(None, Some("spectrum")).unwrap();
    let grid = run_spectrum(&cfg, &one_worker()).unwrap();
    let driven = &grid.summary[5];
    assert!((driven.extra[1] - 2.0 * cfg.pulse1.omega_p).abs() < 1e-12);
    assert!((driven.extra[4] - cfg.pulse2.omega_p).abs() < 1e-12);
    // unmodulated qubit 1 sits at its sweet-spot frequency
    assert!((grid.summary[0].value - 5.477).abs() < 1e-9);
}

#[test]
fn taylor_grid_differences() {
    let cfg = io::load(None, Some("taylor-fourier")).unwrap();
    let grid = run_taylor_fourier(&cfg, &one_worker()).unwrap();
    assert_eq!(grid.x.len(), 10);
    assert_eq!(grid.y.len(), 13);
    let errors: Vec<f64> = grid.z.iter().map(|c| c[1].abs()).collect();
    assert!(errors[9] < errors[0]);
    assert!(grid.summary[9].value < grid.summary[2].value);
}

#[test]
fn results_do_not_depend_on_the_worker_count() {
    let mut cfg = phase_config(0.25, 0.15, 1, 4, 1e-7);
    cfg.time.samples = 101;
    let a = run_chevron(&cfg, &Runner::new(1).unwrap()).unwrap();
    let b = run_chevron(&cfg, &Runner::new(3).unwrap()).unwrap();
    let bits = |g: &SweepGrid| -> Vec<u64> { g.z.iter().flatten().map(|v| v.to_bits()).collect() };
    assert_eq!(bits(&a), bits(&b));
    assert_eq!(a.summary, b.summary);
    assert_eq!(a.metadata, b.metadata);
    assert!(a.x.iter().all(|x| *x <= TAU));
}
