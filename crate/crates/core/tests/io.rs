use std::fs;

use phasemod::experiments::{run_taylor_fourier, run_spectrum, Runner};
use phasemod::io::{self, TransferTable};

#[test]
fn sweet_spot_profile_carries_the_device_drive() {
    let cfg = io::load(None, Some("sweet-spot-first-order")).unwrap();
    assert_eq!(cfg.pulse1.omega_p, 0.0708);
    assert_eq!(cfg.pulse1.phi_tilde, 0.08);
    assert_eq!(cfg.pulse2.phi_tilde, 0.13);
    assert!(cfg.coupler.is_none());
    assert!(io::load(None, Some("coupler-sweep")).unwrap().coupler.is_some());
}

#[test]
fn every_profile_is_listed_and_loads() {
    for (name, _) in io::PROFILES {
        io::load(None, Some(name)).unwrap_or_else(|e| panic!("{name}: {e}"));
    }
    assert!(io::load(None, Some("no-such-profile")).unwrap_err().is_config());
}

#[test]
fn user_file_overrides_the_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "[pulse2]\nphi_tilde = 0.11\n").unwrap();
    let cfg = io::parse_config_with_profile(&path, "sweet-spot-first-order").unwrap();
    assert_eq!(cfg.pulse2.phi_tilde, 0.11);
    assert_eq!(cfg.pulse1.phi_tilde, 0.08);
}

#[test]
fn out_of_range_amplitude_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "[pulse1]\nphi_tilde = 0.6\n").unwrap();
    let err = io::parse_config(&path).unwrap_err();
    assert!(err.is_config());
    assert!(err.to_string().contains("pulse1"), "{err}");
}

#[test]
fn missing_config_file_is_an_io_error() {
    let err = io::parse_config(std::path::Path::new("/nonexistent/run.toml")).unwrap_err();
    assert!(matches!(err, phasemod::Error::Io { .. }), "{err}");
}

#[test]
fn written_grid_reproduces_itself() {
    let cfg = io::load(None, Some("spectrum")).unwrap();
    let grid = run_spectrum(&cfg, &Runner::new(2).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("spectrum.csv");
    io::write_grid(&grid, &path).unwrap();
    assert!(io::summary_path(&path).exists());

    let back = io::read_grid(&path).unwrap();
    assert_eq!(back.x, grid.x);
    assert_eq!(back.y, grid.y);
    assert_eq!(back.z, grid.z);
    assert_eq!(back.metadata, grid.metadata);

    // the embedded configuration hashes to the recorded value and reruns bit for bit
    let embedded = io::config_from_canonical(&back.metadata["config"]).unwrap();
    assert_eq!(io::config_hash(&embedded), back.metadata["config_hash"]);
    let rerun = run_spectrum(&embedded, &Runner::new(1).unwrap()).unwrap();
    assert_eq!(rerun.z, grid.z);
}

#[test]
fn summary_file_has_named_columns() {
    let cfg = io::load(None, Some("taylor-fourier")).unwrap();
    let grid = run_taylor_fourier(&cfg, &Runner::new(1).unwrap()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("taylor.csv");
    io::write_grid(&grid, &path).unwrap();
    let text = fs::read_to_string(io::summary_path(&path)).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    assert!(header.starts_with("x,value,uncertainty,reference,flagged"), "{header}");
    let rows = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, grid.summary.len());
}

#[test]
fn transfer_table_from_csv_interpolates() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.csv");
    fs::write(&path, "# measured\nomega_p,factor\n0.1,1.0\n0.3,0.6\n").unwrap();
    let table = TransferTable::from_csv(&path).unwrap();
    assert_eq!(table.rows().len(), 2);
    assert!((table.factor(0.2).unwrap() - 0.8).abs() < 1e-12);
    assert!(table.factor(0.5).unwrap_err().is_config());
}
