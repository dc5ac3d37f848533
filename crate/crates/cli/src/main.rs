//! Command-line front end: one subcommand per virtual experiment.
//!
//! Every run merges the bundled `paper-device` profile, then the
//! subcommand's default profile (or `--profile`), then `--config`. The grid is
//! written to `<out>/<subcommand>.csv` with its summary next to it.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phasemod::experiments::{self, ExperimentConfig, Runner, SweepGrid};
use phasemod::io::{self, TransferTable};
use phasemod::Error;

#[derive(Parser, Debug)]
#[command(name = "phasemod", version, about = "Virtual experiments on parametrically modulated transmon pairs")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment configuration (TOML) merged over the profile.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,

    /// Bundled profile merged between `paper-device` and the configuration.
    #[arg(long, global = true)]
    profile: Option<String>,

    /// Two-column CSV transfer table (frequency GHz, factor), for `transfer`.
    #[arg(long, global = true)]
    transfer: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
enum Command {
    /// Sideband spectra of both qubits against the swept parameter (profile `spectrum`).
    Spectrum,
    /// |10> population against time and the swept parameter (profile `chevron`).
    Chevron,
    /// Fitted dual-drive coupling against relative drive phase (profile `sweet-spot-first-order`).
    PhaseSweep,
    /// Single-drive coupling and resonance drift against amplitude (profile `amp-coupling`).
    AmpCoupling,
    /// Dressed sideband spectrum and avoided-crossing gap (profile `spectroscopy`).
    Spectroscopy,
    /// Recovered transfer factor against drive frequency; needs --transfer (profile `transfer`).
    Transfer,
    /// Coupler-mediated coupling against coupler flux (profile `coupler-sweep`).
    CouplerSweep,
    /// Zeroth-order exchange against relative drive phase (profile `param-res-sweet`).
    ParamRes,
    /// Taylor against Fourier harmonics for orders 1 to 10 (profile `taylor-fourier`).
    TaylorFourier,
    /// List the bundled profiles.
    Profiles,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::Chevron => "chevron",
            Command::PhaseSweep => "phase-sweep",
            Command::AmpCoupling => "amp-coupling",
            Command::Spectroscopy => "spectroscopy",
            Command::Transfer => "transfer",
            Command::CouplerSweep => "coupler-sweep",
            Command::ParamRes => "param-res",
            Command::TaylorFourier => "taylor-fourier",
            Command::Profiles => "profiles",
        }
    }

    fn default_profile(self) -> &'static str {
        match self {
            Command::PhaseSweep => "sweet-spot-first-order",
            Command::ParamRes => "param-res-sweet",
            other => other.name(),
        }
    }
}

fn run(cli: &Cli) -> phasemod::Result<Option<PathBuf>> {
    if cli.command == Command::Profiles {
        for (name, _) in io::PROFILES {
            println!("{name}");
        }
        return Ok(None);
    }
    let profile = cli.profile.as_deref().unwrap_or(cli.command.default_profile());
    let cfg: ExperimentConfig = io::load(cli.config.as_deref(), Some(profile))?;
    let runner = Runner::new(cli.workers)?;
    let grid: SweepGrid = match cli.command {
        Command::Spectrum => experiments::run_spectrum(&cfg, &runner)?,
        Command::Chevron => experiments::run_chevron(&cfg, &runner)?,
        Command::PhaseSweep => experiments::run_phase_sweep(&cfg, &runner)?,
        Command::AmpCoupling => experiments::run_amplitude_coupling(&cfg, &runner)?,
        Command::Spectroscopy => experiments::run_spectroscopy(&cfg, &runner)?,
        Command::Transfer => {
            let path = cli
                .transfer
                .as_deref()
                .ok_or_else(|| Error::Config {
                    field: "--transfer".into(),
                    constraint: "the transfer subcommand needs a transfer table".into(),
                })?;
            let table = TransferTable::from_csv(path)?;
            experiments::run_transfer_calibration(&cfg, &table, &runner)?
        }
        Command::CouplerSweep => experiments::run_coupler_sweep(&cfg, &runner)?,
        Command::ParamRes => experiments::run_parametric_resonance(&cfg, &runner)?,
        Command::TaylorFourier => experiments::run_taylor_fourier(&cfg, &runner)?,
        Command::Profiles => unreachable!(),
    };
    std::fs::create_dir_all(&cli.out).map_err(|e| Error::Io {
        path: cli.out.clone(),
        source: e,
    })?;
    let path = cli.out.join(format!("{}.csv", cli.command.name()));
    io::write_grid(&grid, &path)?;
    Ok(Some(path))
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 2,
        e if e.is_config() => 2,
        _ => 3,
    }
}

fn report(path: &Path) {
    println!("{}", path.display());
    println!("{}", io::summary_path(path).display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Some(path)) => {
            report(&path);
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("phasemod {}: {e}", cli.command.name());
            ExitCode::from(exit_code(&e))
        }
    }
}
