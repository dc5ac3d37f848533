use super::design::drive_state;
use super::{exchange_row, fit_exchange, simulate, Axis, ExperimentConfig, Point, Runner, SweepGrid};
use crate::coupling::effective_coupling_single;
use crate::transmon::qubit_frequency;
use crate::{Error, Result};

/// Golden-section stopping width in GHz.
const REFINE_TOLERANCE: f64 = 1e-5;

/// Single-drive coupling against modulation amplitude, re-finding the
/// resonant drive frequency at every amplitude.
///
/// The resonance is located by a coarse scan of the mean |10⟩ depletion
/// around −Δ̄/(n·base), refined by golden-section search, and the exchange
/// frequency is fitted there. Δ_p is measured from the unmodulated
/// resonance |ω(Φ̄1) − ω(Φ̄2)|/(n·base).
pub fn run_amplitude_coupling(cfg: &ExperimentConfig, runner: &Runner) -> Result<SweepGrid> {
    cfg.validate()?;
    let driven = match cfg.sweep.axis {
        Axis::PhiTilde1 => 0,
        Axis::PhiTilde2 => 1,
        _ => return Err(Error::config("sweep.axis", "amplitude sweeps use phi_tilde1 or phi_tilde2")),
    };
    let n = cfg.resonance.order;
    if n == 0 {
        return Err(Error::config("resonance.order", "amplitude sweeps need a sideband order != 0"));
    }
    let other = 1 - driven;
    let at = |v: f64| -> Result<Point> {
        let mut p = cfg.at(v)?;
        if other == 0 {
            p.pulse1.phi_tilde = 0.0;
        } else {
            p.pulse2.phi_tilde = 0.0;
        }
        Ok(p)
    };
    let base = crate::modulation::base_harmonic(at(cfg.sweep.start)?.pulse(driven).phi_bar) as f64;
    let p0 = at(cfg.sweep.start)?;
    let static_gap = qubit_frequency(&cfg.system.q2, p0.pulse2.phi_bar)?
        - qubit_frequency(&cfg.system.q1, p0.pulse1.phi_bar)?;
    let omega_p0 = (-static_gap / (n as f64 * base)).abs();

    let xs = cfg.sweep.values();
    let columns = runner.try_map(&xs, |&v| {
        let p = at(v)?;
        let state = drive_state(&cfg.system, &p.pulse1, &p.pulse2, cfg.analysis.k_max)?;
        let predicted = -state.detuning() / (n as f64 * base);
        if !(predicted > 0.0) {
            return Err(Error::config(
                "resonance.order",
                format!("order-{n} resonance needs a negative drive frequency at phi_tilde = {v}"),
            ));
        }
        let with = |w: f64| {
            let mut q = p;
            q.pulse1.omega_p = w;
            q.pulse2.omega_p = w;
            q
        };
        let depletion = |w: f64| -> Result<f64> {
            let trace = simulate(cfg, &cfg.system, &with(w))?;
            let p10 = trace.population("10")?;
            Ok(1.0 - p10.iter().sum::<f64>() / p10.len() as f64)
        };

        let half = cfg.analysis.scan_span.min(0.5 * predicted);
        let m = cfg.analysis.scan_points;
        let scan: Vec<f64> = (0..m)
            .map(|k| predicted - half + 2.0 * half * k as f64 / (m - 1) as f64)
            .collect();
        let values = scan.iter().map(|&w| depletion(w)).collect::<Result<Vec<_>>>()?;
        let best = (0..m).max_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
        if best == 0 || best == m - 1 {
            return Err(Error::config(
                "analysis.scan_span",
                format!(
                    "resonance not bracketed by {:.4}..{:.4} GHz at phi_tilde = {v}",
                    scan[0],
                    scan[m - 1]
                ),
            ));
        }
        let omega_p = golden_maximum(&depletion, scan[best - 1], scan[best + 1])?;

        let p = with(omega_p);
        let trace = simulate(cfg, &cfg.system, &p)?;
        let eps = state.profiles[driven].excursion;
        let analytic = 2.0 * effective_coupling_single(cfg.system.g, eps, base * omega_p, n)?.abs();
        let mut row = exchange_row(v, fit_exchange(cfg, &trace))?;
        row.reference = Some(analytic);
        if row.value > 0.0 && (row.value - analytic).abs() > cfg.analysis.tolerance * analytic {
            row.flagged = true;
        }
        row.extra = vec![omega_p, (omega_p - omega_p0).abs(), eps, predicted];
        Ok((trace.times.clone(), trace.population("10")?.to_vec(), row))
    })?;

    let label = if driven == 0 { Axis::PhiTilde1 } else { Axis::PhiTilde2 };
    let mut grid = SweepGrid::new(label.label(), "t [s]", "P10");
    grid.x = xs;
    grid.y = columns.first().map(|c| c.0.clone()).unwrap_or_default();
    for (_, p10, row) in columns {
        grid.z.push(p10);
        grid.summary.push(row);
    }
    grid.summary_columns = vec![
        "omega_p [GHz]".into(),
        "delta_p [GHz]".into(),
        "epsilon [GHz]".into(),
        "omega_p_predicted [GHz]".into(),
    ];
    grid.metadata.insert("order".into(), n.to_string());
    grid.metadata.insert("omega_p0 [GHz]".into(), format!("{omega_p0:.9}"));
    grid.metadata.insert("value".into(), "fitted 2g_eff [GHz]".into());
    grid.stamp(cfg, "amp-coupling");
    grid.check_shape()?;
    Ok(grid)
}

fn golden_maximum(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > REFINE_TOLERANCE {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(0.5 * (a + b))
}
