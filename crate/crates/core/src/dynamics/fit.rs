use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix3, Matrix5, Vector3, Vector5};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::{Error, Result, NS_PER_S};

/// Parameters of B + C·e^{−t/τ}·cos(2πft + θ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampedCosine {
    /// GHz.
    pub frequency: f64,
    /// Seconds; infinite when no decay is resolved.
    pub decay: f64,
    pub amplitude: f64,
    pub offset: f64,
    pub phase: f64,
    /// Root-mean-square residual of the fit.
    pub residual_rms: f64,
}

impl DampedCosine {
    pub fn evaluate(&self, t: f64) -> f64 {
        let envelope = if self.decay.is_infinite() {
            1.0
        } else {
            (-t / self.decay).exp()
        };
        self.offset + self.amplitude * envelope * (TAU * self.frequency * t * NS_PER_S + self.phase).cos()
    }
}

/// Least-squares damped-cosine fit of uniformly sampled `values` at `times` (seconds).
pub fn fit_damped_cosine(times: &[f64], values: &[f64]) -> Result<DampedCosine> {
    let n = times.len();
    if n != values.len() {
        return Err(Error::InvalidInput(format!(
            "times and values differ in length ({n} vs {})",
            values.len()
        )));
    }
    if n < 8 {
        return Err(Error::InvalidInput(format!("at least 8 samples required, got {n}")));
    }
    let t: Vec<f64> = times.iter().map(|x| (x - times[0]) * NS_PER_S).collect();
    let step = t[n - 1] / (n - 1) as f64;
    if !(step > 0.0) {
        return Err(Error::InvalidInput("time axis must be increasing".into()));
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    if !(hi - lo > 1e-12) {
        return Err(Error::NoOscillation("trace is constant".into()));
    }

    let f0 = spectral_peak(values, step)?;
    let (offset, amplitude, phase) = linear_guess(&t, values, f0);
    let start = Vector5::new(offset, amplitude, 0.0, f0, phase);
    let p = levenberg_marquardt(&t, values, start);

    let (mut amplitude, mut frequency, mut phase) = (p[1], p[3], p[4]);
    if amplitude < 0.0 {
        amplitude = -amplitude;
        phase += PI;
    }
    if frequency < 0.0 {
        frequency = -frequency;
        phase = -phase;
    }
    phase = (phase + PI).rem_euclid(TAU) - PI;
    let gamma = p[2];
    let decay = if (gamma * t[n - 1]).abs() < 1e-9 {
        f64::INFINITY
    } else {
        1.0 / (gamma * NS_PER_S)
    };
    let residual_rms = (cost(&t, values, &p) / n as f64).sqrt();
    Ok(DampedCosine {
        frequency,
        decay,
        amplitude,
        offset: p[0],
        phase,
        residual_rms,
    })
}

/// Dominant frequency (GHz) from a zero-padded FFT with parabolic peak interpolation.
fn spectral_peak(values: &[f64], step_ns: f64) -> Result<f64> {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let size = (4 * n).next_power_of_two();
    let mut buffer: Vec<Complex<f64>> = values
        .iter()
        .map(|v| Complex::new(v - mean, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(size)
        .collect();
    FftPlanner::new().plan_fft_forward(size).process(&mut buffer);
    let magnitude: Vec<f64> = buffer[..size / 2].iter().map(|z| z.norm()).collect();

    let mut sorted = magnitude[1..].to_vec();
    sorted.sort_by(f64::total_cmp);
    let floor = sorted[sorted.len() / 2];
    let (peak, &height) = magnitude
        .iter()
        .enumerate()
        .skip(1)
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty spectrum");
    if !(height > 3.0 * floor) {
        return Err(Error::NoOscillation(format!(
            "spectral peak {height:.3e} not above 3x noise floor {floor:.3e}"
        )));
    }
    let mut bin = peak as f64;
    if peak + 1 < magnitude.len() {
        let (a, b, c) = (magnitude[peak - 1], height, magnitude[peak + 1]);
        let denom = a - 2.0 * b + c;
        if denom != 0.0 {
            bin += 0.5 * (a - c) / denom;
        }
    }
    Ok(bin / (size as f64 * step_ns))
}

/// Offset, amplitude and phase of the undamped model at fixed frequency by linear least squares.
fn linear_guess(t: &[f64], y: &[f64], f: f64) -> (f64, f64, f64) {
    let mut normal = Matrix3::zeros();
    let mut rhs = Vector3::zeros();
    for (&ti, &yi) in t.iter().zip(y) {
        let (s, c) = (TAU * f * ti).sin_cos();
        let row = Vector3::new(1.0, c, s);
        normal += row * row.transpose();
        rhs += row * yi;
    }
    let sol = normal.lu().solve(&rhs).unwrap_or_else(Vector3::zeros);
    // c1·cos x + c2·sin x = C·cos(x + θ) with C cos θ = c1, C sin θ = −c2
    (sol[0], sol[1].hypot(sol[2]), (-sol[2]).atan2(sol[1]))
}

fn model(t: f64, p: &Vector5<f64>) -> f64 {
    p[0] + p[1] * (-p[2] * t).exp() * (TAU * p[3] * t + p[4]).cos()
}

fn cost(t: &[f64], y: &[f64], p: &Vector5<f64>) -> f64 {
    t.iter().zip(y).map(|(&ti, &yi)| (model(ti, p) - yi).powi(2)).sum()
}

fn levenberg_marquardt(t: &[f64], y: &[f64], start: Vector5<f64>) -> Vector5<f64> {
    let mut p = start;
    let mut current = cost(t, y, &p);
    let mut lambda = 1e-3;
    for _ in 0..500 {
        let mut jtj = Matrix5::zeros();
        let mut jtr = Vector5::zeros();
        for (&ti, &yi) in t.iter().zip(y) {
            let envelope = (-p[2] * ti).exp();
            let arg = TAU * p[3] * ti + p[4];
            let (s, c) = arg.sin_cos();
            let row = Vector5::new(
                1.0,
                envelope * c,
                -ti * p[1] * envelope * c,
                -TAU * ti * p[1] * envelope * s,
                -p[1] * envelope * s,
            );
            let r = yi - (p[0] + p[1] * envelope * c);
            jtj += row * row.transpose();
            jtr += row * r;
        }
        let mut improved = false;
        while lambda < 1e12 {
            let mut damped = jtj;
            for i in 0..5 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-300);
            }
            let Some(delta) = damped.cholesky().map(|c| c.solve(&jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let trial = p + delta;
            let trial_cost = cost(t, y, &trial);
            if trial_cost.is_finite() && trial_cost <= current {
                let relative = delta.norm() / p.norm().max(1e-300);
                let gain = current - trial_cost;
                p = trial;
                current = trial_cost;
                lambda = (lambda * 0.3).max(1e-15);
                improved = true;
                if relative < 1e-14 || gain <= 1e-15 * current {
                    return p;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    p
}
