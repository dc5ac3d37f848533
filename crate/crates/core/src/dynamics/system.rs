use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::transmon::TransmonParams;
use crate::{Error, Result};

/// Two capacitively coupled Duffing oscillators truncated to `levels` each.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoQubitSystem {
    pub q1: TransmonParams,
    pub q2: TransmonParams,
    pub alpha1: f64,
    pub alpha2: f64,
    /// Bare exchange coupling g/2π in GHz.
    pub g: f64,
    pub levels: usize,
}

impl TwoQubitSystem {
    /// Anharmonicities taken from the transmon parameters.
    pub fn new(q1: TransmonParams, q2: TransmonParams, g: f64, levels: usize) -> Result<Self> {
        let s = TwoQubitSystem {
            q1,
            q2,
            alpha1: q1.anharmonicity,
            alpha2: q2.anharmonicity,
            g,
            levels,
        };
        s.validate()?;
        Ok(s)
    }

    /// Reference device: 2g = 21 MHz, three levels per qubit.
    pub fn paper_device() -> Self {
        TwoQubitSystem {
            q1: TransmonParams::paper_q1(),
            q2: TransmonParams::paper_q2(),
            alpha1: -0.248,
            alpha2: -0.248,
            g: 0.0105,
            levels: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.q1.validate()?;
        self.q2.validate()?;
        if !(2..=5).contains(&self.levels) {
            return Err(Error::InvalidInput(format!(
                "levels in [2, 5] violated (levels = {})",
                self.levels
            )));
        }
        if !self.g.is_finite() || !self.alpha1.is_finite() || !self.alpha2.is_finite() {
            return Err(Error::InvalidInput("g and anharmonicities must be finite".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.levels * self.levels
    }

    /// Excitation numbers (n1, n2) of basis index `a`.
    pub fn occupation(&self, a: usize) -> (usize, usize) {
        (a / self.levels, a % self.levels)
    }

    pub fn index(&self, n1: usize, n2: usize) -> usize {
        n1 * self.levels + n2
    }

    /// Basis label such as "10" (qubit 1 excited).
    pub fn label(&self, a: usize) -> String {
        let (n1, n2) = self.occupation(a);
        format!("{n1}{n2}")
    }

    /// Normalised basis vector for `label`.
    pub fn basis_state(&self, label: &str) -> Result<Vec<Complex64>> {
        let a = (0..self.dim())
            .find(|&a| self.label(a) == label)
            .ok_or_else(|| Error::InvalidInput(format!("unknown basis label {label:?}")))?;
        let mut psi = vec![Complex64::new(0.0, 0.0); self.dim()];
        psi[a] = Complex64::new(1.0, 0.0);
        Ok(psi)
    }

    /// Duffing energy of basis state `a` for the given qubit frequencies.
    pub fn level_energy(&self, a: usize, omega1: f64, omega2: f64) -> f64 {
        let (n1, n2) = self.occupation(a);
        duffing(n1, omega1, self.alpha1) + duffing(n2, omega2, self.alpha2)
    }

    /// Swap the roles of the two qubits.
    pub fn swapped(&self) -> Self {
        TwoQubitSystem {
            q1: self.q2,
            q2: self.q1,
            alpha1: self.alpha2,
            alpha2: self.alpha1,
            ..*self
        }
    }

    /// Non-zero entries (a < b, ⟨a|(b1 + b1†)(b2 + b2†)|b⟩).
    pub(crate) fn exchange_pairs(&self, rotating_wave: bool) -> Vec<(usize, usize, f64)> {
        let mut pairs = Vec::new();
        for a in 0..self.dim() {
            for b in a + 1..self.dim() {
                let (m1, m2) = self.occupation(a);
                let (n1, n2) = self.occupation(b);
                if rotating_wave && m1 + m2 != n1 + n2 {
                    continue;
                }
                let x = ladder(m1, n1) * ladder(m2, n2);
                if x != 0.0 {
                    pairs.push((a, b, x));
                }
            }
        }
        pairs
    }
}

fn duffing(n: usize, omega: f64, alpha: f64) -> f64 {
    let n = n as f64;
    omega * n + 0.5 * alpha * n * (n - 1.0)
}

/// ⟨m|(b + b†)|n⟩
fn ladder(m: usize, n: usize) -> f64 {
    if m + 1 == n {
        (n as f64).sqrt()
    } else if n + 1 == m {
        (m as f64).sqrt()
    } else {
        0.0
    }
}

/// H/h in GHz: Duffing ladders at the given frequencies plus g(b1 + b1†)(b2 + b2†).
pub fn hamiltonian_at(system: &TwoQubitSystem, omega1_t: f64, omega2_t: f64) -> DMatrix<Complex64> {
    let dim = system.dim();
    let mut h = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for a in 0..dim {
        h[(a, a)] = Complex64::new(system.level_energy(a, omega1_t, omega2_t), 0.0);
    }
    for (a, b, x) in system.exchange_pairs(false) {
        h[(a, b)] = Complex64::new(system.g * x, 0.0);
        h[(b, a)] = Complex64::new(system.g * x, 0.0);
    }
    h
}
