use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use super::{Circuit, Gate};
use crate::error::{Error, Result};

/// Memory guard: 2^24 amplitudes is 256 MiB.
pub const MAX_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                n: n_qubits,
                limit: MAX_QUBITS,
            });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Statevector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &Statevector) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Multiplies every amplitude by `e^{iθ}`.
    pub fn apply_global_phase(&mut self, theta: f64) {
        let phase = Complex64::from_polar(1.0, theta);
        for a in &mut self.amplitudes {
            *a *= phase;
        }
    }

    pub fn apply(&mut self, gate: &Gate) {
        let len = self.amplitudes.len();
        match *gate {
            Gate::H(q) => {
                let stride = 1 << q;
                for block in (0..len).step_by(stride << 1) {
                    for i in block..block + stride {
                        let a = self.amplitudes[i];
                        let b = self.amplitudes[i + stride];
                        self.amplitudes[i] = (a + b) * FRAC_1_SQRT_2;
                        self.amplitudes[i + stride] = (a - b) * FRAC_1_SQRT_2;
                    }
                }
            }
            Gate::P(q, theta) => {
                let stride = 1 << q;
                let phase = Complex64::from_polar(1.0, theta);
                for block in (0..len).step_by(stride << 1) {
                    for a in &mut self.amplitudes[block + stride..block + (stride << 1)] {
                        *a *= phase;
                    }
                }
            }
            Gate::Cx { control, target } => {
                let (cmask, tmask) = (1usize << control, 1usize << target);
                for i in 0..len {
                    if i & cmask != 0 && i & tmask == 0 {
                        self.amplitudes.swap(i, i | tmask);
                    }
                }
            }
        }
    }
}

/// Applies the circuit to `|0…0⟩`.
pub fn simulate(c: &Circuit) -> Result<Statevector> {
    let mut state = Statevector::zero(c.n_qubits())?;
    for gate in c.gates() {
        state.apply(gate);
    }
    Ok(state)
}
