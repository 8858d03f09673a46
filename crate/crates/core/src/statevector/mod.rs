//! Dense state-vector simulation.
//!
//! Amplitudes are stored big-endian: qubit 0 is the most significant bit of
//! the basis index. All rotations follow `R_P(θ) = exp(−iθP/2)`.

mod circuit;
mod gate;

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

pub use circuit::Circuit;
pub(crate) use gate::Op;
pub use gate::{Gate, GateKind, U4_PARAMS};

use crate::error::{contract, Error, Result};
use crate::pauli::{PauliSum, StateMasks};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub const MAX_QUBITS: usize = 28;

    /// `|0⟩^{⊗n}`.
    pub fn zero_state(n_qubits: usize) -> Result<Self> {
        check_size(n_qubits)?;
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[0] = ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Wraps raw amplitudes. The caller is responsible for normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_size(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return contract(format!("{} amplitudes given for {n_qubits} qubits", amps.len()));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Product of singlets `(|01⟩ − |10⟩)/√2` on each pair, built by the gate
    /// sequence `X_b, H_a, Z_a, CNOT(a→b)` per pair `(a, b)`.
    pub fn prepare_singlet_pairs(n_qubits: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut state = Self::zero_state(n_qubits)?;
        singlet_circuit(n_qubits, pairs)?.apply(&mut state, &[])?;
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Applies `gate`, reading its angles from the circuit-wide vector `params`.
    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        gate.check_qubits(self.n_qubits)?;
        if let Some(&s) = gate.param_slots().iter().find(|&&s| s >= params.len()) {
            return contract(format!("parameter slot {s} out of range for {} parameters", params.len()));
        }
        let mut ops = Vec::new();
        gate.ops(&mut ops);
        for op in ops {
            self.apply_op(op, params, false);
        }
        Ok(())
    }

    /// General two-qubit unitary from 15 angles (see [`Gate::u4`] for slot order).
    pub fn apply_u4(&mut self, targets: (usize, usize), params: &[f64]) -> Result<()> {
        if params.len() != U4_PARAMS {
            return contract(format!("U4 needs {U4_PARAMS} angles, got {}", params.len()));
        }
        let gate = Gate::u4(targets.0, targets.1)?;
        self.apply_gate(&gate, params)
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, ham: &PauliSum) -> Result<f64> {
        if ham.n_qubits() != self.n_qubits {
            return contract(format!("{}-qubit Hamiltonian on {}-qubit state", ham.n_qubits(), self.n_qubits));
        }
        let mut h_psi = vec![ZERO; self.amps.len()];
        ham.apply(&self.amps, &mut h_psi);
        let e: Complex64 = self.amps.iter().zip(&h_psi).map(|(a, b)| a.conj() * b).sum();
        debug_assert!(e.im.abs() < 1e-10 * (1.0 + e.re.abs()), "non-real energy {e}");
        Ok(e.re)
    }

    #[inline]
    fn bit(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// Applies a primitive op, or its inverse when `adjoint` is set.
    pub(crate) fn apply_op(&mut self, op: Op, theta: &[f64], adjoint: bool) {
        match op {
            Op::Rot { pauli, slot } => {
                let angle = if adjoint { -theta[slot] } else { theta[slot] };
                rotate(&mut self.amps, pauli.state_masks(self.n_qubits), angle);
            }
            Op::X(q) => {
                let b = self.bit(q);
                for k in 0..self.amps.len() {
                    if k & b == 0 {
                        self.amps.swap(k, k | b);
                    }
                }
            }
            Op::Z(q) => {
                let b = self.bit(q);
                for (k, a) in self.amps.iter_mut().enumerate() {
                    if k & b != 0 {
                        *a = -*a;
                    }
                }
            }
            Op::H(q) => {
                let b = self.bit(q);
                for k in 0..self.amps.len() {
                    if k & b == 0 {
                        let (u, v) = (self.amps[k], self.amps[k | b]);
                        self.amps[k] = (u + v) * FRAC_1_SQRT_2;
                        self.amps[k | b] = (u - v) * FRAC_1_SQRT_2;
                    }
                }
            }
            Op::Cnot(c, t) => {
                let (cb, tb) = (self.bit(c), self.bit(t));
                for k in 0..self.amps.len() {
                    if k & cb != 0 && k & tb == 0 {
                        self.amps.swap(k, k | tb);
                    }
                }
            }
        }
    }
}

fn check_size(n_qubits: usize) -> Result<()> {
    if !(1..=StateVector::MAX_QUBITS).contains(&n_qubits) {
        return Err(Error::Size { got: n_qubits, min: 1, max: StateVector::MAX_QUBITS });
    }
    Ok(())
}

/// In-place `exp(−iθP/2)|ψ⟩ = cos(θ/2)|ψ⟩ − i sin(θ/2) P|ψ⟩`.
pub(crate) fn rotate(amps: &mut [Complex64], p: StateMasks, theta: f64) {
    let (s, c) = (0.5 * theta).sin_cos();
    if p.x == 0 {
        let plus = Complex64::new(c, -s);
        let minus = Complex64::new(c, s);
        for (k, a) in amps.iter_mut().enumerate() {
            *a *= if p.sign(k) { minus } else { plus };
        }
        return;
    }
    let pivot = 1 << p.x.trailing_zeros();
    let mis = Complex64::new(0.0, -s) * p.phase;
    for k in 0..amps.len() {
        if k & pivot != 0 {
            continue;
        }
        let j = k ^ p.x;
        let (u, v) = (amps[k], amps[j]);
        // (Pψ)[k] = phase·sgn(j)·ψ[j], (Pψ)[j] = phase·sgn(k)·ψ[k]
        let pv = if p.sign(j) { -v } else { v };
        let pu = if p.sign(k) { -u } else { u };
        amps[k] = u * c + mis * pv;
        amps[j] = v * c + mis * pu;
    }
}

/// Fixed-gate circuit preparing singlets on a perfect matching of `0..n`.
pub fn singlet_circuit(n_qubits: usize, pairs: &[(usize, usize)]) -> Result<Circuit> {
    check_perfect_matching(n_qubits, pairs)?;
    let mut c = Circuit::new(n_qubits);
    for &(a, b) in pairs {
        c.x(b)?.h(a)?.z(a)?.cnot(a, b)?;
    }
    Ok(c)
}

pub fn check_perfect_matching(n_qubits: usize, pairs: &[(usize, usize)]) -> Result<()> {
    let mut used = vec![false; n_qubits];
    for &(a, b) in pairs {
        if a == b || a >= n_qubits || b >= n_qubits {
            return contract(format!("invalid pair ({a}, {b}) for {n_qubits} qubits"));
        }
        for q in [a, b] {
            if std::mem::replace(&mut used[q], true) {
                return contract(format!("qubit {q} appears in more than one pair"));
            }
        }
    }
    if let Some(q) = used.iter().position(|u| !u) {
        return contract(format!("qubit {q} is not paired"));
    }
    Ok(())
}
