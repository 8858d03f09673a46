//! Pauli strings in symplectic (x-mask, z-mask) form and weighted sums of them.
//!
//! Mask bit `q` refers to qubit `q`. A string with masks `(x, z)` is
//! `i^{|x & z|} X^x Z^z`, so a set bit in both masks is a `Y` on that qubit.
//! State vectors order qubits big-endian: qubit 0 is the most significant bit
//! of the basis index, matching the Kronecker order `P_0 ⊗ P_1 ⊗ …`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{contract, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: Self = Self { x: 0, z: 0 };

    pub fn x(q: usize) -> Self {
        Self { x: 1 << q, z: 0 }
    }

    pub fn y(q: usize) -> Self {
        Self { x: 1 << q, z: 1 << q }
    }

    pub fn z(q: usize) -> Self {
        Self { x: 0, z: 1 << q }
    }

    pub fn xx(a: usize, b: usize) -> Self {
        Self::x(a) * Self::x(b)
    }

    pub fn yy(a: usize, b: usize) -> Self {
        Self::y(a) * Self::y(b)
    }

    pub fn zz(a: usize, b: usize) -> Self {
        Self::z(a) * Self::z(b)
    }

    /// Parses a label such as `"XIZY"`, where character `q` acts on qubit `q`.
    pub fn from_label(label: &str) -> Result<Self> {
        let mut p = Self::IDENTITY;
        for (q, c) in label.chars().enumerate() {
            if q >= 64 {
                return contract("Pauli label longer than 64 qubits");
            }
            match c {
                'I' => {}
                'X' => p.x |= 1 << q,
                'Y' => {
                    p.x |= 1 << q;
                    p.z |= 1 << q;
                }
                'Z' => p.z |= 1 << q,
                other => return contract(format!("invalid Pauli label character {other:?}")),
            }
        }
        Ok(p)
    }

    pub fn label(&self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|q| match ((self.x >> q) & 1, (self.z >> q) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                _ => 'Z',
            })
            .collect()
    }

    pub fn n_y(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    /// `i^{n_y}` as a complex number.
    pub(crate) fn y_phase(&self) -> Complex64 {
        match self.n_y() % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }

    /// Masks over basis-index bits for an `n`-qubit register, where qubit 0
    /// is the most significant bit.
    pub(crate) fn state_masks(&self, n_qubits: usize) -> StateMasks {
        let flip = |m: u64| -> usize {
            if m == 0 {
                0
            } else {
                (m.reverse_bits() >> (64 - n_qubits)) as usize
            }
        };
        StateMasks { x: flip(self.x), z: flip(self.z), phase: self.y_phase() }
    }
}

/// A Pauli string resolved against a register size: `P|j⟩ = phase · (−1)^{|j & z|} |j ^ x⟩`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StateMasks {
    pub x: usize,
    pub z: usize,
    pub phase: Complex64,
}

impl StateMasks {
    #[inline]
    pub fn sign(&self, j: usize) -> bool {
        (j & self.z).count_ones() & 1 == 1
    }

    /// `⟨bra|P|ket⟩`.
    pub fn matrix_element(&self, bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, b) in bra.iter().enumerate() {
            let j = k ^ self.x;
            let v = b.conj() * ket[j];
            if self.sign(j) {
                acc -= v;
            } else {
                acc += v;
            }
        }
        acc * self.phase
    }

    /// Adds `coeff · P|ψ⟩` to `out`.
    pub fn accumulate(&self, coeff: f64, input: &[Complex64], out: &mut [Complex64]) {
        let phase = self.phase * coeff;
        for (k, o) in out.iter_mut().enumerate() {
            let j = k ^ self.x;
            let v = input[j] * phase;
            if self.sign(j) {
                *o -= v;
            } else {
                *o += v;
            }
        }
    }
}

/// Product up to the dropped global phase; only used for building strings on
/// disjoint supports where the product is exact.
impl std::ops::Mul for PauliString {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self { x: self.x ^ rhs.x, z: self.z ^ rhs.z }
    }
}

/// A Hamiltonian as a real-weighted sum of Pauli strings.
///
/// Duplicate strings are merged on insertion and exactly-zero weights are
/// dropped, so each string appears at most once.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, f64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, terms: BTreeMap::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add(&mut self, coeff: f64, pauli: PauliString) -> Result<()> {
        if self.n_qubits < 64 && pauli.support() >> self.n_qubits != 0 {
            return contract(format!("Pauli string {:?} acts outside {} qubits", pauli, self.n_qubits));
        }
        if coeff == 0.0 {
            return Ok(());
        }
        let entry = self.terms.entry(pauli).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.remove(&pauli);
        }
        Ok(())
    }

    pub fn with(mut self, coeff: f64, pauli: PauliString) -> Result<Self> {
        self.add(coeff, pauli)?;
        Ok(self)
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, PauliString)> + '_ {
        self.terms.iter().map(|(p, c)| (*c, *p))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, pauli: &PauliString) -> f64 {
        self.terms.get(pauli).copied().unwrap_or(0.0)
    }

    /// `(coefficient, label)` pairs, labels indexed by qubit.
    pub fn labeled_terms(&self) -> Vec<(f64, String)> {
        self.terms().map(|(c, p)| (c, p.label(self.n_qubits))).collect()
    }

    /// Computes `H|ψ⟩` into `out`. Both slices must have length `2^n_qubits`.
    pub fn apply(&self, input: &[Complex64], out: &mut [Complex64]) {
        debug_assert_eq!(input.len(), 1 << self.n_qubits);
        debug_assert_eq!(input.len(), out.len());
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        for (c, p) in self.terms() {
            p.state_masks(self.n_qubits).accumulate(c, input, out);
        }
    }

    /// Sum of absolute coefficients, an upper bound on the spectral norm.
    pub fn norm_bound(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, p) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}*{}", p.label(self.n_qubits))?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}
