use serde::{Deserialize, Serialize};

use super::gate::{Gate, GateKind, Op, U4_PARAMS};
use super::StateVector;
use crate::error::{contract, Result};

/// An ordered list of gates over a shared parameter vector.
///
/// Builder methods allocate parameter slots sequentially, so a circuit built
/// through them always uses every slot in `0..n_params` exactly once.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), n_params: 0 }
    }

    /// Builds a circuit from explicit gates, checking that the parameter
    /// slots form a permutation of `0..n_params`.
    pub fn from_gates(n_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut seen = Vec::new();
        for g in &gates {
            g.check_qubits(n_qubits)?;
            for &s in g.param_slots() {
                if s >= seen.len() {
                    seen.resize(s + 1, false);
                }
                if seen[s] {
                    return contract(format!("parameter slot {s} used twice"));
                }
                seen[s] = true;
            }
        }
        if let Some(s) = seen.iter().position(|used| !used) {
            return contract(format!("parameter slot {s} unused"));
        }
        Ok(Self { n_qubits, gates, n_params: seen.len() })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.is_two_qubit()).count()
    }

    /// Appends a gate, assigning it fresh parameter slots.
    pub fn push(&mut self, kind: GateKind, targets: &[usize]) -> Result<&mut Self> {
        let slots: Vec<usize> = (self.n_params..self.n_params + kind.n_params()).collect();
        let gate = Gate::new(kind, targets.to_vec(), slots)?;
        gate.check_qubits(self.n_qubits)?;
        self.n_params += kind.n_params();
        self.gates.push(gate);
        Ok(self)
    }

    pub fn rx(&mut self, q: usize) -> Result<&mut Self> {
        self.push(GateKind::Rx, &[q])
    }

    pub fn rz(&mut self, q: usize) -> Result<&mut Self> {
        self.push(GateKind::Rz, &[q])
    }

    pub fn rzz(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push(GateKind::Rzz, &[a, b])
    }

    pub fn rxx(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push(GateKind::Rxx, &[a, b])
    }

    pub fn ryy(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push(GateKind::Ryy, &[a, b])
    }

    pub fn u4(&mut self, a: usize, b: usize) -> Result<&mut Self> {
        self.push(GateKind::U4, &[a, b])
    }

    pub fn x(&mut self, q: usize) -> Result<&mut Self> {
        self.push(GateKind::X, &[q])
    }

    pub fn h(&mut self, q: usize) -> Result<&mut Self> {
        self.push(GateKind::H, &[q])
    }

    pub fn z(&mut self, q: usize) -> Result<&mut Self> {
        self.push(GateKind::Z, &[q])
    }

    pub fn cnot(&mut self, control: usize, target: usize) -> Result<&mut Self> {
        self.push(GateKind::Cnot, &[control, target])
    }

    /// Appends `other`, shifting its parameter slots past the current ones.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return contract(format!("cannot join circuits on {} and {} qubits", self.n_qubits, other.n_qubits));
        }
        let offset = self.n_params;
        for g in &other.gates {
            let slots = g.param_slots().iter().map(|s| s + offset).collect();
            self.gates.push(Gate::new(g.kind(), g.targets().to_vec(), slots)?);
        }
        self.n_params += other.n_params;
        Ok(())
    }

    pub(crate) fn ops(&self) -> Vec<Op> {
        let mut ops = Vec::with_capacity(self.gates.len() + 14 * self.count(GateKind::U4));
        for g in &self.gates {
            g.ops(&mut ops);
        }
        ops
    }

    fn count(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind() == kind).count()
    }

    pub fn check_params(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return contract(format!("circuit has {} parameters, got {}", self.n_params, theta.len()));
        }
        Ok(())
    }

    /// Applies the whole circuit to `state` in place.
    pub fn apply(&self, state: &mut StateVector, theta: &[f64]) -> Result<()> {
        self.check_params(theta)?;
        if state.n_qubits() != self.n_qubits {
            return contract(format!(
                "circuit on {} qubits applied to {}-qubit state",
                self.n_qubits,
                state.n_qubits()
            ));
        }
        for op in self.ops() {
            state.apply_op(op, theta, false);
        }
        Ok(())
    }

    /// Returns `U(θ)|initial⟩`.
    pub fn run(&self, initial: &StateVector, theta: &[f64]) -> Result<StateVector> {
        let mut state = initial.clone();
        self.apply(&mut state, theta)?;
        Ok(state)
    }
}

impl Gate {
    /// Convenience constructor for a standalone U4 on slots `0..15`.
    pub fn u4(a: usize, b: usize) -> Result<Self> {
        Gate::new(GateKind::U4, vec![a, b], (0..U4_PARAMS).collect())
    }
}
