use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::pauli::PauliString;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    Rx,
    Rz,
    Rzz,
    Rxx,
    Ryy,
    X,
    H,
    Z,
    Cnot,
    U4,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Rz | GateKind::X | GateKind::H | GateKind::Z => 1,
            GateKind::Rzz | GateKind::Rxx | GateKind::Ryy | GateKind::Cnot | GateKind::U4 => 2,
        }
    }

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Rz | GateKind::Rzz | GateKind::Rxx | GateKind::Ryy => 1,
            GateKind::X | GateKind::H | GateKind::Z | GateKind::Cnot => 0,
            GateKind::U4 => U4_PARAMS,
        }
    }
}

pub const U4_PARAMS: usize = 15;

/// One gate of a circuit. Parameterized gates refer to entries of the
/// circuit-wide parameter vector through `param_slots`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    targets: Vec<usize>,
    param_slots: Vec<usize>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, param_slots: Vec<usize>) -> Result<Self> {
        if targets.len() != kind.arity() {
            return contract(format!("{kind:?} needs {} target(s), got {}", kind.arity(), targets.len()));
        }
        if targets.len() == 2 && targets[0] == targets[1] {
            return contract(format!("{kind:?} targets must be distinct, got {targets:?}"));
        }
        if param_slots.len() != kind.n_params() {
            return contract(format!(
                "{kind:?} needs {} parameter slot(s), got {}",
                kind.n_params(),
                param_slots.len()
            ));
        }
        Ok(Self { kind, targets, param_slots })
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[usize] {
        &self.targets
    }

    pub fn param_slots(&self) -> &[usize] {
        &self.param_slots
    }

    pub fn is_two_qubit(&self) -> bool {
        self.targets.len() == 2
    }

    pub(crate) fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        if let Some(&q) = self.targets.iter().find(|&&q| q >= n_qubits) {
            return contract(format!("{:?} target {q} out of range for {n_qubits} qubits", self.kind));
        }
        Ok(())
    }

    /// Expands the gate into primitive operations in time order.
    ///
    /// U4 is `(RX·RY·RZ on each target) · RXX·RYY·RZZ · (RX·RY·RZ on each target)`
    /// with slots consumed in exactly that order, so all-zero angles give the
    /// identity and slot 8 alone is an RZZ.
    pub(crate) fn ops(&self, out: &mut Vec<Op>) {
        let t = &self.targets;
        let s = &self.param_slots;
        let rot = |pauli, slot| Op::Rot { pauli, slot };
        match self.kind {
            GateKind::Rx => out.push(rot(PauliString::x(t[0]), s[0])),
            GateKind::Rz => out.push(rot(PauliString::z(t[0]), s[0])),
            GateKind::Rzz => out.push(rot(PauliString::zz(t[0], t[1]), s[0])),
            GateKind::Rxx => out.push(rot(PauliString::xx(t[0], t[1]), s[0])),
            GateKind::Ryy => out.push(rot(PauliString::yy(t[0], t[1]), s[0])),
            GateKind::X => out.push(Op::X(t[0])),
            GateKind::H => out.push(Op::H(t[0])),
            GateKind::Z => out.push(Op::Z(t[0])),
            GateKind::Cnot => out.push(Op::Cnot(t[0], t[1])),
            GateKind::U4 => {
                let (a, b) = (t[0], t[1]);
                let local = |q: usize, base: usize, out: &mut Vec<Op>| {
                    out.push(rot(PauliString::x(q), s[base]));
                    out.push(rot(PauliString::y(q), s[base + 1]));
                    out.push(rot(PauliString::z(q), s[base + 2]));
                };
                local(a, 0, out);
                local(b, 3, out);
                out.push(rot(PauliString::xx(a, b), s[6]));
                out.push(rot(PauliString::yy(a, b), s[7]));
                out.push(rot(PauliString::zz(a, b), s[8]));
                local(a, 9, out);
                local(b, 12, out);
            }
        }
    }
}

/// Primitive operation: a Pauli rotation `exp(-iθP/2)` or a fixed Clifford gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Op {
    Rot { pauli: PauliString, slot: usize },
    X(usize),
    H(usize),
    Z(usize),
    Cnot(usize, usize),
}
