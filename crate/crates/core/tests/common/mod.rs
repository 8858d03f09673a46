//! Dense Kronecker-product reference implementations shared by the
//! integration tests. Nothing here goes through the crate's bit-mask kernels.
#![allow(dead_code)]

use entvqe::{Circuit, GateKind, PauliSum, StateVector};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

pub type CMat = DMatrix<Complex64>;

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);
pub const CI: Complex64 = Complex64::new(0.0, 1.0);

pub fn pauli(c: char) -> CMat {
    let m = match c {
        'I' => [C1, C0, C0, C1],
        'X' => [C0, C1, C1, C0],
        'Y' => [C0, -CI, CI, C0],
        'Z' => [C1, C0, C0, -C1],
        other => panic!("not a Pauli label: {other}"),
    };
    DMatrix::from_row_slice(2, 2, &m)
}

/// `m_0 ⊗ m_1 ⊗ …`, qubit 0 leftmost.
pub fn kron_all(factors: &[CMat]) -> CMat {
    factors.iter().skip(1).fold(factors[0].clone(), |acc, f| acc.kronecker(f))
}

pub fn pauli_label_matrix(label: &str) -> CMat {
    let factors: Vec<CMat> = label.chars().map(pauli).collect();
    kron_all(&factors)
}

/// Single-qubit operator `m` on qubit `q` of an `n`-qubit register.
pub fn embed1(m: &CMat, q: usize, n: usize) -> CMat {
    let factors: Vec<CMat> = (0..n).map(|k| if k == q { m.clone() } else { pauli('I') }).collect();
    kron_all(&factors)
}

pub fn dense_hamiltonian(h: &PauliSum) -> CMat {
    let dim = 1 << h.n_qubits();
    let mut m = CMat::zeros(dim, dim);
    for (c, label) in h.labeled_terms() {
        m += pauli_label_matrix(&label) * Complex64::new(c, 0.0);
    }
    m
}

/// Label with `p` on each listed qubit and `I` elsewhere.
pub fn label_on(n: usize, ops: &[(usize, char)]) -> String {
    (0..n).map(|q| ops.iter().find(|(k, _)| *k == q).map_or('I', |(_, c)| *c)).collect()
}

/// `exp(−iθP/2) = cos(θ/2) I − i sin(θ/2) P`.
pub fn rotation(label: &str, theta: f64) -> CMat {
    let p = pauli_label_matrix(label);
    let dim = p.nrows();
    let (s, c) = (0.5 * theta).sin_cos();
    CMat::identity(dim, dim) * Complex64::new(c, 0.0) - p * Complex64::new(0.0, s)
}

/// Dense unitary of one gate of `circuit`.
pub fn gate_matrix(kind: GateKind, targets: &[usize], slots: &[usize], theta: &[f64], n: usize) -> CMat {
    let one = |c: char| label_on(n, &[(targets[0], c)]);
    let two = |c: char| label_on(n, &[(targets[0], c), (targets[1], c)]);
    match kind {
        GateKind::Rx => rotation(&one('X'), theta[slots[0]]),
        GateKind::Rz => rotation(&one('Z'), theta[slots[0]]),
        GateKind::Rxx => rotation(&two('X'), theta[slots[0]]),
        GateKind::Ryy => rotation(&two('Y'), theta[slots[0]]),
        GateKind::Rzz => rotation(&two('Z'), theta[slots[0]]),
        GateKind::X => pauli_label_matrix(&one('X')),
        GateKind::Z => pauli_label_matrix(&one('Z')),
        GateKind::H => {
            let h = DMatrix::from_row_slice(2, 2, &[C1, C1, C1, -C1])
                * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            embed1(&h, targets[0], n)
        }
        GateKind::Cnot => {
            let p0 = DMatrix::from_row_slice(2, 2, &[C1, C0, C0, C0]);
            let p1 = DMatrix::from_row_slice(2, 2, &[C0, C0, C0, C1]);
            let x = pauli('X');
            let mut a: Vec<CMat> = (0..n).map(|_| pauli('I')).collect();
            let mut b = a.clone();
            a[targets[0]] = p0;
            b[targets[0]] = p1;
            b[targets[1]] = x;
            kron_all(&a) + kron_all(&b)
        }
        GateKind::U4 => {
            let (qa, qb) = (targets[0], targets[1]);
            let mut seq: Vec<(String, usize)> = Vec::new();
            let local = |q: usize, base: usize, seq: &mut Vec<(String, usize)>| {
                for (i, c) in ['X', 'Y', 'Z'].into_iter().enumerate() {
                    seq.push((label_on(n, &[(q, c)]), slots[base + i]));
                }
            };
            local(qa, 0, &mut seq);
            local(qb, 3, &mut seq);
            for (i, c) in ['X', 'Y', 'Z'].into_iter().enumerate() {
                seq.push((label_on(n, &[(qa, c), (qb, c)]), slots[6 + i]));
            }
            local(qa, 9, &mut seq);
            local(qb, 12, &mut seq);
            let dim = 1 << n;
            seq.iter().fold(CMat::identity(dim, dim), |acc, (l, s)| rotation(l, theta[*s]) * acc)
        }
    }
}

pub fn circuit_matrix(circuit: &Circuit, theta: &[f64]) -> CMat {
    let n = circuit.n_qubits();
    let dim = 1 << n;
    circuit
        .gates()
        .iter()
        .fold(CMat::identity(dim, dim), |acc, g| gate_matrix(g.kind(), g.targets(), g.param_slots(), theta, n) * acc)
}

pub fn to_dvec(s: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(s.amplitudes())
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn dense_expectation(h: &CMat, psi: &DVector<Complex64>) -> f64 {
    (psi.adjoint() * h * psi)[(0, 0)].re
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn dense_spectrum(h: &CMat) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(h.clone()).eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

pub fn dense_ground_energy(h: &PauliSum) -> f64 {
    dense_spectrum(&dense_hamiltonian(h))[0]
}

/// `ρ_A` by explicit summation over the traced-out index, with subsystem A
/// the first `cut` qubits.
pub fn partial_trace_keep_left(psi: &[Complex64], n: usize, cut: usize) -> CMat {
    let da = 1 << cut;
    let db = 1 << (n - cut);
    let mut rho = CMat::zeros(da, da);
    for i in 0..da {
        for j in 0..da {
            let mut acc = C0;
            for k in 0..db {
                acc += psi[i * db + k] * psi[j * db + k].conj();
            }
            rho[(i, j)] = acc;
        }
    }
    rho
}

/// `ρ_B` for the last `n − cut` qubits.
pub fn partial_trace_keep_right(psi: &[Complex64], n: usize, cut: usize) -> CMat {
    let da = 1 << cut;
    let db = 1 << (n - cut);
    let mut rho = CMat::zeros(db, db);
    for i in 0..db {
        for j in 0..db {
            let mut acc = C0;
            for k in 0..da {
                acc += psi[k * db + i] * psi[k * db + j].conj();
            }
            rho[(i, j)] = acc;
        }
    }
    rho
}

pub fn von_neumann(rho: &CMat) -> f64 {
    dense_spectrum(rho).iter().filter(|p| **p > 1e-300).map(|p| -p * p.ln()).sum()
}

pub fn random_state<R: Rng>(n: usize, rng: &mut R) -> StateVector {
    let amps: Vec<Complex64> =
        (0..1 << n).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    StateVector::from_amplitudes(n, amps.into_iter().map(|a| a / norm).collect()).unwrap()
}

/// Random circuit over every gate kind.
pub fn random_circuit<R: Rng>(n: usize, n_gates: usize, rng: &mut R) -> Circuit {
    let mut c = Circuit::new(n);
    for _ in 0..n_gates {
        let a = rng.random_range(0..n);
        let mut b = rng.random_range(0..n);
        while n > 1 && b == a {
            b = rng.random_range(0..n);
        }
        let pick = if n > 1 { rng.random_range(0..10) } else { rng.random_range(0..5) };
        match pick {
            0 => c.rx(a),
            1 => c.rz(a),
            2 => c.h(a),
            3 => c.x(a),
            4 => c.z(a),
            5 => c.rzz(a, b),
            6 => c.rxx(a, b),
            7 => c.ryy(a, b),
            8 => c.cnot(a, b),
            _ => c.u4(a, b),
        }
        .unwrap();
    }
    c
}

/// Random Hermitian Pauli sum with `n_terms` strings.
pub fn random_pauli_sum<R: Rng>(n: usize, n_terms: usize, rng: &mut R) -> PauliSum {
    let mut h = PauliSum::new(n);
    for _ in 0..n_terms {
        let label: String = (0..n).map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)]).collect();
        h.add(rng.random::<f64>() * 2.0 - 1.0, entvqe::PauliString::from_label(&label).unwrap()).unwrap();
    }
    h
}

pub fn random_angles<R: Rng>(p: usize, rng: &mut R) -> Vec<f64> {
    (0..p).map(|_| rng.random::<f64>() * std::f64::consts::TAU).collect()
}
