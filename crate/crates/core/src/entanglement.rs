//! Reduced density matrices, entanglement entropy and entanglement spectra.
//!
//! Subsystem A is always the qubit prefix `0..cut`. Logarithms are natural.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::statevector::StateVector;

pub const DEFAULT_FLOOR: f64 = 1e-14;
pub const DEFAULT_MATCH_TOL: f64 = 0.05;

pub type DensityMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    pub cut: usize,
    pub entropy: f64,
    /// Ascending `ε_k = −ln λ_k`.
    pub spectrum: Vec<f64>,
}

/// Cut for the impurity chains: A is the left half without the central qubit.
pub fn impurity_cut(n_qubits: usize) -> usize {
    (n_qubits - 1) / 2
}

/// `ρ_A = Tr_B |ψ⟩⟨ψ|` for `A = 0..cut`.
pub fn reduced_density(state: &StateVector, cut: usize) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    if cut == 0 || cut >= n {
        return contract(format!("cut {cut} outside 1..{n}"));
    }
    let da = 1usize << cut;
    let db = 1usize << (n - cut);
    // big-endian storage makes the amplitude vector a row-major da × db matrix
    let m = DMatrix::from_row_slice(da, db, state.amplitudes());
    Ok(&m * m.adjoint())
}

fn eigenvalues(rho: &DensityMatrix) -> Vec<f64> {
    SymmetricEigen::new(rho.clone()).eigenvalues.iter().copied().collect()
}

/// `−Σ λ ln λ` over the eigenvalues of `rho`.
pub fn entropy(rho: &DensityMatrix) -> Result<f64> {
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-8 {
        return contract(format!("density matrix trace {tr} deviates from 1"));
    }
    Ok(eigenvalues(rho).iter().filter(|l| **l > 0.0).map(|l| -l * l.ln()).sum::<f64>().max(0.0))
}

/// Ascending `−ln λ` for eigenvalues `λ ≥ floor`.
pub fn spectrum(rho: &DensityMatrix, floor: f64) -> Vec<f64> {
    let mut eps: Vec<f64> = eigenvalues(rho).into_iter().filter(|l| *l >= floor).map(|l| -l.ln()).collect();
    eps.sort_by(f64::total_cmp);
    eps
}

/// Length of the longest prefix on which `trial` agrees with `exact` to
/// `tol · max(1, |ε_exact|)`.
pub fn match_count(exact: &[f64], trial: &[f64], tol: f64) -> usize {
    exact.iter().zip(trial).take_while(|(e, t)| (*t - *e).abs() <= tol * e.abs().max(1.0)).count()
}

pub fn report(state: &StateVector, cut: usize) -> Result<EntanglementReport> {
    let rho = reduced_density(state, cut)?;
    Ok(EntanglementReport { cut, entropy: entropy(&rho)?, spectrum: spectrum(&rho, DEFAULT_FLOOR) })
}
