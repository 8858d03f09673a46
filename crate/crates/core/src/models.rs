//! Model Hamiltonians on open chains.
//!
//! Sites are indexed `0..n`. The impurity models place the longitudinal field
//! on the central site `(n − 1)/2`. Heisenberg-type models use spin operators
//! `S = σ/2`; the TFIM and XXZ chains use bare Pauli matrices.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
pub use crate::pauli::{PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpurityVariant {
    Tfim,
    Xxz,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImpurityModelParams {
    pub n_qubits: usize,
    pub h_x: f64,
    pub h0_z: f64,
    pub variant: ImpurityVariant,
    /// ZZ anisotropy, only used by the XXZ variant.
    pub delta: f64,
}

impl ImpurityModelParams {
    pub fn tfim(n_qubits: usize, h_x: f64, h0_z: f64) -> Self {
        Self { n_qubits, h_x, h0_z, variant: ImpurityVariant::Tfim, delta: 0.0 }
    }

    pub fn xxz(n_qubits: usize, delta: f64, h0_z: f64) -> Self {
        Self { n_qubits, h_x: 0.0, h0_z, variant: ImpurityVariant::Xxz, delta }
    }

    pub fn center(&self) -> usize {
        (self.n_qubits - 1) / 2
    }

    pub fn build(&self) -> Result<PauliSum> {
        match self.variant {
            ImpurityVariant::Tfim => build_tfim(self),
            ImpurityVariant::Xxz => build_xxz(self),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderModelParams {
    pub n_qubits: usize,
    pub alpha: f64,
    pub j: f64,
}

impl LadderModelParams {
    /// Long-range partners `(i, n − 1 − i)` for `i < n/2`.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        ladder_pairs(self.n_qubits)
    }
}

pub fn ladder_pairs(n_qubits: usize) -> Vec<(usize, usize)> {
    (0..n_qubits / 2).map(|i| (i, n_qubits - 1 - i)).collect()
}

/// Nearest-neighbour pairs `(0,1), (2,3), …`.
pub fn nearest_neighbor_pairs(n_qubits: usize) -> Vec<(usize, usize)> {
    (0..n_qubits / 2).map(|i| (2 * i, 2 * i + 1)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomChainParams {
    pub n_qubits: usize,
    /// Bond `i` couples sites `i` and `i + 1`.
    pub couplings: Vec<f64>,
}

fn require_odd(n: usize) -> Result<()> {
    if n.is_multiple_of(2) || n < 3 {
        return contract(format!("impurity models need an odd chain of at least 3 sites, got {n}"));
    }
    Ok(())
}

fn require_even(n: usize) -> Result<()> {
    if n % 2 == 1 || n < 2 {
        return contract(format!("model needs an even number of sites, got {n}"));
    }
    Ok(())
}

fn add_heisenberg(h: &mut PauliSum, weight: f64, a: usize, b: usize) -> Result<()> {
    let w = 0.25 * weight;
    h.add(w, PauliString::xx(a, b))?;
    h.add(w, PauliString::yy(a, b))?;
    h.add(w, PauliString::zz(a, b))
}

/// `Σ_bonds −Z_i Z_{i+1} + h_x Σ_i X_i + h0_z Z_c`.
pub fn build_tfim(params: &ImpurityModelParams) -> Result<PauliSum> {
    if params.variant != ImpurityVariant::Tfim {
        return contract("build_tfim called with a non-TFIM parameter set");
    }
    require_odd(params.n_qubits)?;
    let n = params.n_qubits;
    let mut h = PauliSum::new(n);
    for i in 0..n - 1 {
        h.add(-1.0, PauliString::zz(i, i + 1))?;
    }
    for i in 0..n {
        h.add(params.h_x, PauliString::x(i))?;
    }
    h.add(params.h0_z, PauliString::z(params.center()))?;
    Ok(h)
}

/// `Σ_bonds (X X + Y Y + Δ Z Z) + h0_z Z_c`.
pub fn build_xxz(params: &ImpurityModelParams) -> Result<PauliSum> {
    if params.variant != ImpurityVariant::Xxz {
        return contract("build_xxz called with a non-XXZ parameter set");
    }
    require_odd(params.n_qubits)?;
    let n = params.n_qubits;
    let mut h = PauliSum::new(n);
    for i in 0..n - 1 {
        h.add(1.0, PauliString::xx(i, i + 1))?;
        h.add(1.0, PauliString::yy(i, i + 1))?;
        h.add(params.delta, PauliString::zz(i, i + 1))?;
    }
    h.add(params.h0_z, PauliString::z(params.center()))?;
    Ok(h)
}

/// `α Σ_i S_i·S_{i+1} + J Σ_{i<n/2} S_i·S_{n−1−i}`.
///
/// The last long-range term couples the two central sites, which are also
/// nearest neighbours; both contributions are kept, so that bond carries
/// `α + J`.
pub fn build_ladder(params: &LadderModelParams) -> Result<PauliSum> {
    require_even(params.n_qubits)?;
    let n = params.n_qubits;
    let mut h = PauliSum::new(n);
    for i in 0..n - 1 {
        add_heisenberg(&mut h, params.alpha, i, i + 1)?;
    }
    for (a, b) in params.pairs() {
        add_heisenberg(&mut h, params.j, a, b)?;
    }
    Ok(h)
}

/// `Σ_i J_i S_i·S_{i+1}` with positive couplings.
pub fn build_random_chain(params: &RandomChainParams) -> Result<PauliSum> {
    let n = params.n_qubits;
    if n < 2 || params.couplings.len() != n - 1 {
        return contract(format!("{} couplings given for a chain of {n} sites", params.couplings.len()));
    }
    if let Some(j) = params.couplings.iter().find(|j| !(**j > 0.0)) {
        return contract(format!("couplings must be positive, got {j}"));
    }
    let mut h = PauliSum::new(n);
    for (i, &j) in params.couplings.iter().enumerate() {
        add_heisenberg(&mut h, j, i, i + 1)?;
    }
    Ok(h)
}
