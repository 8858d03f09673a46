//! Lanczos reference solver for the lowest eigenpairs of a [`PauliSum`].
//!
//! Eigenpairs are found one at a time. Each run is a Lanczos iteration with
//! full reorthogonalization that also keeps the Krylov basis orthogonal to the
//! already converged vectors, so exactly degenerate levels are found as
//! separate vectors instead of being collapsed into one.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{contract, Error, Result};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-10;
pub const DEFAULT_K: usize = 4;

#[derive(Debug, Clone)]
pub struct ExactReference {
    /// Ascending.
    pub energies: Vec<f64>,
    pub vectors: Vec<StateVector>,
    pub degeneracy_tol: f64,
}

impl ExactReference {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn ground_state(&self) -> &StateVector {
        &self.vectors[0]
    }

    /// Number of computed levels within `degeneracy_tol` of the ground energy.
    pub fn ground_degeneracy(&self) -> usize {
        let e0 = self.energies[0];
        self.energies.iter().take_while(|e| (**e - e0).abs() < self.degeneracy_tol).count()
    }

    pub fn ground_subspace(&self) -> &[StateVector] {
        &self.vectors[..self.ground_degeneracy()]
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LanczosOptions {
    /// Required `‖Hv − Ev‖` for every returned pair.
    pub residual_tol: f64,
    pub max_krylov: usize,
    pub max_restarts: usize,
    pub degeneracy_tol: f64,
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            residual_tol: 1e-10,
            max_krylov: 200,
            max_restarts: 30,
            degeneracy_tol: DEFAULT_DEGENERACY_TOL,
            seed: 0x5eed,
        }
    }
}

/// The `k` lowest eigenpairs of `ham`, ascending.
pub fn lowest_eigenpairs(ham: &PauliSum, k: usize) -> Result<ExactReference> {
    lowest_eigenpairs_with(ham, k, &LanczosOptions::default())
}

pub fn lowest_eigenpairs_with(ham: &PauliSum, k: usize, opts: &LanczosOptions) -> Result<ExactReference> {
    let n = ham.n_qubits();
    StateVector::zero_state(n)?;
    let dim = 1usize << n;
    if k == 0 || k > dim {
        return contract(format!("cannot compute {k} eigenpairs of a {dim}-dimensional operator"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    let mut energies = Vec::with_capacity(k);
    let mut total_iters = 0;

    for _ in 0..k {
        let mut start: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
        let mut last_residual = f64::INFINITY;
        let mut found = None;
        for _ in 0..=opts.max_restarts {
            let run = lanczos_lowest(ham, &start, &locked, opts.max_krylov, opts.residual_tol)?;
            total_iters += run.iterations;
            last_residual = run.residual;
            if run.residual < opts.residual_tol {
                found = Some(run);
                break;
            }
            start = run.vector;
        }
        match found {
            Some(run) => {
                energies.push(run.value);
                locked.push(run.vector);
            }
            None => return Err(Error::NoConvergence { iterations: total_iters, residuals: vec![last_residual] }),
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let vectors =
        order.iter().map(|&i| StateVector::from_amplitudes(n, locked[i].clone())).collect::<Result<Vec<_>>>()?;
    let energies = order.iter().map(|&i| energies[i]).collect();
    Ok(ExactReference { energies, vectors, degeneracy_tol: opts.degeneracy_tol })
}

struct LanczosRun {
    value: f64,
    vector: Vec<Complex64>,
    residual: f64,
    iterations: usize,
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn orthogonalize(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, w);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
    }
}

/// Lowest Ritz pair of `ham` restricted to the orthogonal complement of `locked`.
fn lanczos_lowest(
    ham: &PauliSum,
    start: &[Complex64],
    locked: &[Vec<Complex64>],
    max_krylov: usize,
    tol: f64,
) -> Result<LanczosRun> {
    let dim = start.len();
    let m_max = max_krylov.min(dim - locked.len()).max(1);
    let scale = ham.norm_bound().max(1.0);

    let mut v = start.to_vec();
    orthogonalize(&mut v, locked);
    let nv = norm(&v);
    if nv < 1e-300 {
        return contract("Lanczos start vector lies in the locked subspace");
    }
    v.iter_mut().for_each(|x| *x /= nv);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m_max);
    let mut alpha: Vec<f64> = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = vec![Complex64::default(); dim];
    let mut ritz = (0.0, Vec::new());

    for j in 0..m_max {
        ham.apply(&v, &mut w);
        let a = dot(&v, &w).re;
        alpha.push(a);
        basis.push(std::mem::take(&mut v));
        orthogonalize(&mut w, &basis);
        orthogonalize(&mut w, locked);
        let b = norm(&w);
        let size = j + 1;
        let exhausted = b < 1e-12 * scale || size == m_max;
        if exhausted || size % 8 == 0 {
            let (theta, s) = tridiagonal_lowest(&alpha, &beta);
            let estimate = b * s[size - 1].abs();
            ritz = (theta, s);
            if exhausted || estimate < 0.1 * tol {
                break;
            }
        }
        beta.push(b);
        v = w.iter().map(|x| x / b).collect();
    }

    let (_, s) = ritz;
    let mut x = vec![Complex64::default(); dim];
    for (coef, bvec) in s.iter().zip(&basis) {
        x.iter_mut().zip(bvec).for_each(|(xi, bi)| *xi += bi * *coef);
    }
    orthogonalize(&mut x, locked);
    let nx = norm(&x);
    x.iter_mut().for_each(|xi| *xi /= nx);

    ham.apply(&x, &mut w);
    let value = dot(&x, &w).re;
    let residual = w.iter().zip(&x).map(|(hx, xi)| (hx - xi * value).norm_sqr()).sum::<f64>().sqrt();
    Ok(LanczosRun { value, vector: x, residual, iterations: basis.len() })
}

fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> (f64, Vec<f64>) {
    let m = alpha.len();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alpha[i];
        if i + 1 < m {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    let (idx, &val) =
        eig.eigenvalues.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty tridiagonal");
    (val, eig.eigenvectors.column(idx).iter().copied().collect())
}

/// Normalized projection of `trial` onto the degenerate ground subspace: the
/// member of that subspace with the largest overlap with `trial`.
pub fn project_onto_degenerate(reference: &ExactReference, trial: &StateVector) -> Result<StateVector> {
    let subspace = reference.ground_subspace();
    if trial.n_qubits() != subspace[0].n_qubits() {
        return contract("trial state and reference differ in qubit count");
    }
    let mut p = vec![Complex64::default(); trial.dim()];
    for v in subspace {
        let c = v.inner(trial);
        p.iter_mut().zip(v.amplitudes()).for_each(|(pi, vi)| *pi += vi * c);
    }
    let np = norm(&p);
    let trial_norm = trial.norm_sqr().sqrt();
    if np < 1e-8 * trial_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::OrthogonalToSubspace(np));
    }
    p.iter_mut().for_each(|x| *x /= np);
    StateVector::from_amplitudes(trial.n_qubits(), p)
}
