//! Energy minimization with adjoint gradients and layer-wise warm starts.

pub mod bfgs;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{assemble, AnsatzSpec};
use crate::error::{contract, Result};
use crate::pauli::PauliSum;
use crate::rng::derived_rng;
use crate::statevector::{Circuit, Op, StateVector};

pub use bfgs::{BfgsOptions, BfgsOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VqeConfig {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub n_restarts: usize,
    /// Half-width of the uniform noise added to freshly appended parameters.
    pub warm_start_noise: f64,
    pub rng_seed: u64,
}

impl Default for VqeConfig {
    fn default() -> Self {
        Self { grad_tol: 1e-10, max_iters: 10_000, n_restarts: 1, warm_start_noise: 0.01, rng_seed: 0 }
    }
}

impl VqeConfig {
    /// Defaults for long-range and random models, which use ten restarts.
    pub fn multi_restart() -> Self {
        Self { n_restarts: 10, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return contract(format!("grad_tol must be positive, got {}", self.grad_tol));
        }
        if self.n_restarts == 0 {
            return contract("n_restarts must be at least 1");
        }
        if !(self.warm_start_noise >= 0.0) {
            return contract("warm_start_noise must be non-negative");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VqeResult {
    pub n_layers: usize,
    pub theta_opt: Vec<f64>,
    pub energy: f64,
    pub exact_energy: f64,
    pub rel_error: f64,
    pub iterations: usize,
    pub trace: Vec<f64>,
    pub restart_index: usize,
    pub converged: bool,
    pub stalled: bool,
}

impl VqeResult {
    /// `rel_error` recomputed from the stored energies.
    pub fn recomputed_rel_error(&self) -> f64 {
        relative_error(self.exact_energy, self.energy)
    }
}

/// `|E_exact − E| / |E_exact|`.
pub fn relative_error(exact: f64, energy: f64) -> f64 {
    (exact - energy).abs() / exact.abs()
}

fn check_problem(circuit: &Circuit, theta: &[f64], ham: &PauliSum, initial: &StateVector) -> Result<()> {
    circuit.check_params(theta)?;
    let n = circuit.n_qubits();
    if ham.n_qubits() != n || initial.n_qubits() != n {
        return contract(format!(
            "circuit on {n} qubits, Hamiltonian on {}, initial state on {}",
            ham.n_qubits(),
            initial.n_qubits()
        ));
    }
    Ok(())
}

/// `⟨ψ(θ)|H|ψ(θ)⟩` with `|ψ(θ)⟩ = U(θ)|initial⟩`.
pub fn energy(circuit: &Circuit, theta: &[f64], ham: &PauliSum, initial: &StateVector) -> Result<f64> {
    check_problem(circuit, theta, ham, initial)?;
    circuit.run(initial, theta)?.expectation(ham)
}

/// Energy and its exact gradient by adjoint differentiation.
pub fn energy_and_gradient(
    circuit: &Circuit,
    theta: &[f64],
    ham: &PauliSum,
    initial: &StateVector,
) -> Result<(f64, Vec<f64>)> {
    check_problem(circuit, theta, ham, initial)?;
    let ops = circuit.ops();
    Ok(adjoint(&ops, theta, ham, initial))
}

fn adjoint(ops: &[Op], theta: &[f64], ham: &PauliSum, initial: &StateVector) -> (f64, Vec<f64>) {
    let n = initial.n_qubits();
    let mut psi = initial.clone();
    for &op in ops {
        psi.apply_op(op, theta, false);
    }
    let mut h_psi = vec![Complex64::new(0.0, 0.0); psi.dim()];
    ham.apply(psi.amplitudes(), &mut h_psi);
    let e: f64 = psi.amplitudes().iter().zip(&h_psi).map(|(a, b)| (a.conj() * b).re).sum();
    let mut lambda = StateVector::from_amplitudes(n, h_psi).expect("dimension matches");

    // dE/dθ = Im⟨λ|P|ψ⟩ with ψ the state right after the rotation and
    // λ = (gates after it)† H |ψ_final⟩
    let mut grad = vec![0.0; theta.len()];
    for &op in ops.iter().rev() {
        if let Op::Rot { pauli, slot } = op {
            let masks = pauli.state_masks(n);
            grad[slot] += masks.matrix_element(lambda.amplitudes(), psi.amplitudes()).im;
        }
        psi.apply_op(op, theta, true);
        lambda.apply_op(op, theta, true);
    }
    (e, grad)
}

/// BFGS from `theta0`.
pub fn minimize(
    circuit: &Circuit,
    ham: &PauliSum,
    initial: &StateVector,
    theta0: &[f64],
    exact_energy: f64,
    config: &VqeConfig,
) -> Result<VqeResult> {
    config.validate()?;
    check_problem(circuit, theta0, ham, initial)?;
    let ops = circuit.ops();
    let opts = BfgsOptions { grad_tol: config.grad_tol, max_iters: config.max_iters, ..BfgsOptions::default() };
    let out = bfgs::minimize(|x| adjoint(&ops, x, ham, initial), theta0, &opts);
    Ok(VqeResult {
        n_layers: 0,
        rel_error: relative_error(exact_energy, out.f),
        theta_opt: out.x,
        energy: out.f,
        exact_energy,
        iterations: out.iterations,
        trace: out.trace,
        restart_index: 0,
        converged: out.converged,
        stalled: out.stalled,
    })
}

/// The initial state alone, i.e. the ansatz with zero variational layers.
pub fn evaluate_initial(spec: &AnsatzSpec, ham: &PauliSum, exact_energy: f64) -> Result<VqeResult> {
    let (init, _) = assemble(&spec.truncated(0))?;
    let state = init.run(&StateVector::zero_state(spec.n_qubits)?, &[])?;
    let e = state.expectation(ham)?;
    Ok(VqeResult {
        n_layers: 0,
        theta_opt: Vec::new(),
        energy: e,
        exact_energy,
        rel_error: relative_error(exact_energy, e),
        iterations: 0,
        trace: vec![e],
        restart_index: 0,
        converged: true,
        stalled: false,
    })
}

/// Optimizes `spec` truncated to `n_layers`, starting from `base` (the
/// previous layer count's optimum) extended by noise. Best of the restarts.
pub fn optimize_layer(
    spec: &AnsatzSpec,
    ham: &PauliSum,
    exact_energy: f64,
    n_layers: usize,
    base: &[f64],
    config: &VqeConfig,
) -> Result<VqeResult> {
    config.validate()?;
    let (init, circuit) = assemble(&spec.truncated(n_layers))?;
    let initial = init.run(&StateVector::zero_state(spec.n_qubits)?, &[])?;
    let p = circuit.n_params();
    if base.len() > p {
        return contract(format!("warm start has {} parameters, circuit only {p}", base.len()));
    }
    let runs: Vec<Result<VqeResult>> = (0..config.n_restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = derived_rng(config.rng_seed, &[n_layers as u64, r as u64]);
            let w = config.warm_start_noise;
            let mut theta0 = base.to_vec();
            theta0.extend((base.len()..p).map(|_| if w > 0.0 { rng.random_range(-w..=w) } else { 0.0 }));
            let mut res = minimize(&circuit, ham, &initial, &theta0, exact_energy, config)?;
            res.restart_index = r;
            res.n_layers = n_layers;
            Ok(res)
        })
        .collect();
    let mut best: Option<VqeResult> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.energy < b.energy) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// Results for `1..=max_layers`, each warm-started from the previous optimum.
pub fn layer_sweep(
    spec: &AnsatzSpec,
    ham: &PauliSum,
    exact_energy: f64,
    max_layers: usize,
    config: &VqeConfig,
) -> Result<Vec<VqeResult>> {
    let mut out: Vec<VqeResult> = Vec::with_capacity(max_layers);
    for m in 1..=max_layers {
        let base = out.last().map(|r| r.theta_opt.as_slice()).unwrap_or(&[]);
        out.push(optimize_layer(spec, ham, exact_energy, m, base, config)?);
    }
    Ok(out)
}

/// Median of the first window of three consecutive values whose spread is
/// below 10% of the smallest, or `None` when the sequence never levels off.
pub fn plateau_value(rel_errors: &[f64]) -> Result<Option<f64>> {
    if rel_errors.len() < 3 {
        return contract(format!("plateau detection needs at least 3 layers, got {}", rel_errors.len()));
    }
    for w in rel_errors.windows(3) {
        let lo = w.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = w.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi - lo < 0.1 * lo {
            let mut s = w.to_vec();
            s.sort_by(f64::total_cmp);
            return Ok(Some(s[1]));
        }
    }
    Ok(None)
}

/// First layer count whose relative error is below `threshold`.
pub fn first_layer_below(results: &[VqeResult], threshold: f64) -> Option<usize> {
    results.iter().find(|r| r.rel_error < threshold).map(|r| r.n_layers)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::pauli::PauliString;

    fn rx_problem() -> (Circuit, PauliSum, StateVector) {
        let mut c = Circuit::new(1);
        c.rx(0).unwrap();
        let h = PauliSum::new(1).with(1.0, PauliString::z(0)).unwrap();
        (c, h, StateVector::zero_state(1).unwrap())
    }

    #[test]
    fn single_rx_closed_form() {
        let (c, h, s) = rx_problem();
        let (e, g) = energy_and_gradient(&c, &[0.3], &h, &s).unwrap();
        assert!((e - 0.3f64.cos()).abs() < 1e-14);
        assert!((g[0] + 0.3f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn zero_parameter_circuit() {
        let c = Circuit::new(2);
        let h = PauliSum::new(2).with(0.5, PauliString::zz(0, 1)).unwrap();
        let s = StateVector::zero_state(2).unwrap();
        let (e, g) = energy_and_gradient(&c, &[], &h, &s).unwrap();
        assert_eq!(e, 0.5);
        assert!(g.is_empty());
    }

    #[test]
    fn size_mismatch() {
        let (c, h, s) = rx_problem();
        assert!(energy_and_gradient(&c, &[0.1, 0.2], &h, &s).is_err());
        let h2 = PauliSum::new(2);
        assert!(energy_and_gradient(&c, &[0.1], &h2, &s).is_err());
    }

    #[test]
    fn rx_minimizes_to_pi() {
        let (c, h, s) = rx_problem();
        let r = minimize(&c, &h, &s, &[0.01], -1.0, &VqeConfig::default()).unwrap();
        assert!((r.energy + 1.0).abs() < 1e-12);
        let t = r.theta_opt[0].rem_euclid(2.0 * PI);
        assert!((t - PI).abs() < 1e-5);
        assert!(r.rel_error < 1e-12);
        assert_eq!(r.rel_error, r.recomputed_rel_error());
    }

    #[test]
    fn start_at_minimum_is_stationary() {
        let (c, h, s) = rx_problem();
        let r = minimize(&c, &h, &s, &[PI], -1.0, &VqeConfig::default()).unwrap();
        assert!(r.iterations <= 1);
        assert!((r.energy + 1.0).abs() < 1e-12);
    }

    #[test]
    fn plateau_detection() {
        assert_eq!(plateau_value(&[1e-4, 1e-4, 1e-4]).unwrap(), Some(1e-4));
        let decay: Vec<f64> = (0..10).map(|k| 0.5f64.powi(k)).collect();
        assert_eq!(plateau_value(&decay).unwrap(), None);
        assert!(plateau_value(&[1.0, 1.0]).is_err());
        assert_eq!(plateau_value(&[1.0, 0.1, 0.0101, 0.0100, 0.0102, 0.001]).unwrap(), Some(0.0101));
    }

    #[test]
    fn config_validation() {
        assert!(VqeConfig { grad_tol: 0.0, ..VqeConfig::default() }.validate().is_err());
        assert!(VqeConfig { n_restarts: 0, ..VqeConfig::default() }.validate().is_err());
        assert_eq!(VqeConfig::multi_restart().n_restarts, 10);
    }
}
