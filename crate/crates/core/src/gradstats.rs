//! Gradient-variance statistics over uniformly random parameter draws.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{assemble, AnsatzSpec, ImpurityGating};
use crate::error::{contract, Result};
use crate::models::ImpurityModelParams;
use crate::pauli::PauliSum;
use crate::rng::derived_rng;
use crate::statevector::{Circuit, StateVector};
use crate::vqe::energy_and_gradient;

pub const DEFAULT_SAMPLES: usize = 200;
pub const MIN_SAMPLES: usize = 50;
/// A component is an outlier when its variance exceeds this multiple of the median.
pub const OUTLIER_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientVarianceReport {
    pub per_param_variance: Vec<f64>,
    pub per_param_mean: Vec<f64>,
    pub outlier_index: Option<usize>,
    pub mean_excluding_outlier: f64,
    /// Variance of the per-component variances, outlier excluded.
    pub spread: f64,
    pub n_samples: usize,
    pub seed: u64,
}

/// Per-component gradient variance for `θ` uniform on `[0, 2π)^P`.
pub fn gradient_variance(
    circuit: &Circuit,
    ham: &PauliSum,
    initial: &StateVector,
    n_samples: usize,
    seed: u64,
) -> Result<GradientVarianceReport> {
    if n_samples < MIN_SAMPLES {
        return contract(format!("need at least {MIN_SAMPLES} samples, got {n_samples}"));
    }
    let p = circuit.n_params();
    let grads: Vec<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = derived_rng(seed, &[s as u64]);
            let theta: Vec<f64> = (0..p).map(|_| rng.random::<f64>() * TAU).collect();
            energy_and_gradient(circuit, &theta, ham, initial).map(|(_, g)| g)
        })
        .collect::<Result<_>>()?;

    let ns = n_samples as f64;
    let mut mean = vec![0.0; p];
    for g in &grads {
        mean.iter_mut().zip(g).for_each(|(m, v)| *m += v / ns);
    }
    let mut var = vec![0.0; p];
    for g in &grads {
        var.iter_mut().zip(g).zip(&mean).for_each(|((s, v), m)| *s += (v - m).powi(2) / (ns - 1.0));
    }

    let outlier_index = find_outlier(&var);
    let rest: Vec<f64> = var.iter().enumerate().filter(|(i, _)| Some(*i) != outlier_index).map(|(_, v)| *v).collect();
    let (mean_excluding_outlier, spread) = mean_and_variance(&rest);
    Ok(GradientVarianceReport {
        per_param_variance: var,
        per_param_mean: mean,
        outlier_index,
        mean_excluding_outlier,
        spread,
        n_samples,
        seed,
    })
}

/// Index of the largest variance if it exceeds [`OUTLIER_FACTOR`] times the median.
pub fn find_outlier(variances: &[f64]) -> Option<usize> {
    if variances.len() < 2 {
        return None;
    }
    let mut sorted = variances.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len().is_multiple_of(2) { 0.5 * (sorted[mid - 1] + sorted[mid]) } else { sorted[mid] };
    let (idx, &max) = variances.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1))?;
    (max > OUTLIER_FACTOR * median).then_some(idx)
}

fn mean_and_variance(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (0.0, 0.0);
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    (m, v)
}

/// Layer count as a function of chain size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DepthRule {
    Fixed(usize),
    /// `factor · n`, rounded up.
    PerQubit(f64),
}

impl DepthRule {
    pub fn layers(&self, n_qubits: usize) -> usize {
        match *self {
            Self::Fixed(l) => l,
            Self::PerQubit(f) => (f * n_qubits as f64).ceil() as usize,
        }
    }
}

/// Which layers carry the central bonds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum XVariant {
    All,
    /// Layers `1..=k`.
    First(usize),
}

impl XVariant {
    pub fn x_set(&self, n_layers: usize) -> Vec<usize> {
        match *self {
            Self::All => (1..=n_layers).collect(),
            Self::First(k) => (1..=k.min(n_layers)).collect(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::All => "all".into(),
            Self::First(k) => format!("first_{k}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n_qubits: usize,
    pub n_layers: usize,
    pub n_params: usize,
    pub mean_excluding_outlier: f64,
    pub spread: f64,
    pub outlier_index: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingSeries {
    pub variant: XVariant,
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `ln(mean variance)` against `n`; `None` with
    /// fewer than two sizes.
    pub log_slope: Option<f64>,
}

/// Least-squares slope of `ln y` against `x`.
pub fn log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1.ln() - my)).sum();
    Some(sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImpurityScan {
    pub h_x: f64,
    pub h0_z: f64,
    pub depth: DepthRule,
    pub gating: ImpurityGating,
    pub n_samples: usize,
    pub seed: u64,
}

/// Gradient variance of impurity ansätze on the TFIM across sizes.
pub fn variance_scaling(sizes: &[usize], variants: &[XVariant], scan: &ImpurityScan) -> Result<Vec<ScalingSeries>> {
    variants
        .iter()
        .map(|&variant| {
            let mut points = Vec::with_capacity(sizes.len());
            for &n in sizes {
                let layers = scan.depth.layers(n);
                let mut spec = AnsatzSpec::impurity(n, layers, variant.x_set(layers));
                spec.impurity_gating = scan.gating;
                let (init, circuit) = assemble(&spec)?;
                let initial = init.run(&StateVector::zero_state(n)?, &[])?;
                let ham = ImpurityModelParams::tfim(n, scan.h_x, scan.h0_z).build()?;
                let r = gradient_variance(&circuit, &ham, &initial, scan.n_samples, scan.seed)?;
                points.push(ScalingPoint {
                    n_qubits: n,
                    n_layers: layers,
                    n_params: circuit.n_params(),
                    mean_excluding_outlier: r.mean_excluding_outlier,
                    spread: r.spread,
                    outlier_index: r.outlier_index,
                });
            }
            let xy: Vec<(f64, f64)> = points.iter().map(|p| (p.n_qubits as f64, p.mean_excluding_outlier)).collect();
            Ok(ScalingSeries { variant, log_slope: log_slope(&xy), points })
        })
        .collect()
}
