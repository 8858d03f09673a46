//! Sweep execution and result emission.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::time::Instant;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{tag, Diagnostic, Experiment, ExperimentConfig, ModelConfig, SweepAxis, SweepPoint};
use crate::ansatz::{assemble, AnsatzSpec};
use crate::entanglement::{entropy, impurity_cut, match_count, reduced_density, spectrum};
use crate::error::{contract, Result};
use crate::exact::{lowest_eigenpairs, project_onto_degenerate};
use crate::gradstats::gradient_variance;
use crate::models::{
    build_ladder, build_random_chain, ladder_pairs, ImpurityModelParams, LadderModelParams, RandomChainParams,
};
use crate::pauli::PauliSum;
use crate::rg::{run_rg, sample_couplings};
use crate::rng::derived_rng;
use crate::statevector::StateVector;
use crate::vqe::{evaluate_initial, optimize_layer, VqeConfig, VqeResult};

pub const SOFTWARE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment_id: String,
    pub variant: String,
    pub point: usize,
    pub config_index: Option<usize>,
    pub axis: String,
    pub axis_value: f64,
    pub n_qubits: usize,
    pub layers: usize,
    pub model: String,
    pub ansatz: String,
    pub n_params: Option<usize>,
    pub energy: Option<f64>,
    pub exact_energy: Option<f64>,
    pub rel_error: Option<f64>,
    pub iterations: Option<usize>,
    pub restart_index: Option<usize>,
    pub converged: Option<bool>,
    pub stalled: Option<bool>,
    pub ground_degeneracy: Option<usize>,
    pub entropy_exact: Option<f64>,
    pub entropy_trial: Option<f64>,
    pub match_count: Option<usize>,
    pub gradvar_mean: Option<f64>,
    pub gradvar_outlier: Option<usize>,
    pub rg_mean_length: Option<f64>,
    pub wall_time: f64,
    pub seed: u64,
    pub grad_tol: f64,
    pub max_iters: usize,
    pub software_version: String,
    /// Empty on success.
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub experiment_id: String,
    pub variant: String,
    pub point: usize,
    pub config_index: Option<usize>,
    pub layers: usize,
    pub source: String,
    pub k: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradvarRow {
    pub experiment_id: String,
    pub variant: String,
    pub point: usize,
    pub config_index: Option<usize>,
    pub layers: usize,
    pub param: usize,
    pub variance: f64,
    pub mean: f64,
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub force_large: bool,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub results_path: PathBuf,
    pub meta_path: PathBuf,
    pub spectra_path: Option<PathBuf>,
    pub gradvar_path: Option<PathBuf>,
    pub rows: usize,
    pub failed_rows: usize,
}

/// `dir/stem{suffix}` next to `path`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("results");
    path.with_file_name(format!("{stem}{suffix}"))
}

/// Hamiltonian for a resolved model; random chains draw configuration
/// `config` from a stream keyed by `(seed, n, config)`.
pub fn build_model(model: &ModelConfig, seed: u64, config: usize) -> Result<(PauliSum, Option<Vec<f64>>)> {
    Ok(match *model {
        ModelConfig::TfimImpurity { n_qubits, h_x, h0_z } => {
            (ImpurityModelParams::tfim(n_qubits, h_x, h0_z).build()?, None)
        }
        ModelConfig::XxzImpurity { n_qubits, delta, h0_z } => {
            (ImpurityModelParams::xxz(n_qubits, delta, h0_z).build()?, None)
        }
        ModelConfig::Ladder { n_qubits, alpha, j } => (build_ladder(&LadderModelParams { n_qubits, alpha, j })?, None),
        ModelConfig::RandomChain { n_qubits, delta, .. } => {
            let mut rng = derived_rng(seed, &[n_qubits as u64, config as u64]);
            let couplings = sample_couplings(n_qubits, delta, &mut rng)?;
            let ham = build_random_chain(&RandomChainParams { n_qubits, couplings: couplings.clone() })?;
            (ham, Some(couplings))
        }
    })
}

/// Ansatz for a resolved model, with the pairing the model implies.
pub fn build_spec(
    cfg: &ExperimentConfig,
    model: &ModelConfig,
    n_layers: usize,
    couplings: Option<&[f64]>,
) -> Result<AnsatzSpec> {
    let a = &cfg.ansatz;
    let n = model.n_qubits();
    let mut spec = AnsatzSpec {
        family: a.family,
        n_qubits: n,
        n_layers,
        x_set: a.x_set.resolve(n_layers)?,
        sequence: a.sequence.clone(),
        initial_state: a.initial_state,
        pairing: None,
        couplings: None,
        impurity_gating: a.impurity_gating,
    };
    match model {
        ModelConfig::Ladder { .. } => spec.pairing = Some(ladder_pairs(n)),
        ModelConfig::RandomChain { .. } => {
            let Some(c) = couplings else {
                return contract("random chain ansatz needs couplings");
            };
            spec.pairing = Some(run_rg(c)?.pairs);
            spec.couplings = Some(c.to_vec());
        }
        _ => {}
    }
    spec.validate()?;
    Ok(spec)
}

struct Task<'a> {
    order: usize,
    label: &'a str,
    cfg: &'a ExperimentConfig,
    point: SweepPoint,
    config: usize,
    ensemble: bool,
}

#[derive(Default)]
struct TaskOutput {
    rows: Vec<ResultRow>,
    spectra: Vec<SpectrumRow>,
    gradvar: Vec<GradvarRow>,
}

fn base_row(t: &Task, seed: u64, layers: usize) -> ResultRow {
    let axis_value = if t.cfg.sweep.axis == SweepAxis::Layers { layers as f64 } else { t.point.axis_value };
    ResultRow {
        experiment_id: t.cfg.experiment_id.clone(),
        variant: t.label.to_string(),
        point: t.point.index,
        config_index: t.ensemble.then_some(t.config),
        axis: tag(&t.cfg.sweep.axis),
        axis_value,
        n_qubits: t.point.model.n_qubits(),
        layers,
        model: t.point.model.descriptor(),
        ansatz: t.cfg.ansatz.descriptor(),
        n_params: None,
        energy: None,
        exact_energy: None,
        rel_error: None,
        iterations: None,
        restart_index: None,
        converged: None,
        stalled: None,
        ground_degeneracy: None,
        entropy_exact: None,
        entropy_trial: None,
        match_count: None,
        gradvar_mean: None,
        gradvar_outlier: None,
        rg_mean_length: None,
        wall_time: 0.0,
        seed,
        grad_tol: t.cfg.vqe.grad_tol,
        max_iters: t.cfg.vqe.max_iters,
        software_version: SOFTWARE_VERSION.to_string(),
        error: String::new(),
    }
}

fn run_task(t: &Task, seed: u64) -> TaskOutput {
    match evaluate(t, seed) {
        Ok(out) => out,
        Err(e) => {
            let rows =
                t.point.layers.iter().map(|&l| ResultRow { error: e.to_string(), ..base_row(t, seed, l) }).collect();
            TaskOutput { rows, ..TaskOutput::default() }
        }
    }
}

fn evaluate(t: &Task, seed: u64) -> Result<TaskOutput> {
    let cfg = t.cfg;
    let model = &t.point.model;
    let n = model.n_qubits();
    let (ham, couplings) = build_model(model, seed, t.config)?;
    let wants_entanglement = cfg.has(Diagnostic::Entropy) || cfg.has(Diagnostic::Spectrum);
    let n_eig = if wants_entanglement { cfg.spectrum.n_eigenpairs.min(1 << n) } else { 1 };
    let exact = lowest_eigenpairs(&ham, n_eig)?;
    let e0 = exact.ground_energy();
    let max_layers = *t.point.layers.last().expect("non-empty layer list");
    let spec = build_spec(cfg, model, max_layers, couplings.as_deref())?;
    let rg_len = match (&couplings, cfg.has(Diagnostic::RgStats)) {
        (Some(c), true) => Some(run_rg(c)?.mean_length()),
        _ => None,
    };
    let vqe_cfg = VqeConfig {
        rng_seed: derived_rng(seed, &[cfg.vqe.rng_seed, t.point.index as u64, t.config as u64]).next_u64(),
        ..cfg.vqe
    };
    let cut = if model.is_impurity() { impurity_cut(n) } else { n / 2 };

    let optimize = cfg.has(Diagnostic::Energy);
    let mut out = TaskOutput::default();
    let mut base: Vec<f64> = Vec::new();
    for m in 0..=max_layers {
        let record = t.point.layers.contains(&m);
        if !record && (m == 0 || !optimize) {
            continue;
        }
        let start = Instant::now();
        let res: Option<VqeResult> = match (optimize, m) {
            (false, _) => None,
            (true, 0) => Some(evaluate_initial(&spec, &ham, e0)?),
            (true, _) => Some(optimize_layer(&spec, &ham, e0, m, &base, &vqe_cfg)?),
        };
        let wall = start.elapsed().as_secs_f64();
        if let Some(r) = &res {
            base.clone_from(&r.theta_opt);
        }
        if !record {
            continue;
        }
        let mut row = ResultRow {
            exact_energy: Some(e0),
            ground_degeneracy: Some(exact.ground_degeneracy()),
            rg_mean_length: rg_len,
            wall_time: wall,
            ..base_row(t, seed, m)
        };
        if let Some(r) = &res {
            row.energy = Some(r.energy);
            row.rel_error = Some(r.rel_error);
            row.iterations = Some(r.iterations);
            row.restart_index = Some(r.restart_index);
            row.converged = Some(r.converged);
            row.stalled = Some(r.stalled);
        }

        let truncated = spec.truncated(m);
        let (init, circuit) = assemble(&truncated)?;
        let initial = init.run(&StateVector::zero_state(n)?, &[])?;
        row.n_params = Some(circuit.n_params());
        if let (true, Some(res)) = (wants_entanglement, &res) {
            let trial = circuit.run(&initial, &res.theta_opt)?;
            let reference = if exact.ground_degeneracy() > 1 {
                project_onto_degenerate(&exact, &trial)?
            } else {
                exact.ground_state().clone()
            };
            let rho_exact = reduced_density(&reference, cut)?;
            let rho_trial = reduced_density(&trial, cut)?;
            let eps_exact = spectrum(&rho_exact, cfg.spectrum.floor);
            let eps_trial = spectrum(&rho_trial, cfg.spectrum.floor);
            if cfg.has(Diagnostic::Entropy) {
                row.entropy_exact = Some(entropy(&rho_exact)?);
                row.entropy_trial = Some(entropy(&rho_trial)?);
            }
            if cfg.has(Diagnostic::Spectrum) {
                row.match_count = Some(match_count(&eps_exact, &eps_trial, cfg.spectrum.match_tol));
                for (source, eps) in [("exact", &eps_exact), ("vqe", &eps_trial)] {
                    out.spectra.extend(eps.iter().enumerate().map(|(k, &epsilon)| SpectrumRow {
                        experiment_id: cfg.experiment_id.clone(),
                        variant: t.label.to_string(),
                        point: t.point.index,
                        config_index: row.config_index,
                        layers: m,
                        source: source.to_string(),
                        k,
                        epsilon,
                    }));
                }
            }
        }
        if cfg.has(Diagnostic::Gradvar) {
            let gv_seed = derived_rng(seed, &[u64::MAX, t.point.index as u64, t.config as u64, m as u64]).next_u64();
            let report = gradient_variance(&circuit, &ham, &initial, cfg.gradvar.n_samples, gv_seed)?;
            row.gradvar_mean = Some(report.mean_excluding_outlier);
            row.gradvar_outlier = report.outlier_index;
            out.gradvar.extend(report.per_param_variance.iter().zip(&report.per_param_mean).enumerate().map(
                |(param, (&variance, &mean))| GradvarRow {
                    experiment_id: cfg.experiment_id.clone(),
                    variant: t.label.to_string(),
                    point: t.point.index,
                    config_index: row.config_index,
                    layers: m,
                    param,
                    variance,
                    mean,
                },
            ));
        }
        out.rows.push(row);
    }
    Ok(out)
}

#[derive(Serialize)]
struct OptimizerInfo {
    method: &'static str,
    line_search: &'static str,
    c1: f64,
    c2: f64,
}

#[derive(Serialize)]
struct VariantMeta<'a> {
    label: &'a str,
    config: &'a ExperimentConfig,
}

#[derive(Serialize)]
struct Metadata<'a> {
    experiment_id: &'a str,
    software_version: &'a str,
    seed_override: Option<u64>,
    results: &'a Path,
    spectra: Option<&'a Path>,
    gradvar: Option<&'a Path>,
    optimizer: OptimizerInfo,
    config: &'a toml::Table,
    variants: Vec<VariantMeta<'a>>,
}

struct Sinks {
    rows: csv::Writer<std::fs::File>,
    spectra: Option<csv::Writer<std::fs::File>>,
    gradvar: Option<csv::Writer<std::fs::File>>,
}

impl Sinks {
    fn write(&mut self, out: &TaskOutput) -> Result<()> {
        for r in &out.rows {
            self.rows.serialize(r)?;
        }
        self.rows.flush()?;
        if let Some(w) = &mut self.spectra {
            for r in &out.spectra {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        if let Some(w) = &mut self.gradvar {
            for r in &out.gradvar {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Ok(())
    }
}

/// Runs every variant and sweep point, streaming rows to disk in task order.
pub fn run_experiment(exp: &Experiment, opts: &RunOptions) -> Result<RunReport> {
    exp.validate(opts.force_large)?;
    let results_path = opts.out.clone().unwrap_or_else(|| exp.output_path().to_path_buf());
    if let Some(dir) = results_path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let any = |d: Diagnostic| exp.variants.iter().any(|(_, c)| c.has(d));
    let spectra_path = any(Diagnostic::Spectrum).then(|| sibling(&results_path, "_spectra.csv"));
    let gradvar_path = any(Diagnostic::Gradvar).then(|| sibling(&results_path, "_gradvar.csv"));
    let meta_path = sibling(&results_path, ".meta.json");

    let meta = Metadata {
        experiment_id: exp.experiment_id(),
        software_version: SOFTWARE_VERSION,
        seed_override: opts.seed,
        results: &results_path,
        spectra: spectra_path.as_deref(),
        gradvar: gradvar_path.as_deref(),
        optimizer: OptimizerInfo { method: "bfgs", line_search: "strong_wolfe", c1: 1e-4, c2: 0.9 },
        config: &exp.raw,
        variants: exp.variants.iter().map(|(label, config)| VariantMeta { label, config }).collect(),
    };
    std::fs::write(&meta_path, serde_json::to_string_pretty(&meta)?)?;

    let mut tasks = Vec::new();
    for (label, cfg) in &exp.variants {
        let n_configs = cfg.model.n_configs();
        let ensemble = matches!(cfg.model, ModelConfig::RandomChain { .. });
        for point in cfg.points()? {
            for config in 0..n_configs {
                tasks.push(Task { order: tasks.len(), label, cfg, point: point.clone(), config, ensemble });
            }
        }
    }

    let mut sinks = Sinks {
        rows: csv::Writer::from_path(&results_path)?,
        spectra: spectra_path.as_ref().map(csv::Writer::from_path).transpose()?,
        gradvar: gradvar_path.as_ref().map(csv::Writer::from_path).transpose()?,
    };
    let (tx, rx) = mpsc::channel::<(usize, TaskOutput)>();
    let (rows, failed_rows) = std::thread::scope(|s| {
        let writer = s.spawn(move || -> Result<(usize, usize)> {
            // buffer out-of-order completions so the files follow task order
            let mut pending = BTreeMap::new();
            let mut next = 0;
            let (mut rows, mut failed) = (0, 0);
            for (order, out) in rx {
                pending.insert(order, out);
                while let Some(out) = pending.remove(&next) {
                    sinks.write(&out)?;
                    rows += out.rows.len();
                    failed += out.rows.iter().filter(|r| !r.error.is_empty()).count();
                    next += 1;
                }
            }
            Ok((rows, failed))
        });
        tasks.par_iter().for_each_with(tx, |tx, t| {
            let seed = opts.seed.unwrap_or(t.cfg.seed);
            // the receiver only disappears if the writer failed, which is reported below
            let _ = tx.send((t.order, run_task(t, seed)));
        });
        writer.join().expect("writer thread panicked")
    })?;

    Ok(RunReport { results_path, meta_path, spectra_path, gradvar_path, rows, failed_rows })
}

pub fn run_experiment_file(path: &Path, opts: &RunOptions) -> Result<RunReport> {
    run_experiment(&Experiment::from_path(path)?, opts)
}

/// Reads a results file written by [`run_experiment`].
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>> {
    let mut reader = csv::Reader::from_path(path)?;
    reader.deserialize().map(|r| r.map_err(Into::into)).collect()
}
