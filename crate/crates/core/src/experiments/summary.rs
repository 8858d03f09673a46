//! Per-curve and per-ensemble reductions of result rows.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::run::{read_rows, ResultRow};
use crate::error::{Error, Result};
use crate::vqe::plateau_value;

/// Relative error below which a layer counts as converged to the ground state.
pub const TRANSITION_THRESHOLD: f64 = 1e-6;

/// One relative-error-versus-layers curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSummary {
    pub experiment_id: String,
    pub variant: String,
    pub point: usize,
    pub config_index: Option<usize>,
    pub axis: String,
    pub axis_value: f64,
    pub n_qubits: usize,
    pub max_layers: usize,
    pub plateau: Option<f64>,
    pub transition_layer: Option<usize>,
    pub best_rel_error: f64,
    pub final_match_count: Option<usize>,
}

/// Mean and standard error over disorder configurations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub experiment_id: String,
    pub variant: String,
    pub point: usize,
    pub axis: String,
    pub axis_value: f64,
    pub n_qubits: usize,
    pub layers: usize,
    pub n_configs: usize,
    pub rel_error_mean: Option<f64>,
    pub rel_error_stderr: Option<f64>,
    pub rg_mean_length: Option<f64>,
    pub rg_mean_length_stderr: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub curves: Vec<CurveSummary>,
    pub ensembles: Vec<EnsembleSummary>,
}

/// Mean and standard error of the mean; the error is zero for a single value.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn optional_mean_stderr(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let (m, s) = mean_stderr(xs);
    (Some(m), Some(s))
}

/// Reduces rows to curves and ensembles. Rows with an error are skipped.
/// Rows from different experiments are refused unless `force` is set.
pub fn summarize(rows: &[ResultRow], force: bool) -> Result<Summary> {
    let mut ids: Vec<&str> = rows.iter().map(|r| r.experiment_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    if ids.len() > 1 && !force {
        return Err(Error::Config(format!("rows mix experiments {}; pass force to combine", ids.join(", "))));
    }

    let ok: Vec<&ResultRow> = rows.iter().filter(|r| r.error.is_empty()).collect();

    let mut curves: BTreeMap<(&str, &str, usize, Option<usize>), Vec<&ResultRow>> = BTreeMap::new();
    for r in ok.iter().filter(|r| r.rel_error.is_some()) {
        curves.entry((&r.experiment_id, &r.variant, r.point, r.config_index)).or_default().push(r);
    }
    let mut summary = Summary::default();
    for (_, mut group) in curves {
        group.sort_by_key(|r| r.layers);
        let errs: Vec<f64> = group.iter().filter_map(|r| r.rel_error).collect();
        let plateau = if errs.len() >= 3 { plateau_value(&errs)? } else { None };
        let first = group[0];
        let last = group[group.len() - 1];
        summary.curves.push(CurveSummary {
            experiment_id: first.experiment_id.clone(),
            variant: first.variant.clone(),
            point: first.point,
            config_index: first.config_index,
            axis: first.axis.clone(),
            axis_value: if group.len() > 1 { last.axis_value } else { first.axis_value },
            n_qubits: first.n_qubits,
            max_layers: last.layers,
            plateau,
            transition_layer: group.iter().find(|r| r.rel_error < Some(TRANSITION_THRESHOLD)).map(|r| r.layers),
            best_rel_error: errs.iter().copied().fold(f64::INFINITY, f64::min),
            final_match_count: last.match_count,
        });
    }

    let mut ensembles: BTreeMap<(&str, &str, usize, usize), Vec<&ResultRow>> = BTreeMap::new();
    for r in &ok {
        ensembles.entry((&r.experiment_id, &r.variant, r.point, r.layers)).or_default().push(r);
    }
    for (_, group) in ensembles {
        let first = group[0];
        let errs: Vec<f64> = group.iter().filter_map(|r| r.rel_error).collect();
        let (rel_error_mean, rel_error_stderr) = optional_mean_stderr(&errs);
        let lens: Vec<f64> = group.iter().filter_map(|r| r.rg_mean_length).collect();
        let (rg_mean_length, rg_mean_length_stderr) = optional_mean_stderr(&lens);
        summary.ensembles.push(EnsembleSummary {
            experiment_id: first.experiment_id.clone(),
            variant: first.variant.clone(),
            point: first.point,
            axis: first.axis.clone(),
            axis_value: first.axis_value,
            n_qubits: first.n_qubits,
            layers: first.layers,
            n_configs: group.len(),
            rel_error_mean,
            rel_error_stderr,
            rg_mean_length,
            rg_mean_length_stderr,
        });
    }
    Ok(summary)
}

pub fn summarize_files<P: AsRef<Path>>(paths: &[P], force: bool) -> Result<Summary> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_rows(p.as_ref())?);
    }
    summarize(&rows, force)
}

/// Writes `curves` and `ensembles` tables as CSV.
pub fn write_summary(summary: &Summary, curves: &Path, ensembles: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(curves)?;
    for c in &summary.curves {
        w.serialize(c)?;
    }
    w.flush()?;
    let mut w = csv::Writer::from_path(ensembles)?;
    for e in &summary.ensembles {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}
