//! Declarative experiment configuration.
//!
//! A config is a TOML document with `model`, `ansatz`, `sweep`, `vqe` and
//! `output` tables. An optional `[[variants]]` array lists overrides; each
//! variant is the base document with its tables merged in key by key.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::ansatz::{AnsatzFamily, GateSetTag, ImpurityGating, InitialState};
use crate::entanglement::{DEFAULT_FLOOR, DEFAULT_MATCH_TOL};
use crate::error::{Error, Result};
use crate::gradstats::DEFAULT_SAMPLES;
use crate::vqe::VqeConfig;

/// Largest register simulated without `--force-large`.
pub const DESK_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    TfimImpurity {
        n_qubits: usize,
        #[serde(default = "minus_one")]
        h_x: f64,
        #[serde(default)]
        h0_z: f64,
    },
    XxzImpurity {
        n_qubits: usize,
        /// ZZ anisotropy.
        delta: f64,
        #[serde(default)]
        h0_z: f64,
    },
    Ladder {
        n_qubits: usize,
        #[serde(default = "one")]
        alpha: f64,
        j: f64,
    },
    RandomChain {
        n_qubits: usize,
        /// Disorder strength.
        delta: f64,
        #[serde(default = "one_usize")]
        n_configs: usize,
    },
}

fn minus_one() -> f64 {
    -1.0
}

fn one() -> f64 {
    1.0
}

fn one_usize() -> usize {
    1
}

impl ModelConfig {
    pub fn n_qubits(&self) -> usize {
        match *self {
            Self::TfimImpurity { n_qubits, .. }
            | Self::XxzImpurity { n_qubits, .. }
            | Self::Ladder { n_qubits, .. }
            | Self::RandomChain { n_qubits, .. } => n_qubits,
        }
    }

    pub fn set_n_qubits(&mut self, n: usize) {
        match self {
            Self::TfimImpurity { n_qubits, .. }
            | Self::XxzImpurity { n_qubits, .. }
            | Self::Ladder { n_qubits, .. }
            | Self::RandomChain { n_qubits, .. } => *n_qubits = n,
        }
    }

    pub fn n_configs(&self) -> usize {
        match *self {
            Self::RandomChain { n_configs, .. } => n_configs,
            _ => 1,
        }
    }

    pub fn is_impurity(&self) -> bool {
        matches!(self, Self::TfimImpurity { .. } | Self::XxzImpurity { .. })
    }

    pub fn descriptor(&self) -> String {
        match self {
            Self::TfimImpurity { n_qubits, h_x, h0_z } => {
                format!("tfim_impurity(n={n_qubits},h_x={h_x},h0_z={h0_z})")
            }
            Self::XxzImpurity { n_qubits, delta, h0_z } => {
                format!("xxz_impurity(n={n_qubits},delta={delta},h0_z={h0_z})")
            }
            Self::Ladder { n_qubits, alpha, j } => format!("ladder(n={n_qubits},alpha={alpha},j={j})"),
            Self::RandomChain { n_qubits, delta, n_configs } => {
                format!("random_chain(n={n_qubits},delta={delta},configs={n_configs})")
            }
        }
    }
}

/// `x_set = "all"` or an explicit list of 1-based layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum XSetConfig {
    Keyword(String),
    Layers(Vec<usize>),
}

impl Default for XSetConfig {
    fn default() -> Self {
        Self::Layers(Vec::new())
    }
}

impl XSetConfig {
    pub fn resolve(&self, n_layers: usize) -> Result<Vec<usize>> {
        match self {
            Self::Keyword(k) if k == "all" => Ok((1..=n_layers).collect()),
            Self::Keyword(k) => Err(Error::Config(format!("ansatz.x_set: expected \"all\" or a list, got {k:?}"))),
            Self::Layers(l) => Ok(l.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzConfig {
    pub family: AnsatzFamily,
    #[serde(default)]
    pub n_layers: usize,
    #[serde(default)]
    pub x_set: XSetConfig,
    #[serde(default)]
    pub sequence: Vec<GateSetTag>,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub impurity_gating: ImpurityGating,
}

/// The serialized name of a unit enum variant.
pub(crate) fn tag<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

impl AnsatzConfig {
    pub fn descriptor(&self) -> String {
        let inner = match self.family {
            AnsatzFamily::ImpurityLayers => {
                let x = match &self.x_set {
                    XSetConfig::Keyword(k) => k.clone(),
                    XSetConfig::Layers(l) => format!("{l:?}"),
                };
                match self.impurity_gating {
                    ImpurityGating::BondsOnly => format!("x={x};"),
                    ImpurityGating::BondsAndRotations => format!("x={x},gated_rotations;"),
                }
            }
            AnsatzFamily::U4Sequence | AnsatzFamily::UalphaSequence => {
                let tags: Vec<String> = self.sequence.iter().map(tag).collect();
                format!("{};", tags.join("-"))
            }
            AnsatzFamily::Lightcone => String::new(),
        };
        format!("{}({inner}{})", tag(&self.family), tag(&self.initial_state))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Layers,
    NQubits,
    H0Z,
    #[serde(rename = "J_over_alpha", alias = "j_over_alpha")]
    JOverAlpha,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    /// Layer counts recorded at each point of a non-`layers` sweep; defaults
    /// to `ansatz.n_layers` alone.
    #[serde(default)]
    pub record_layers: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagnostic {
    Energy,
    Entropy,
    Spectrum,
    Gradvar,
    RgStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GradvarConfig {
    pub n_samples: usize,
}

impl Default for GradvarConfig {
    fn default() -> Self {
        Self { n_samples: DEFAULT_SAMPLES }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub match_tol: f64,
    pub floor: f64,
    /// Eigenpairs requested from the Lanczos solver.
    pub n_eigenpairs: usize,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self { match_tol: DEFAULT_MATCH_TOL, floor: DEFAULT_FLOOR, n_eigenpairs: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
}

fn default_diagnostics() -> Vec<Diagnostic> {
    vec![Diagnostic::Energy]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    #[serde(default)]
    pub seed: u64,
    pub model: ModelConfig,
    pub ansatz: AnsatzConfig,
    pub sweep: SweepConfig,
    #[serde(default)]
    pub vqe: VqeConfig,
    #[serde(default = "default_diagnostics")]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub gradvar: GradvarConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    pub output: OutputConfig,
}

/// One point of a sweep with its resolved model and layer counts.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub index: usize,
    pub axis_value: f64,
    pub model: ModelConfig,
    /// Ascending layer counts to report. For a `layers` sweep there is a
    /// single point holding all of them.
    pub layers: Vec<usize>,
}

fn as_count(axis: &str, v: f64) -> Result<usize> {
    if v < 0.0 || v.fract() != 0.0 || !v.is_finite() {
        return Err(Error::Config(format!("sweep.values: {axis} entries must be non-negative integers, got {v}")));
    }
    Ok(v as usize)
}

impl ExperimentConfig {
    pub fn has(&self, d: Diagnostic) -> bool {
        self.diagnostics.contains(&d)
    }

    /// Checks every field; `force_large` lifts the register-size guard.
    pub fn validate(&self, force_large: bool) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.experiment_id.trim().is_empty() {
            return cfg("experiment_id must not be empty".into());
        }
        if self.sweep.values.is_empty() {
            return cfg("sweep.values must not be empty".into());
        }
        self.vqe.validate().map_err(|e| Error::Config(format!("vqe: {e}")))?;
        let model_ok = match self.sweep.axis {
            SweepAxis::H0Z => self.model.is_impurity(),
            SweepAxis::JOverAlpha => matches!(self.model, ModelConfig::Ladder { .. }),
            SweepAxis::Delta => matches!(self.model, ModelConfig::RandomChain { .. }),
            SweepAxis::Layers | SweepAxis::NQubits => true,
        };
        if !model_ok {
            return cfg(format!(
                "sweep.axis {:?} does not apply to model {}",
                self.sweep.axis,
                self.model.descriptor()
            ));
        }
        if (self.has(Diagnostic::Entropy) || self.has(Diagnostic::Spectrum)) && !self.has(Diagnostic::Energy) {
            return cfg("diagnostics: entropy and spectrum compare the optimized state, add energy".into());
        }
        if self.has(Diagnostic::RgStats) && !matches!(self.model, ModelConfig::RandomChain { .. }) {
            return cfg("diagnostics: rg_stats needs a random_chain model".into());
        }
        if let ModelConfig::RandomChain { delta, n_configs, .. } = self.model {
            if n_configs == 0 {
                return cfg("model.n_configs must be at least 1".into());
            }
            if !(delta >= 1.0) {
                return cfg(format!("model.delta must be >= 1, got {delta}"));
            }
        }
        if self.has(Diagnostic::Gradvar) && self.gradvar.n_samples < crate::gradstats::MIN_SAMPLES {
            return cfg(format!("gradvar.n_samples must be at least {}", crate::gradstats::MIN_SAMPLES));
        }
        if !(self.spectrum.match_tol > 0.0) || !(self.spectrum.floor > 0.0) || self.spectrum.n_eigenpairs == 0 {
            return cfg("spectrum: match_tol and floor must be positive, n_eigenpairs at least 1".into());
        }
        if let XSetConfig::Keyword(k) = &self.ansatz.x_set {
            if k != "all" {
                return cfg(format!("ansatz.x_set: expected \"all\" or a list, got {k:?}"));
            }
        }
        for p in self.points()? {
            let n = p.model.n_qubits();
            if n > DESK_LIMIT && !force_large {
                return cfg(format!(
                    "{n} qubits exceeds the desk limit of {DESK_LIMIT}; pass --force-large to run anyway"
                ));
            }
            if !(2..=crate::statevector::StateVector::MAX_QUBITS).contains(&n) {
                return cfg(format!("model.n_qubits {n} outside 2..={}", crate::statevector::StateVector::MAX_QUBITS));
            }
            let deepest = p.layers.last().copied().unwrap_or(0);
            if let XSetConfig::Layers(x) = &self.ansatz.x_set {
                if let Some(bad) = x.iter().find(|&&l| l == 0 || l > deepest) {
                    return cfg(format!("ansatz.x_set: layer {bad} outside 1..={deepest}"));
                }
            }
        }
        Ok(())
    }

    /// Sweep points in order.
    pub fn points(&self) -> Result<Vec<SweepPoint>> {
        let default_layers = match &self.sweep.record_layers {
            Some(l) => {
                let mut l = l.clone();
                l.sort_unstable();
                l.dedup();
                l
            }
            None => vec![self.ansatz.n_layers],
        };
        let mut points = Vec::with_capacity(self.sweep.values.len());
        if self.sweep.axis == SweepAxis::Layers {
            // a single warm-started sweep; each requested layer count becomes a row
            let mut layers = self.sweep.values.iter().map(|&v| as_count("layers", v)).collect::<Result<Vec<_>>>()?;
            layers.sort_unstable();
            layers.dedup();
            let axis_value = *layers.last().expect("non-empty sweep") as f64;
            points.push(SweepPoint { index: 0, axis_value, model: self.model.clone(), layers });
            return Ok(points);
        }
        for (index, &v) in self.sweep.values.iter().enumerate() {
            let mut model = self.model.clone();
            match (self.sweep.axis, &mut model) {
                (SweepAxis::NQubits, m) => m.set_n_qubits(as_count("n_qubits", v)?),
                (SweepAxis::H0Z, ModelConfig::TfimImpurity { h0_z, .. } | ModelConfig::XxzImpurity { h0_z, .. }) => {
                    *h0_z = v
                }
                (SweepAxis::JOverAlpha, ModelConfig::Ladder { alpha, j, .. }) => *j = v * *alpha,
                (SweepAxis::Delta, ModelConfig::RandomChain { delta, .. }) => *delta = v,
                (axis, m) => {
                    return Err(Error::Config(format!(
                        "sweep.axis {axis:?} does not apply to model {}",
                        m.descriptor()
                    )))
                }
            }
            points.push(SweepPoint { index, axis_value: v, model, layers: default_layers.clone() });
        }
        Ok(points)
    }
}

/// A parsed config file: the base document and its resolved variants.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub raw: toml::Table,
    pub variants: Vec<(String, ExperimentConfig)>,
}

fn merge(base: &mut toml::Table, over: &toml::Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

fn parse_config(table: toml::Table, what: &str) -> Result<ExperimentConfig> {
    ExperimentConfig::deserialize(toml::Value::Table(table)).map_err(|e| Error::Config(format!("{what}: {e}")))
}

impl Experiment {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        let mut base = raw.clone();
        let overrides = match base.remove("variants") {
            None => Vec::new(),
            Some(toml::Value::Array(items)) => items,
            Some(_) => return Err(Error::Config("variants must be an array of tables".into())),
        };
        let mut variants = Vec::new();
        if overrides.is_empty() {
            variants.push(("base".to_string(), parse_config(base.clone(), "config")?));
        }
        for (i, item) in overrides.into_iter().enumerate() {
            let toml::Value::Table(mut over) = item else {
                return Err(Error::Config(format!("variants[{i}] must be a table")));
            };
            let label = match over.remove("label") {
                Some(toml::Value::String(s)) => s,
                None => format!("variant{i}"),
                Some(_) => return Err(Error::Config(format!("variants[{i}].label must be a string"))),
            };
            if over.contains_key("experiment_id") || over.contains_key("output") {
                return Err(Error::Config(format!("variants[{i}] may not override experiment_id or output")));
            }
            let mut doc = base.clone();
            merge(&mut doc, &over);
            variants.push((label.clone(), parse_config(doc, &format!("variant {label:?}"))?));
        }
        let mut labels: Vec<&str> = variants.iter().map(|(l, _)| l.as_str()).collect();
        labels.sort_unstable();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("variant labels must be unique".into()));
        }
        Ok(Self { raw, variants })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn experiment_id(&self) -> &str {
        &self.variants[0].1.experiment_id
    }

    pub fn output_path(&self) -> &Path {
        &self.variants[0].1.output.path
    }

    pub fn validate(&self, force_large: bool) -> Result<()> {
        for (label, v) in &self.variants {
            v.validate(force_large).map_err(|e| match e {
                Error::Config(m) if self.variants.len() > 1 => Error::Config(format!("variant {label:?}: {m}")),
                other => other,
            })?;
        }
        Ok(())
    }
}
