//! Declarative ansatz families and their circuit builders.
//!
//! Every builder appends layers at the end of the parameter vector, so the
//! circuit with `m + 1` layers has the `m`-layer circuit's parameters as a
//! prefix. All families act as the identity at zero angles.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::models::{ladder_pairs, nearest_neighbor_pairs};
use crate::rg::RgOutcome;
use crate::statevector::{check_perfect_matching, singlet_circuit, Circuit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnsatzFamily {
    ImpurityLayers,
    Lightcone,
    U4Sequence,
    UalphaSequence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateSetTag {
    Short,
    Long,
    ShortVariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    ProductZero,
    SingletLadder,
    SingletRg,
    SingletNn,
}

/// Which gates of an impurity layer are dropped when the layer is not in `x_set`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImpurityGating {
    /// Only the two RZZ bonds touching the central qubit.
    #[default]
    BondsOnly,
    /// The two central RZZ bonds and the central qubit's RX/RZ rotations.
    BondsAndRotations,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub family: AnsatzFamily,
    pub n_qubits: usize,
    pub n_layers: usize,
    /// 1-based layer indices whose central bonds are kept (impurity family).
    #[serde(default)]
    pub x_set: Vec<usize>,
    #[serde(default)]
    pub sequence: Vec<GateSetTag>,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairing: Option<Vec<(usize, usize)>>,
    /// Bond couplings, needed for the `short_variant` gate set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
    #[serde(default)]
    pub impurity_gating: ImpurityGating,
}

impl AnsatzSpec {
    pub fn impurity(n_qubits: usize, n_layers: usize, x_set: Vec<usize>) -> Self {
        Self {
            family: AnsatzFamily::ImpurityLayers,
            n_qubits,
            n_layers,
            x_set,
            sequence: Vec::new(),
            initial_state: InitialState::ProductZero,
            pairing: None,
            couplings: None,
            impurity_gating: ImpurityGating::default(),
        }
    }

    /// Impurity ansatz with every layer in `x_set`.
    pub fn impurity_full(n_qubits: usize, n_layers: usize) -> Self {
        Self::impurity(n_qubits, n_layers, (1..=n_layers).collect())
    }

    pub fn lightcone(n_qubits: usize, n_layers: usize, initial_state: InitialState) -> Self {
        Self { family: AnsatzFamily::Lightcone, initial_state, ..Self::impurity(n_qubits, n_layers, Vec::new()) }
    }

    pub fn u4_sequence(n_qubits: usize, n_layers: usize, sequence: Vec<GateSetTag>) -> Self {
        Self { family: AnsatzFamily::U4Sequence, sequence, ..Self::impurity(n_qubits, n_layers, Vec::new()) }
    }

    pub fn ualpha_sequence(
        n_qubits: usize,
        n_layers: usize,
        sequence: Vec<GateSetTag>,
        rg: &RgOutcome,
        couplings: Vec<f64>,
    ) -> Self {
        Self {
            family: AnsatzFamily::UalphaSequence,
            sequence,
            initial_state: InitialState::SingletRg,
            pairing: Some(rg.pairs.clone()),
            couplings: Some(couplings),
            ..Self::impurity(n_qubits, n_layers, Vec::new())
        }
    }

    pub fn with_initial_state(mut self, initial_state: InitialState) -> Self {
        self.initial_state = initial_state;
        self
    }

    pub fn with_pairing(mut self, pairing: Vec<(usize, usize)>) -> Self {
        self.pairing = Some(pairing);
        self
    }

    pub fn with_layers(&self, n_layers: usize) -> Self {
        Self { n_layers, ..self.clone() }
    }

    /// The first `n_layers` layers, dropping `x_set` entries beyond them.
    pub fn truncated(&self, n_layers: usize) -> Self {
        let mut spec = self.with_layers(n_layers);
        spec.x_set.retain(|&l| l <= n_layers);
        spec
    }

    /// Pairs used by singlet initial states and `long` gate sets.
    fn pairs_for(&self, what: &str) -> Result<Vec<(usize, usize)>> {
        match &self.pairing {
            Some(p) => Ok(p.clone()),
            None => match self.initial_state {
                InitialState::SingletLadder => Ok(ladder_pairs(self.n_qubits)),
                InitialState::SingletNn => Ok(nearest_neighbor_pairs(self.n_qubits)),
                _ => contract(format!("{what} requires a pairing")),
            },
        }
    }

    fn initial_pairs(&self) -> Result<Option<Vec<(usize, usize)>>> {
        Ok(match self.initial_state {
            InitialState::ProductZero => None,
            InitialState::SingletLadder => Some(match &self.pairing {
                Some(p) => p.clone(),
                None => ladder_pairs(self.n_qubits),
            }),
            InitialState::SingletNn => Some(nearest_neighbor_pairs(self.n_qubits)),
            InitialState::SingletRg => Some(self.pairs_for("singlet_rg initial state")?),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_qubits < 2 {
            return contract("ansatz needs at least 2 qubits");
        }
        match self.family {
            AnsatzFamily::ImpurityLayers => {
                if self.n_qubits.is_multiple_of(2) {
                    return contract("impurity ansatz needs an odd number of qubits");
                }
                if let Some(&l) = self.x_set.iter().find(|&&l| l == 0 || l > self.n_layers) {
                    return contract(format!("x_set entry {l} outside layers 1..={}", self.n_layers));
                }
            }
            AnsatzFamily::U4Sequence | AnsatzFamily::UalphaSequence => {
                if self.sequence.is_empty() && self.n_layers > 0 {
                    return contract("sequence family needs a non-empty gate-set sequence");
                }
            }
            AnsatzFamily::Lightcone => {}
        }
        if let Some(pairs) = self.initial_pairs()? {
            check_perfect_matching(self.n_qubits, &pairs)?;
        }
        Ok(())
    }
}

/// RX then RZ on each qubit, optionally skipping one.
fn rotation_layer(c: &mut Circuit, n: usize, skip: Option<usize>) -> Result<()> {
    for q in (0..n).filter(|q| Some(*q) != skip) {
        c.rx(q)?.rz(q)?;
    }
    Ok(())
}

/// Nearest-neighbour bonds in brick-wall order: `(0,1), (2,3), …` then `(1,2), (3,4), …`.
pub fn brick_wall_bonds(n: usize) -> Vec<(usize, usize)> {
    let even = (0..n.saturating_sub(1)).step_by(2);
    let odd = (1..n.saturating_sub(1)).step_by(2);
    even.chain(odd).map(|i| (i, i + 1)).collect()
}

/// Circuit for the impurity ansatz with restricted central bonds.
pub fn build_impurity_circuit(spec: &AnsatzSpec) -> Result<Circuit> {
    if spec.family != AnsatzFamily::ImpurityLayers {
        return contract("build_impurity_circuit needs the impurity_layers family");
    }
    spec.validate()?;
    let mut circuit = Circuit::new(spec.n_qubits);
    for layer in 1..=spec.n_layers {
        push_impurity_layer(&mut circuit, spec, layer)?;
    }
    Ok(circuit)
}

fn push_impurity_layer(circuit: &mut Circuit, spec: &AnsatzSpec, layer: usize) -> Result<()> {
    let n = spec.n_qubits;
    let c = (n - 1) / 2;
    let entangle_center = spec.x_set.contains(&layer);
    let skip = match spec.impurity_gating {
        ImpurityGating::BondsAndRotations if !entangle_center => Some(c),
        _ => None,
    };
    rotation_layer(circuit, n, skip)?;
    for i in 0..n - 1 {
        let touches_center = i + 1 == c || i == c;
        if !touches_center || entangle_center {
            circuit.rzz(i, i + 1)?;
        }
    }
    Ok(())
}

/// One lightcone layer: RX, RZ on every qubit, then brick-wall RZZ.
pub fn build_lightcone_layer(n: usize) -> Result<Circuit> {
    if n < 2 {
        return contract("lightcone layer needs at least 2 qubits");
    }
    let mut c = Circuit::new(n);
    rotation_layer(&mut c, n, None)?;
    for (a, b) in brick_wall_bonds(n) {
        c.rzz(a, b)?;
    }
    Ok(c)
}

pub fn build_u4_gateset(n: usize, tag: GateSetTag, pairing: Option<&[(usize, usize)]>) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    match tag {
        GateSetTag::Short => {
            for (a, b) in brick_wall_bonds(n) {
                c.u4(a, b)?;
            }
        }
        GateSetTag::Long => {
            let Some(pairs) = pairing else {
                return contract("U4 long gate set requires a pairing");
            };
            for &(a, b) in pairs {
                c.u4(a, b)?;
            }
        }
        GateSetTag::ShortVariant => return contract("short_variant is only defined for U_alpha gates"),
    }
    Ok(c)
}

fn push_ualpha(c: &mut Circuit, a: usize, b: usize) -> Result<()> {
    c.rxx(a, b)?.ryy(a, b)?.rzz(a, b)?;
    Ok(())
}

/// Number of short-variant gates: `⌈(n/2)/2⌉ − 1`.
pub fn short_variant_count(n: usize) -> usize {
    (n / 2).div_ceil(2).saturating_sub(1)
}

/// Bonds chosen by the short-variant rule: strongest couplings first, ties by
/// lower index, skipping bonds whose endpoints already form an RG pair.
pub fn short_variant_bonds(n: usize, rg_pairs: &[(usize, usize)], couplings: &[f64]) -> Result<Vec<(usize, usize)>> {
    if couplings.len() != n - 1 {
        return contract(format!("{} couplings given for {n} qubits", couplings.len()));
    }
    let is_pair = |i: usize| rg_pairs.iter().any(|&(a, b)| a.min(b) == i && a.max(b) == i + 1);
    let mut bonds: Vec<usize> = (0..n - 1).filter(|&i| !is_pair(i)).collect();
    bonds.sort_by(|&a, &b| couplings[b].total_cmp(&couplings[a]).then(a.cmp(&b)));
    Ok(bonds.into_iter().take(short_variant_count(n)).map(|i| (i, i + 1)).collect())
}

/// U_α = RXX·RYY·RZZ gate sets for the random chain.
pub fn build_ualpha_gateset(
    n: usize,
    tag: GateSetTag,
    rg_pairs: &[(usize, usize)],
    couplings: Option<&[f64]>,
) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    let bonds = match tag {
        GateSetTag::Short => brick_wall_bonds(n),
        GateSetTag::Long => rg_pairs.to_vec(),
        GateSetTag::ShortVariant => {
            let Some(couplings) = couplings else {
                return contract("short_variant gate set requires couplings");
            };
            short_variant_bonds(n, rg_pairs, couplings)?
        }
    };
    for (a, b) in bonds {
        push_ualpha(&mut c, a, b)?;
    }
    Ok(c)
}

pub fn build_ualpha_from_rg(n: usize, tag: GateSetTag, rg: &RgOutcome, couplings: &[f64]) -> Result<Circuit> {
    build_ualpha_gateset(n, tag, &rg.pairs, Some(couplings))
}

/// One layer of the family; `layer` is 1-based.
fn build_layer(spec: &AnsatzSpec, layer: usize) -> Result<Circuit> {
    let n = spec.n_qubits;
    match spec.family {
        AnsatzFamily::ImpurityLayers => {
            let mut c = Circuit::new(n);
            push_impurity_layer(&mut c, spec, layer)?;
            Ok(c)
        }
        AnsatzFamily::Lightcone => build_lightcone_layer(n),
        AnsatzFamily::U4Sequence => {
            let mut c = Circuit::new(n);
            for &tag in &spec.sequence {
                let pairs = match tag {
                    GateSetTag::Long => Some(spec.pairs_for("U4 long gate set")?),
                    _ => None,
                };
                c.extend(&build_u4_gateset(n, tag, pairs.as_deref())?)?;
            }
            Ok(c)
        }
        AnsatzFamily::UalphaSequence => {
            let mut c = Circuit::new(n);
            let needs_pairs = spec.sequence.iter().any(|t| *t != GateSetTag::Short);
            let pairs = if needs_pairs { spec.pairs_for("U_alpha gate sets")? } else { Vec::new() };
            for &tag in &spec.sequence {
                c.extend(&build_ualpha_gateset(n, tag, &pairs, spec.couplings.as_deref())?)?;
            }
            Ok(c)
        }
    }
}

/// Fixed initial-state circuit and the variational circuit for `spec`.
pub fn assemble(spec: &AnsatzSpec) -> Result<(Circuit, Circuit)> {
    spec.validate()?;
    let n = spec.n_qubits;
    let initial = match spec.initial_pairs()? {
        Some(pairs) => singlet_circuit(n, &pairs)?,
        None => Circuit::new(n),
    };
    let variational = match spec.family {
        AnsatzFamily::ImpurityLayers => build_impurity_circuit(spec)?,
        _ => {
            let mut c = Circuit::new(n);
            for layer in 1..=spec.n_layers {
                c.extend(&build_layer(spec, layer)?)?;
            }
            c
        }
    };
    Ok((initial, variational))
}

/// Parameter count of the layer `layer` (1-based) alone.
pub fn layer_param_count(spec: &AnsatzSpec, layer: usize) -> Result<usize> {
    Ok(build_layer(spec, layer)?.n_params())
}

/// Two-qubit gates with one target on each side of the cut `0..cut | cut..n`.
pub fn gates_crossing_cut(circuit: &Circuit, cut: usize) -> usize {
    circuit.gates().iter().filter(|g| g.is_two_qubit() && (g.targets()[0] < cut) != (g.targets()[1] < cut)).count()
}

/// Two-qubit gates acting on `qubit`.
pub fn gates_touching(circuit: &Circuit, qubit: usize) -> usize {
    circuit.gates().iter().filter(|g| g.is_two_qubit() && g.targets().contains(&qubit)).count()
}
