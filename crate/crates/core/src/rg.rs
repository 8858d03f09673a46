//! Strong-disorder renormalization group for random Heisenberg chains.
//!
//! The strongest remaining bond is decimated into a singlet and its two outer
//! neighbours are joined by `J' = J_left · J_right / (2 J_strongest)`. When the
//! decimated pair sits at a chain end, no new bond is created.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::rng::derived_rng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decimation {
    /// Sites joined into a singlet, `left < right`.
    pub bond: (usize, usize),
    pub strength: f64,
    /// Sites joined by the renormalized coupling and its value.
    pub new_bond: Option<((usize, usize), f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RgOutcome {
    /// Singlet pairs `(i, j)` with `i < j`, in formation order.
    pub pairs: Vec<(usize, usize)>,
    pub history: Vec<Decimation>,
}

impl RgOutcome {
    /// Outcome without history, e.g. for a pairing chosen by hand.
    pub fn from_pairs(pairs: Vec<(usize, usize)>) -> Self {
        Self { pairs, history: Vec::new() }
    }

    /// `j − i` per pair, in formation order.
    pub fn lengths(&self) -> Vec<usize> {
        self.pairs.iter().map(|(a, b)| b - a).collect()
    }

    pub fn mean_length(&self) -> f64 {
        let l = self.lengths();
        l.iter().sum::<usize>() as f64 / l.len() as f64
    }
}

/// Couplings `J = u^δ`, `u` uniform on `(0, 1]`, which samples
/// `P(J) = δ⁻¹ J^{−1+1/δ}` on `(0, 1]`.
pub fn sample_couplings<R: Rng + ?Sized>(n_qubits: usize, delta: f64, rng: &mut R) -> Result<Vec<f64>> {
    if !(delta >= 1.0) {
        return contract(format!("disorder strength must be >= 1, got {delta}"));
    }
    if n_qubits < 2 {
        return contract("a chain needs at least 2 sites");
    }
    Ok((0..n_qubits - 1)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            u.powf(delta)
        })
        .collect())
}

/// Runs the decimation to completion on an even open chain.
pub fn run_rg(couplings: &[f64]) -> Result<RgOutcome> {
    let n = couplings.len() + 1;
    if n % 2 == 1 {
        return contract(format!("RG pairing needs an even number of sites, got {n}"));
    }
    if let Some(j) = couplings.iter().find(|j| !(**j > 0.0)) {
        return contract(format!("couplings must be positive, got {j}"));
    }
    // active sites in chain order; bonds[k] couples sites[k] and sites[k + 1]
    let mut sites: Vec<usize> = (0..n).collect();
    let mut bonds: Vec<f64> = couplings.to_vec();
    let mut pairs = Vec::with_capacity(n / 2);
    let mut history = Vec::with_capacity(n / 2);

    while !bonds.is_empty() {
        let mut k = 0;
        for (i, &b) in bonds.iter().enumerate() {
            if b > bonds[k] {
                k = i;
            }
        }
        let strength = bonds[k];
        let (a, b) = (sites[k], sites[k + 1]);
        let has_left = k > 0;
        let has_right = k + 1 < bonds.len();
        let new_bond = if has_left && has_right {
            let j_new = bonds[k - 1] * bonds[k + 1] / (2.0 * strength);
            // replace bonds k-1, k, k+1 by the single renormalized bond
            bonds.splice(k - 1..k + 2, [j_new]);
            Some(((sites[k - 1], sites[k + 2]), j_new))
        } else {
            let lo = if has_left { k - 1 } else { k };
            let hi = if has_right { k + 2 } else { k + 1 };
            bonds.drain(lo..hi);
            None
        };
        sites.drain(k..k + 2);
        pairs.push((a, b));
        history.push(Decimation { bond: (a, b), strength, new_bond });
    }
    Ok(RgOutcome { pairs, history })
}

/// Mean singlet length per chain size, averaging each configuration's mean
/// length over `n_configs` disorder draws.
pub fn singlet_length_stats(n_list: &[usize], delta: f64, n_configs: usize, seed: u64) -> Result<Vec<(usize, f64)>> {
    if n_configs == 0 {
        return contract("need at least one configuration");
    }
    n_list
        .iter()
        .map(|&n| {
            let mut total = 0.0;
            for config in 0..n_configs {
                let mut rng = derived_rng(seed, &[n as u64, config as u64]);
                let couplings = sample_couplings(n, delta, &mut rng)?;
                total += run_rg(&couplings)?.mean_length();
            }
            Ok((n, total / n_configs as f64))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn four_site_example() {
        let out = run_rg(&[1.0, 10.0, 1.0]).unwrap();
        assert_eq!(out.pairs, vec![(1, 2), (0, 3)]);
        assert_eq!(out.lengths(), vec![1, 3]);
        let (bond, j) = out.history[0].new_bond.unwrap();
        assert_eq!(bond, (0, 3));
        assert!((j - 0.05).abs() < 1e-15);
        assert!(out.history[1].new_bond.is_none());
    }

    #[test]
    fn two_sites() {
        assert_eq!(run_rg(&[0.3]).unwrap().pairs, vec![(0, 1)]);
    }

    #[test]
    fn decreasing_couplings_pair_neighbours() {
        let out = run_rg(&[16.0, 8.0, 4.0, 2.0, 1.0]).unwrap();
        assert_eq!(out.pairs, vec![(0, 1), (2, 3), (4, 5)]);
        assert!(out.history.iter().all(|d| d.new_bond.is_none()));
    }

    #[test]
    fn ties_pick_lowest_bond() {
        let out = run_rg(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(out.pairs[0], (0, 1));
    }

    #[test]
    fn errors() {
        assert!(run_rg(&[1.0, 2.0]).is_err());
        assert!(run_rg(&[1.0, -2.0, 1.0]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(sample_couplings(4, 0.5, &mut rng).is_err());
    }

    #[test]
    fn samples_in_unit_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let js = sample_couplings(1000, 5.0, &mut rng).unwrap();
        assert!(js.iter().all(|j| *j > 0.0 && *j <= 1.0));
    }

    #[test]
    fn large_disorder_produces_long_singlets() {
        let stats = singlet_length_stats(&[4], 10.0, 200, 3).unwrap();
        assert!(stats[0].1 > 1.0);
    }
}
