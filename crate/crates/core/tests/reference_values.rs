mod common;

use std::f64::consts::LN_2;

use common::*;
use entvqe::ansatz::assemble;
use entvqe::entanglement::{entropy, impurity_cut, reduced_density, spectrum, DEFAULT_FLOOR};
use entvqe::exact::project_onto_degenerate;
use entvqe::gradstats::{gradient_variance, variance_scaling, DepthRule, ImpurityScan, XVariant};
use entvqe::models::{
    build_ladder, build_random_chain, ladder_pairs, ImpurityModelParams, LadderModelParams, RandomChainParams,
};
use entvqe::rg::{run_rg, sample_couplings};
use entvqe::vqe::{energy, evaluate_initial, layer_sweep, relative_error};
use entvqe::{
    lowest_eigenpairs, AnsatzSpec, Circuit, ImpurityGating, InitialState, PauliString, PauliSum, StateVector, VqeConfig,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn heisenberg(n: usize, bonds: &[(usize, usize, f64)]) -> PauliSum {
    let mut h = PauliSum::new(n);
    for &(a, b, j) in bonds {
        for p in [PauliString::xx(a, b), PauliString::yy(a, b), PauliString::zz(a, b)] {
            h.add(0.25 * j, p).unwrap();
        }
    }
    h
}

#[test]
fn two_site_tfim_ground_energy_is_minus_sqrt5() {
    let h = PauliSum::new(2)
        .with(-1.0, PauliString::zz(0, 1))
        .unwrap()
        .with(-1.0, PauliString::x(0))
        .unwrap()
        .with(-1.0, PauliString::x(1))
        .unwrap();
    let e = lowest_eigenpairs(&h, 1).unwrap().ground_energy();
    assert!((e + 5f64.sqrt()).abs() < 1e-10);
    assert!((dense_ground_energy(&h) + 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn two_site_xxz_spectrum() {
    let h = PauliSum::new(2)
        .with(1.0, PauliString::xx(0, 1))
        .unwrap()
        .with(1.0, PauliString::yy(0, 1))
        .unwrap()
        .with(0.5, PauliString::zz(0, 1))
        .unwrap();
    let r = lowest_eigenpairs(&h, 4).unwrap();
    let want = [-2.5, 0.5, 0.5, 1.5];
    for (got, want) in r.energies.iter().zip(want) {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn three_site_xxz_ground_space_lives_in_half_magnetization_sectors() {
    let h = ImpurityModelParams::xxz(3, 1.0, 0.0).build().unwrap();
    let r = lowest_eigenpairs(&h, 4).unwrap();
    assert!((r.ground_energy() - dense_ground_energy(&h)).abs() < 1e-10);
    assert_eq!(r.ground_degeneracy(), 2);
    for v in r.ground_subspace() {
        for (k, a) in v.amplitudes().iter().enumerate() {
            let ones = (k as u32).count_ones();
            if ones == 0 || ones == 3 {
                assert!(a.norm() < 1e-8);
            }
        }
    }
}

#[test]
fn impurity_breaks_xxz_degeneracy() {
    let h = ImpurityModelParams::xxz(9, 0.5, -10.0).build().unwrap();
    let r = lowest_eigenpairs(&h, 2).unwrap();
    assert_eq!(r.ground_degeneracy(), 1);
    assert!(r.energies[1] - r.energies[0] > 1e-8);
}

#[test]
fn xxz_seven_sites_is_degenerate() {
    let h = ImpurityModelParams::xxz(7, 0.5, 0.0).build().unwrap();
    assert_eq!(lowest_eigenpairs(&h, 3).unwrap().ground_degeneracy(), 2);
}

#[test]
fn tfim_nine_sites_with_impurity_matches_dense() {
    let h = ImpurityModelParams::tfim(9, -1.0, -10.0).build().unwrap();
    let e = lowest_eigenpairs(&h, 1).unwrap().ground_energy();
    assert!((e - dense_ground_energy(&h)).abs() < 1e-10);
}

#[test]
fn ladder_limits() {
    let single = build_ladder(&LadderModelParams { n_qubits: 2, alpha: 0.0, j: 1.0 }).unwrap();
    assert!((lowest_eigenpairs(&single, 1).unwrap().ground_energy() + 0.75).abs() < 1e-10);

    let chain = build_ladder(&LadderModelParams { n_qubits: 4, alpha: 1.0, j: 0.0 }).unwrap();
    let want = -(3.0 + 2.0 * 3f64.sqrt()) / 4.0;
    assert!((lowest_eigenpairs(&chain, 1).unwrap().ground_energy() - want).abs() < 1e-10);
    assert!((dense_ground_energy(&chain) - want).abs() < 1e-10);
}

#[test]
fn ladder_singlet_state_is_close_at_strong_coupling() {
    let h = build_ladder(&LadderModelParams { n_qubits: 6, alpha: 1.0, j: 100.0 }).unwrap();
    let e0 = lowest_eigenpairs(&h, 1).unwrap().ground_energy();
    let spec = AnsatzSpec::lightcone(6, 0, InitialState::SingletLadder).with_pairing(ladder_pairs(6));
    let r = evaluate_initial(&spec, &h, e0).unwrap();
    assert!(r.rel_error <= 1e-2, "rel_error {}", r.rel_error);
}

#[test]
fn ladder_singlet_error_shrinks_with_coupling_ratio() {
    let errs: Vec<f64> = [1.0, 3.0, 10.0, 100.0]
        .iter()
        .map(|&j| {
            let h = build_ladder(&LadderModelParams { n_qubits: 6, alpha: 1.0, j }).unwrap();
            let e0 = lowest_eigenpairs(&h, 1).unwrap().ground_energy();
            let spec = AnsatzSpec::lightcone(6, 0, InitialState::SingletLadder).with_pairing(ladder_pairs(6));
            evaluate_initial(&spec, &h, e0).unwrap().rel_error
        })
        .collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn singlet_pairs_on_four_sites() {
    let psi = StateVector::prepare_singlet_pairs(4, &[(0, 3), (1, 2)]).unwrap();
    let h = build_ladder(&LadderModelParams { n_qubits: 4, alpha: 0.0, j: 1.0 }).unwrap();
    assert!((psi.expectation(&h).unwrap() + 1.5).abs() < 1e-12);
    for q in 0..4 {
        // single-site reduced state of any paired qubit is I/2
        let amps = psi.amplitudes();
        let n = 4;
        let mut rho = [[Complex64::new(0.0, 0.0); 2]; 2];
        let bit = 1 << (n - 1 - q);
        for k in 0..amps.len() {
            if k & bit == 0 {
                let (a0, a1) = (amps[k], amps[k | bit]);
                rho[0][0] += a0 * a0.conj();
                rho[0][1] += a0 * a1.conj();
                rho[1][0] += a1 * a0.conj();
                rho[1][1] += a1 * a1.conj();
            }
        }
        assert!((rho[0][0].re - 0.5).abs() < 1e-12 && (rho[1][1].re - 0.5).abs() < 1e-12);
        assert!(rho[0][1].norm() < 1e-12);
    }
}

#[test]
fn random_chain_reference_values() {
    let two = build_random_chain(&RandomChainParams { n_qubits: 2, couplings: vec![2.0] }).unwrap();
    assert!((lowest_eigenpairs(&two, 1).unwrap().ground_energy() + 1.5).abs() < 1e-10);

    let couplings = vec![1.0, 10.0, 1.0];
    let h = build_random_chain(&RandomChainParams { n_qubits: 4, couplings: couplings.clone() }).unwrap();
    let want = dense_ground_energy(&heisenberg(4, &[(0, 1, 1.0), (1, 2, 10.0), (2, 3, 1.0)]));
    assert!((lowest_eigenpairs(&h, 1).unwrap().ground_energy() - want).abs() < 1e-10);
    let rg = run_rg(&couplings).unwrap();
    assert_eq!(rg.pairs, vec![(1, 2), (0, 3)]);
    assert!((rg.history[0].new_bond.unwrap().1 - 0.05).abs() < 1e-15);
}

#[test]
fn uniform_couplings_reduce_to_plain_heisenberg_chain() {
    let c = 0.7;
    let random = build_random_chain(&RandomChainParams { n_qubits: 6, couplings: vec![c; 5] }).unwrap();
    let ladder = build_ladder(&LadderModelParams { n_qubits: 6, alpha: 1.0, j: 0.0 }).unwrap();
    let e_random = lowest_eigenpairs(&random, 1).unwrap().ground_energy();
    let e_ladder = lowest_eigenpairs(&ladder, 1).unwrap().ground_energy();
    assert!((e_random - c * e_ladder).abs() < 1e-10);
}

#[test]
fn projection_beats_every_single_ground_vector() {
    let h = ImpurityModelParams::xxz(7, 0.5, 0.0).build().unwrap();
    let r = lowest_eigenpairs(&h, 3).unwrap();
    assert_eq!(r.ground_degeneracy(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let (v0, v1) = (&r.vectors[0], &r.vectors[1]);
    for _ in 0..5 {
        let trial = random_state(7, &mut rng);
        let p = project_onto_degenerate(&r, &trial).unwrap();
        let best = p.inner(&trial).norm();
        // brute force over unit vectors cos a |v0⟩ + e^{iφ} sin a |v1⟩
        let mut brute: f64 = 0.0;
        for i in 0..=60 {
            for j in 0..60 {
                let a = std::f64::consts::FRAC_PI_2 * i as f64 / 60.0;
                let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / 60.0);
                let amps: Vec<Complex64> = v0
                    .amplitudes()
                    .iter()
                    .zip(v1.amplitudes())
                    .map(|(x, y)| x * a.cos() + y * phase * a.sin())
                    .collect();
                let w = StateVector::from_amplitudes(7, amps).unwrap();
                brute = brute.max(w.inner(&trial).norm());
            }
        }
        assert!(best >= brute - 1e-12);
        assert!(best >= v0.inner(&trial).norm() && best >= v1.inner(&trial).norm());
    }
}

#[test]
fn reduced_density_matches_explicit_partial_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for (n, cut) in [(6, 3), (5, 2), (7, 1)] {
        let psi = random_state(n, &mut rng);
        let rho = reduced_density(&psi, cut).unwrap();
        let oracle = partial_trace_keep_left(psi.amplitudes(), n, cut);
        assert!((rho - &oracle).norm() < 1e-12);
    }
}

#[test]
fn schmidt_symmetry_on_random_six_qubit_state() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let psi = random_state(6, &mut rng);
    let a = dense_spectrum(&partial_trace_keep_left(psi.amplitudes(), 6, 3));
    let b = dense_spectrum(&partial_trace_keep_right(psi.amplitudes(), 6, 3));
    let ours = dense_spectrum(&reduced_density(&psi, 3).unwrap());
    for ((x, y), z) in a.iter().zip(&b).zip(&ours) {
        assert!((x - y).abs() < 1e-12 && (x - z).abs() < 1e-12);
    }
}

#[test]
fn singlet_across_cut_gives_ln2() {
    let psi = StateVector::prepare_singlet_pairs(2, &[(0, 1)]).unwrap();
    let rho = reduced_density(&psi, 1).unwrap();
    assert!((entropy(&rho).unwrap() - LN_2).abs() < 1e-12);
    let eps = spectrum(&rho, DEFAULT_FLOOR);
    assert!(eps.iter().all(|e| (e - LN_2).abs() < 1e-12) && eps.len() == 2);
}

fn exact_impurity_rho(h0_z: f64) -> entvqe::entanglement::DensityMatrix {
    let h = ImpurityModelParams::tfim(9, -1.0, h0_z).build().unwrap();
    let r = lowest_eigenpairs(&h, 1).unwrap();
    reduced_density(r.ground_state(), impurity_cut(9)).unwrap()
}

#[test]
fn entropy_falls_as_impurity_strengthens() {
    let s: Vec<f64> =
        [0.0, -0.5, -1.0, -2.0, -5.0, -10.0].iter().map(|&h| entropy(&exact_impurity_rho(h)).unwrap()).collect();
    assert!(s.windows(2).all(|w| w[1] < w[0]), "{s:?}");
    assert!(s.iter().all(|x| *x >= 0.0 && *x <= 4.0 * LN_2 + 1e-10));
}

#[test]
fn impurity_widens_entanglement_gap() {
    let gap = |h0: f64| {
        let eps = spectrum(&exact_impurity_rho(h0), DEFAULT_FLOOR);
        eps[1] - eps[0]
    };
    assert!(gap(-10.0) > 2.0 * gap(0.0), "{} vs {}", gap(-10.0), gap(0.0));
}

#[test]
fn entanglement_spectrum_normalization() {
    let eps = spectrum(&exact_impurity_rho(0.0), DEFAULT_FLOOR);
    assert!(eps.iter().map(|e| (-e).exp()).sum::<f64>() <= 1.0 + 1e-10);
}

#[test]
fn coupling_distribution_moments() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let draws = 100_000;
    let u: Vec<f64> = sample_couplings(draws + 1, 1.0, &mut rng).unwrap();
    let mean = u.iter().sum::<f64>() / u.len() as f64;
    assert!((mean - 0.5).abs() < 0.01);

    let j2 = sample_couplings(draws + 1, 2.0, &mut rng).unwrap();
    let cdf = j2.iter().filter(|j| **j <= 0.5).count() as f64 / j2.len() as f64;
    assert!((cdf - 0.5f64.sqrt()).abs() < 0.01);

    let mut j10 = sample_couplings(draws + 1, 10.0, &mut rng).unwrap();
    j10.sort_by(f64::total_cmp);
    let median = j10[j10.len() / 2];
    let want = 0.5f64.powi(10);
    assert!(median > want / 2.0 && median < want * 2.0);
}

#[test]
fn strong_disorder_four_site_ensemble_has_long_singlets() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let mean: f64 =
        (0..200).map(|_| run_rg(&sample_couplings(4, 10.0, &mut rng).unwrap()).unwrap().mean_length()).sum::<f64>()
            / 200.0;
    assert!(mean > 1.0);
}

#[test]
fn single_rotation_gradient_variance_is_one_half() {
    let mut c = Circuit::new(1);
    c.rx(0).unwrap();
    let h = PauliSum::new(1).with(1.0, PauliString::z(0)).unwrap();
    let r = gradient_variance(&c, &h, &StateVector::zero_state(1).unwrap(), 4000, 7).unwrap();
    // Var[sin θ] = 1/2; the estimator's standard deviation is about sqrt(1/8 / N)
    assert!((r.per_param_variance[0] - 0.5).abs() < 5.0 * (0.125f64 / 4000.0).sqrt());
}

#[test]
fn identical_ansatze_give_identical_slopes() {
    let scan = ImpurityScan {
        h_x: -1.0,
        h0_z: -10.0,
        depth: DepthRule::Fixed(4),
        gating: ImpurityGating::BondsOnly,
        n_samples: 50,
        seed: 3,
    };
    let series = variance_scaling(&[5, 7], &[XVariant::First(1), XVariant::First(1)], &scan).unwrap();
    assert_eq!(series[0].log_slope, series[1].log_slope);
    let single = variance_scaling(&[5], &[XVariant::All], &scan).unwrap();
    assert_eq!(single[0].log_slope, None);
}

#[test]
fn warm_started_energies_do_not_increase_with_layers() {
    let h = ImpurityModelParams::tfim(5, -1.0, 0.0).build().unwrap();
    let e0 = lowest_eigenpairs(&h, 1).unwrap().ground_energy();
    let spec = AnsatzSpec::impurity(5, 4, vec![1, 2, 3, 4]);
    let res = layer_sweep(&spec, &h, e0, 4, &VqeConfig::default()).unwrap();
    for w in res.windows(2) {
        assert!(w[1].energy <= w[0].energy + 1e-9);
    }
    for r in &res {
        assert!((r.rel_error - relative_error(e0, r.energy)).abs() < 1e-12);
    }
}

#[test]
fn variational_energy_never_undercuts_ground_energy() {
    let h = ImpurityModelParams::tfim(7, -1.0, -3.0).build().unwrap();
    let e0 = lowest_eigenpairs(&h, 1).unwrap().ground_energy();
    let (init, circuit) = assemble(&AnsatzSpec::impurity(7, 3, vec![1])).unwrap();
    let initial = init.run(&StateVector::zero_state(7).unwrap(), &[]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..20 {
        let theta: Vec<f64> = (0..circuit.n_params()).map(|_| rng.random::<f64>() * 6.3).collect();
        assert!(energy(&circuit, &theta, &h, &initial).unwrap() >= e0 - 1e-10);
    }
}
