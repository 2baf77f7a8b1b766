mod common;

use common::{c, fock_expansion_oracle, max_state_deviation, random_s_state, random_scenario, rng, total_norm, C};
use polariton::fock::{
    canonical_tuples, enumerate_sectors, permanent, single_mode, AmplitudeTensor, PolaritonTuple, Signature,
};
use polariton::linalg::haar_unitary;
use polariton::modespace::{FrequencySector, ModeSpace};
use polariton::num::CMatrix;
use polariton::scatmat::{BlockScatteringMatrix, ToyModel};
use polariton::scatter::{probability_from_amplitudes, Limits, ScatteringScenario, Tolerances};
use polariton::Error;
use rand::Rng;

const TAU: f64 = 1e-10;

fn attenuator(t: f64, eta: f64, input: AmplitudeTensor<f64>) -> ScatteringScenario<f64> {
    let space = ModeSpace::single(1, 1, 1).unwrap();
    let z = ToyModel::Attenuator { t, eta_e: eta, n_s: 1 }.build(TAU).unwrap();
    ScatteringScenario::new(space, vec![z], input).unwrap()
}

fn dilated(seed: u64, n_s: usize) -> (ModeSpace, BlockScatteringMatrix<f64>) {
    let z = ToyModel::RandomLossy { n_s, seed, loss_scale: 0.7, eta_e: 0.4 }.build(TAU).unwrap();
    (ModeSpace::single(n_s, n_s, n_s).unwrap(), z)
}

fn lossless(seed: u64, n_s: usize) -> (ModeSpace, BlockScatteringMatrix<f64>) {
    let u: CMatrix<f64> = haar_unitary(n_s, &mut rng(seed));
    let z = BlockScatteringMatrix::dilate_transmission(&u, 0.5, TAU).unwrap();
    (ModeSpace::single(n_s, n_s, n_s).unwrap(), z)
}

fn one(space: &ModeSpace, k: usize) -> AmplitudeTensor<f64> {
    single_mode(space, k).unwrap()
}

#[test]
fn number_mismatch_gives_zero() {
    let (space, z) = dilated(1, 2);
    let sc = ScatteringScenario::new(space, vec![z], one(&ModeSpace::single(2, 2, 2).unwrap(), 0)).unwrap();
    let out = PolaritonTuple::new(vec![0, 1], vec![2], vec![]);
    let inp = PolaritonTuple::s_only(vec![0, 1]);
    assert_eq!(sc.amplitude(&out, &inp).unwrap(), c(0.0, 0.0));
    assert_eq!(sc.occupation_amplitude(&out, &inp).unwrap(), c(0.0, 0.0));
}

#[test]
fn mixed_character_amplitude_matches_six_term_expansion() {
    // s: 0,1  e: 2,3  m: 4,5
    let (space, z) = dilated(7, 2);
    let zz = z.z().clone();
    let sc = ScatteringScenario::new(space, vec![z], one(&ModeSpace::single(2, 2, 2).unwrap(), 0)).unwrap();
    let (i, j, k) = (0, 1, 4);
    let (a, b, cc) = (2, 3, 5);
    let inp = PolaritonTuple::new(vec![i, j], vec![], vec![k]);
    let out = PolaritonTuple::new(vec![], vec![a, b], vec![cc]);
    let p = |x: usize, y: usize| zz[(x, y)];
    let six: C = p(a, i) * p(b, j) * p(cc, k)
        + p(a, j) * p(b, i) * p(cc, k)
        + p(a, i) * p(b, k) * p(cc, j)
        + p(a, k) * p(b, i) * p(cc, j)
        + p(a, j) * p(b, k) * p(cc, i)
        + p(a, k) * p(b, j) * p(cc, i);
    let amp = sc.amplitude(&out, &inp).unwrap();
    assert!((amp - six * 0.5).norm() < 1e-12, "{amp} vs {}", six * 0.5);
}

#[test]
fn mixed_character_input_populates_expected_tensor() {
    let (space, z) = dilated(8, 2);
    let sc0 = ScatteringScenario::new(space.clone(), vec![z], one(&space, 0)).unwrap();
    let inp = PolaritonTuple::new(vec![0, 1], vec![], vec![4]);
    let mut psi = AmplitudeTensor::new(inp.signature());
    psi.insert(inp.clone(), c(1.0 / 2f64.sqrt(), 0.0)).unwrap();
    let sc = sc0.with_input(psi).unwrap();
    let state = sc.full_output_state().unwrap();
    assert!((total_norm(&state) - 1.0).abs() < 1e-10);
    let sector = &state[&Signature::new(0, 2, 1)];
    for out in canonical_tuples(Signature::new(0, 2, 1), &space) {
        let expected = sc.amplitude(&out, &inp).unwrap() * 2.0 / 2f64.sqrt();
        assert!((sector.get(&out) - expected).norm() < 1e-12);
    }
    let oracle = fock_expansion_oracle(&sc);
    assert!(max_state_deviation(&state, &oracle) < 1e-12);
}

#[test]
fn three_by_three_amplitude_is_a_sum_over_permutations() {
    let mut r = rng(21);
    for seed in 0..10 {
        let (space, z) = dilated(100 + seed, 3);
        let zz = z.z().clone();
        let sc = ScatteringScenario::new(space, vec![z], one(&ModeSpace::single(3, 3, 3).unwrap(), 0)).unwrap();
        let inp = PolaritonTuple::s_only(vec![0, 1, 2]);
        let picks: Vec<usize> = (0..3).map(|_| r.random_range(0..9)).collect();
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() < 3 {
            continue;
        }
        let mut out = PolaritonTuple::default();
        for &x in &sorted {
            match x {
                0..=2 => out.s.push(x),
                3..=5 => out.e.push(x),
                _ => out.m.push(x),
            }
        }
        let rows: Vec<usize> = out.labels().collect();
        let mut sum = c(0.0, 0.0);
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            sum += zz[(rows[0], perm[0])] * zz[(rows[1], perm[1])] * zz[(rows[2], perm[2])];
        }
        let sig = out.signature();
        let norm: f64 = [sig.p, sig.q, sig.r].iter().map(|&k| common::factorial_f(k)).product::<f64>() * 6.0;
        let amp = sc.amplitude(&out, &inp).unwrap();
        assert!((amp - sum / norm.sqrt()).norm() < 1e-12);
    }
}

#[test]
fn occupation_amplitude_counts_repeated_modes() {
    let (space, z) = dilated(3, 2);
    let zz = z.z().clone();
    let sc = ScatteringScenario::new(space, vec![z], one(&ModeSpace::single(2, 2, 2).unwrap(), 0)).unwrap();
    let inp = PolaritonTuple::s_only(vec![0, 0]);
    let out = PolaritonTuple::s_only(vec![1, 1]);
    // <1_b^2|1_a^2> = Z_ba^2 * 2 / sqrt(2! 2!)
    let expected = zz[(1, 0)] * zz[(1, 0)];
    assert!((sc.occupation_amplitude(&out, &inp).unwrap() - expected).norm() < 1e-14);
    assert!((sc.amplitude(&out, &inp).unwrap() - expected).norm() < 1e-14);
}

#[test]
fn output_state_matches_fock_expansion_oracle() {
    for seed in 0..20 {
        let ns: &[usize] = match seed % 4 {
            0 => &[1],
            1 => &[2],
            2 => &[3],
            _ => &[1, 2],
        };
        let sc = random_scenario(seed, ns, 2, 2);
        let state = sc.full_output_state().unwrap();
        let oracle = fock_expansion_oracle(&sc);
        assert!(max_state_deviation(&state, &oracle) < 1e-11, "seed {seed}");
        assert!((total_norm(&state) - 1.0).abs() < 1e-10, "seed {seed}");
    }
}

#[test]
fn output_norm_is_one_up_to_four_polaritons() {
    for (seed, n) in [(1u64, 1usize), (2, 2), (3, 3), (4, 4)] {
        let sc = random_scenario(seed, &[n], 2, 2);
        let state = sc.full_output_state().unwrap();
        assert!((total_norm(&state) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn single_photon_norm_is_one() {
    let (space, z) = dilated(5, 3);
    for k in 0..3 {
        let sc = ScatteringScenario::new(space.clone(), vec![z.clone()], one(&space, k)).unwrap();
        assert!((total_norm(&sc.full_output_state().unwrap()) - 1.0).abs() < 1e-10);
    }
}

#[test]
fn kernel_route_matches_amplitude_route() {
    for seed in 0..25 {
        let n = 1 + (seed as usize % 3);
        let sc = random_scenario(500 + seed, &[n], 2, 3);
        let mut total = 0.0;
        for sig in enumerate_sectors(n, sc.mode_space()) {
            let p = sc.sector_probability(sig).unwrap();
            let psi = sc.outgoing_wavefunction(sig).unwrap();
            assert!(p.imaginary.abs() < 1e-12);
            assert!((p.raw - probability_from_amplitudes(&psi)).abs() < 1e-10);
            total += p.probability;
        }
        assert!((total - 1.0).abs() < 1e-10, "seed {seed}: {total}");
    }
}

#[test]
fn dense_wavefunction_matches_permanent_state() {
    for seed in 0..10 {
        let sc = random_scenario(900 + seed, &[2], 2, 2);
        let state = sc.full_output_state().unwrap();
        for sig in enumerate_sectors(2, sc.mode_space()) {
            let dense = sc.outgoing_wavefunction(sig).unwrap();
            let empty = AmplitudeTensor::new(sig);
            let perm = state.get(&sig).unwrap_or(&empty);
            assert!(dense.max_deviation(perm) < 1e-12);
        }
    }
}

#[test]
fn identity_scattering_returns_the_input() {
    let space = ModeSpace::single(3, 0, 0).unwrap();
    let z = ToyModel::Identity { n_s: 3 }.build(TAU).unwrap();
    let psi = random_s_state(&space, &[2], &mut rng(4));
    let sc = ScatteringScenario::new(space, vec![z], psi).unwrap();
    let sig = Signature::new(2, 0, 0);
    let input = sc.psi_in().component(sig).unwrap().clone();
    assert!(sc.outgoing_wavefunction(sig).unwrap().max_deviation(&input) < 1e-15);
    let state = sc.full_output_state().unwrap();
    assert_eq!(state.len(), 1);
    assert!(state[&sig].max_deviation(&input) < 1e-14);
}

#[test]
fn attenuator_single_photon() {
    let space = ModeSpace::single(1, 1, 1).unwrap();
    let sc = attenuator(0.6, 0.5, one(&space, 0));
    let s = sc.outgoing_wavefunction(Signature::new(1, 0, 0)).unwrap();
    assert!((s.get(&PolaritonTuple::s_only(vec![0])) - c(0.6, 0.0)).norm() < 1e-15);
    let p: Vec<f64> = [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
        .iter()
        .map(|&(p, q, r)| sc.sector_probability(Signature::new(p, q, r)).unwrap().probability)
        .collect();
    for (got, want) in p.iter().zip([0.36, 0.32, 0.32]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn attenuator_two_photons_are_binomial() {
    let mut psi = AmplitudeTensor::new(Signature::new(2, 0, 0));
    psi.insert(PolaritonTuple::s_only(vec![0, 0]), c(1.0, 0.0)).unwrap();
    let sc = attenuator(0.6, 0.5, psi);
    let p = |a, b, r| sc.sector_probability(Signature::new(a, b, r)).unwrap().probability;
    assert!((p(2, 0, 0) - 0.1296).abs() < 1e-12);
    assert!((p(1, 1, 0) + p(1, 0, 1) - 0.4608).abs() < 1e-12);
    assert!((p(0, 2, 0) + p(0, 1, 1) + p(0, 0, 2) - 0.4096).abs() < 1e-12);
}

#[test]
fn lossless_limit_is_pure_photon_scattering() {
    for seed in 0..5 {
        let (space, z) = lossless(40 + seed, 3);
        assert!(z.validate(TAU).is_lossless);
        let t = z.t();
        for n in 1..=4 {
            let psi = random_s_state(&space, &[n], &mut rng(seed * 10 + n as u64));
            let sc = ScatteringScenario::new(space.clone(), vec![z.clone()], psi).unwrap();
            assert!(sc.is_lossless());
            let p = sc.sector_probability(Signature::new(n, 0, 0)).unwrap();
            assert!((p.probability - 1.0).abs() < 1e-10);
            for sig in enumerate_sectors(n, &space).into_iter().filter(|s| !s.is_s_only()) {
                assert!(sc.sector_probability(sig).unwrap().probability < 1e-12);
                assert!(sc.outgoing_wavefunction(sig).unwrap().iter().all(|(_, v)| v.norm() < 1e-12));
            }
            let tuples = canonical_tuples(Signature::new(n, 0, 0), &space);
            for out in tuples.iter().take(4) {
                for inp in tuples.iter().take(4) {
                    let rows: Vec<usize> = out.s.clone();
                    let cols: Vec<usize> = inp.s.clone();
                    let sub = CMatrix::from_fn(n, n, |i, j| t[(rows[i], cols[j])]);
                    let expected = permanent(&sub).unwrap() / common::factorial_f(n);
                    assert!((sc.amplitude(out, inp).unwrap() - expected).norm() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn frequency_is_conserved() {
    let mut r = rng(77);
    let space = ModeSpace::new(vec![FrequencySector::new(1.0, 2, 2, 2), FrequencySector::new(2.0, 1, 1, 1)]).unwrap();
    let mats = vec![
        ToyModel::RandomLossy { n_s: 2, seed: 1, loss_scale: 0.5, eta_e: 0.3 }.build(TAU).unwrap(),
        ToyModel::RandomLossy { n_s: 1, seed: 2, loss_scale: 0.5, eta_e: 0.3 }.build(TAU).unwrap(),
    ];
    let psi = random_s_state(&space, &[2], &mut r);
    let sc = ScatteringScenario::new(space.clone(), mats, psi).unwrap();
    // sector 0: s 0,1 e 2,3 m 4,5; sector 1: s 6 e 7 m 8
    let inp = PolaritonTuple::s_only(vec![0, 6]);
    assert_eq!(sc.amplitude(&PolaritonTuple::s_only(vec![0, 1]), &inp).unwrap(), c(0.0, 0.0));
    assert_ne!(sc.amplitude(&PolaritonTuple::new(vec![1], vec![7], vec![]), &inp).unwrap(), c(0.0, 0.0));
    let state = sc.full_output_state().unwrap();
    assert!((total_norm(&state) - 1.0).abs() < 1e-10);
    let oracle = fock_expansion_oracle(&sc);
    assert!(max_state_deviation(&state, &oracle) < 1e-12);
}

#[test]
fn s_only_routes_reject_em_input() {
    let (space, z) = dilated(2, 1);
    let mut psi = AmplitudeTensor::new(Signature::new(0, 1, 0));
    psi.insert(PolaritonTuple::new(vec![], vec![1], vec![]), c(1.0, 0.0)).unwrap();
    let sc = ScatteringScenario::new(space, vec![z], psi).unwrap();
    assert!(matches!(sc.sector_probability(Signature::new(1, 0, 0)), Err(Error::UnsupportedInput(_))));
    assert!(matches!(sc.outgoing_wavefunction(Signature::new(1, 0, 0)), Err(Error::UnsupportedInput(_))));
    assert!((total_norm(&sc.full_output_state().unwrap()) - 1.0).abs() < 1e-10);
}

#[test]
fn caps_and_validation_errors() {
    let (space, z) = dilated(2, 2);
    let psi = random_s_state(&space, &[3], &mut rng(1));
    let limits = Limits { n_max: 2, ..Limits::default() };
    let err = ScatteringScenario::with_options(space.clone(), vec![z.clone()], psi.clone(), limits, Tolerances::default())
        .unwrap_err();
    assert!(matches!(err, Error::Resource { .. }));

    let tight = Limits { dense_max: 4, ..Limits::default() };
    let sc = ScatteringScenario::with_options(space.clone(), vec![z.clone()], psi.clone(), tight, Tolerances::default())
        .unwrap();
    assert!(matches!(sc.sector_probability(Signature::new(3, 0, 0)), Err(Error::Resource { .. })));

    let mut bad = z.z().clone();
    bad[(0, 0)] *= 1.5;
    let bad = BlockScatteringMatrix::new(0, 2, 2, 2, bad).unwrap();
    assert!(matches!(ScatteringScenario::new(space.clone(), vec![bad], psi.clone()), Err(Error::NotUnitary(_))));

    let mut wrong = AmplitudeTensor::new(Signature::new(1, 0, 0));
    wrong.insert(PolaritonTuple::s_only(vec![3]), c(1.0, 0.0)).unwrap();
    assert!(matches!(ScatteringScenario::new(space, vec![z], wrong), Err(Error::InvalidLabel(_))));
}

#[test]
fn unnormalised_input_is_rescaled() {
    let (space, z) = dilated(9, 2);
    let mut psi = AmplitudeTensor::new(Signature::new(1, 0, 0));
    psi.insert(PolaritonTuple::s_only(vec![0]), c(3.0, 0.0)).unwrap();
    psi.insert(PolaritonTuple::s_only(vec![1]), c(0.0, 4.0)).unwrap();
    let sc = ScatteringScenario::new(space, vec![z], psi).unwrap();
    let rep = sc.ingest_report();
    assert!(rep.renormalized && (rep.norm_before - 25.0).abs() < 1e-12);
    assert!((sc.psi_in().norm_sqr() - 1.0).abs() < 1e-15);
}
