mod common;

use common::{c, random_matrix, rng};
use polariton::fock::{
    canonical_tuples, enumerate_sectors, glynn, naive, occupation_to_tuples, permanent, permanent_with, ryser,
    tuple_to_occupation, AmplitudeRecord, AmplitudeTensor, PermanentAlgorithm, PolaritonTuple, Signature,
};
use polariton::modespace::ModeSpace;
use polariton::num::CMatrix;
use proptest::prelude::*;

fn rel(a: polariton::num::Complex<f64>, b: polariton::num::Complex<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

#[test]
fn permanent_examples() {
    assert_eq!(permanent(&CMatrix::from_element(1, 1, c(5.0, 0.0))).unwrap(), c(5.0, 0.0));
    let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
    for alg in [PermanentAlgorithm::Ryser, PermanentAlgorithm::Glynn, PermanentAlgorithm::Naive] {
        assert_eq!(permanent_with(&m, alg).unwrap(), c(10.0, 0.0));
    }
    assert_eq!(permanent(&CMatrix::<f64>::zeros(0, 0)).unwrap(), c(1.0, 0.0));
    assert!(permanent(&CMatrix::<f64>::zeros(2, 3)).is_err());
}

#[test]
fn permanent_of_all_ones_is_factorial() {
    for n in 1..=8 {
        let m = CMatrix::from_element(n, n, c(1.0, 0.0));
        let f: f64 = (1..=n).map(|k| k as f64).product();
        assert!((ryser(&m).re - f).abs() < 1e-9 * f);
        assert!((glynn(&m).re - f).abs() < 1e-9 * f);
    }
}

#[test]
fn ryser_glynn_match_naive_on_random_matrices() {
    let mut r = rng(2024);
    for k in 0..50 {
        let n = 1 + k % 7;
        let m = random_matrix(n, &mut r);
        let oracle = naive(&m);
        assert!(rel(ryser(&m), oracle) < 1e-12, "n={n}");
        assert!(rel(glynn(&m), oracle) < 1e-12, "n={n}");
    }
}

#[test]
fn ryser_spanning_several_chunks_matches_glynn() {
    let mut r = rng(77);
    let m = random_matrix(12, &mut r);
    assert!(rel(ryser(&m), glynn(&m)) < 1e-10);
}

fn arb_matrix(max: usize) -> impl Strategy<Value = CMatrix<f64>> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n)
            .prop_map(move |v| CMatrix::from_iterator(n, n, v.into_iter().map(|(a, b)| c(a, b))))
    })
}

proptest! {
    #[test]
    fn zero_row_gives_zero(m in arb_matrix(6), row in 0usize..6) {
        let mut m = m;
        let row = row % m.nrows();
        for j in 0..m.ncols() { m[(row, j)] = c(0.0, 0.0); }
        prop_assert_eq!(ryser(&m).norm(), 0.0);
    }

    #[test]
    fn invariant_under_row_and_column_swaps(m in arb_matrix(6), a in 0usize..6, b in 0usize..6) {
        let n = m.nrows();
        let (a, b) = (a % n, b % n);
        let p = ryser(&m);
        let mut rows = m.clone();
        rows.swap_rows(a, b);
        let mut cols = m.clone();
        cols.swap_columns(a, b);
        prop_assert!((ryser(&rows) - p).norm() <= 1e-12 * (1.0 + p.norm()));
        prop_assert!((ryser(&cols) - p).norm() <= 1e-12 * (1.0 + p.norm()));
    }

    #[test]
    fn triangular_gives_diagonal_product(m in arb_matrix(7)) {
        let n = m.nrows();
        let tri = CMatrix::from_fn(n, n, |i, j| if j <= i { m[(i, j)] } else { c(0.0, 0.0) });
        let diag = (0..n).fold(c(1.0, 0.0), |a, i| a * m[(i, i)]);
        prop_assert!((ryser(&tri) - diag).norm() <= 1e-12 * (1.0 + diag.norm()));
        prop_assert!((glynn(&tri) - diag).norm() <= 1e-12 * (1.0 + diag.norm()));
    }

    #[test]
    fn occupation_is_constant_on_orbits(s in prop::collection::vec(0usize..4, 0..4), e in prop::collection::vec(4usize..6, 0..3)) {
        let t = PolaritonTuple::new(s.clone(), e.clone(), vec![]);
        let mut rs = s.clone(); rs.reverse();
        let mut re = e.clone(); re.reverse();
        let t2 = PolaritonTuple::new(rs, re, vec![]);
        prop_assert_eq!(tuple_to_occupation(&t), tuple_to_occupation(&t2));
        prop_assert_eq!(t.multiplicity(), t2.multiplicity());
        prop_assert_eq!(t.canonical(), t2.canonical());
    }
}

#[test]
fn tuple_occupation_examples() {
    let space = ModeSpace::single(4, 2, 1).unwrap();
    let t = PolaritonTuple::s_only(vec![2, 2]);
    let occ = tuple_to_occupation(&t);
    assert_eq!(occ.get(2), 2);
    assert_eq!(occ.total(), 2);
    assert_eq!(t.multiplicity(), 1);
    assert_eq!(occupation_to_tuples(&occ, &space).unwrap(), (1, t));

    let t = PolaritonTuple::s_only(vec![1, 0]);
    assert_eq!(t.multiplicity(), 2);
    let (mult, canon) = occupation_to_tuples(&tuple_to_occupation(&t), &space).unwrap();
    assert_eq!((mult, canon), (2, PolaritonTuple::s_only(vec![0, 1])));

    let t = PolaritonTuple::new(vec![0, 1], vec![5], vec![]);
    assert_eq!(t.multiplicity(), 2);
    let (mult, canon) = occupation_to_tuples(&tuple_to_occupation(&t), &space).unwrap();
    assert_eq!((mult, canon), (2, t));
}

#[test]
fn sector_enumeration() {
    let photons = ModeSpace::single(2, 0, 0).unwrap();
    assert_eq!(enumerate_sectors(1, &photons), vec![Signature::new(1, 0, 0)]);
    let full = ModeSpace::single(2, 2, 2).unwrap();
    assert_eq!(
        enumerate_sectors(2, &full),
        vec![
            Signature::new(2, 0, 0),
            Signature::new(1, 1, 0),
            Signature::new(1, 0, 1),
            Signature::new(0, 2, 0),
            Signature::new(0, 1, 1),
            Signature::new(0, 0, 2),
        ]
    );
    let four = ModeSpace::single(4, 0, 0).unwrap();
    assert_eq!(canonical_tuples(Signature::new(3, 0, 0), &four).len(), 20);
    assert_eq!(canonical_tuples(Signature::new(0, 0, 0), &four), vec![PolaritonTuple::vacuum()]);
}

#[test]
fn canonical_enumeration_is_complete_and_sorted() {
    let space = ModeSpace::single(3, 2, 2).unwrap();
    for n in 0..=3 {
        let mut count = 0u64;
        for sig in enumerate_sectors(n, &space) {
            let tuples = canonical_tuples(sig, &space);
            let mut sorted = tuples.clone();
            sorted.sort();
            sorted.dedup();
            assert_eq!(sorted, tuples);
            assert!(tuples.iter().all(|t| t.is_canonical() && t.validate(&space).is_ok()));
            count += tuples.iter().map(|t| t.multiplicity()).sum::<u64>()
                * (1..=n as u64).product::<u64>()
                / [sig.p, sig.q, sig.r].iter().map(|&k| (1..=k as u64).product::<u64>()).product::<u64>();
        }
        // every ordered string over 7 modes counted once
        assert_eq!(count, 7u64.pow(n as u32));
    }
}

#[test]
fn weighted_norm_matches_occupation_norm() {
    let space = ModeSpace::single(3, 0, 0).unwrap();
    let mut r = rng(8);
    let t = common::random_tensor(&space, Signature::new(3, 0, 0), &mut r);
    let occ_norm: f64 = t.iter().map(|(k, v)| (k.multiplicity() as f64) * v.norm_sqr()).sum();
    // brute force over ordered tuples
    let mut brute = 0.0;
    for a in 0..3 {
        for b in 0..3 {
            for d in 0..3 {
                brute += t.get(&PolaritonTuple::s_only(vec![a, b, d])).norm_sqr();
            }
        }
    }
    assert!((t.norm_sqr() - brute).abs() < 1e-12);
    assert!((occ_norm - brute).abs() < 1e-12);
}

#[test]
fn records_round_trip_and_average_duplicates() {
    let space = ModeSpace::single(3, 1, 0).unwrap();
    let mut r = rng(1);
    let t = common::random_tensor(&space, Signature::new(2, 1, 0), &mut r);
    let text = serde_json::to_string(&t.to_records()).unwrap();
    let back: Vec<AmplitudeRecord> = serde_json::from_str(&text).unwrap();
    let (t2, corr) = AmplitudeTensor::<f64>::from_records(&back).unwrap();
    assert_eq!(t, t2);
    assert_eq!(corr, 0.0);

    let recs = vec![
        AmplitudeRecord { tuple: PolaritonTuple::s_only(vec![0, 1]), re: 1.0, im: 0.0 },
        AmplitudeRecord { tuple: PolaritonTuple::s_only(vec![1, 0]), re: 0.5, im: 0.0 },
    ];
    let (t3, corr) = AmplitudeTensor::<f64>::from_records(&recs).unwrap();
    assert_eq!(t3.get(&PolaritonTuple::s_only(vec![1, 0])), c(0.75, 0.0));
    assert!((corr - 0.25).abs() < 1e-15);
}
