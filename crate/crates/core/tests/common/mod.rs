#![allow(dead_code)]

use polariton::fock::{canonical_tuples, AmplitudeTensor, PolaritonState, PolaritonTuple, Signature};
use polariton::modespace::{Character, FrequencySector, ModeSpace};
use polariton::num::{CMatrix, Complex};
use polariton::scatmat::{BlockScatteringMatrix, ToyModel};
use polariton::scatter::ScatteringScenario;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub type C = Complex<f64>;

pub fn c(re: f64, im: f64) -> C {
    Complex::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(n: usize, rng: &mut impl Rng) -> CMatrix<f64> {
    CMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random contraction with singular values spread over `[0, 1]`.
pub fn random_contraction(n: usize, rng: &mut impl Rng) -> CMatrix<f64> {
    let m = random_matrix(n, rng);
    let svd = m.svd(true, true);
    let u = svd.u.unwrap();
    let v = svd.v_t.unwrap();
    let mut d = CMatrix::zeros(n, n);
    for i in 0..n {
        d[(i, i)] = c(rng.random_range(0.0..1.0), 0.0);
    }
    u * d * v
}

/// One or two sectors of random lossy dilations.
pub fn random_matrices(rng: &mut impl Rng, max_sectors: usize, max_ns: usize) -> (ModeSpace, Vec<BlockScatteringMatrix<f64>>) {
    let sectors = rng.random_range(1..=max_sectors);
    let mut secs = Vec::new();
    let mut mats = Vec::new();
    for k in 0..sectors {
        let n_s = rng.random_range(1..=max_ns);
        let model = ToyModel::RandomLossy {
            n_s,
            seed: rng.random(),
            loss_scale: rng.random_range(0.2..1.0),
            eta_e: rng.random_range(0.0..1.0),
        };
        mats.push(model.build(1e-10).unwrap());
        secs.push(FrequencySector::new(1.0 + k as f64, n_s, n_s, n_s));
    }
    (ModeSpace::new(secs).unwrap(), mats)
}

/// Random tensor over every canonical tuple of a signature.
pub fn random_tensor(space: &ModeSpace, sig: Signature, rng: &mut impl Rng) -> AmplitudeTensor<f64> {
    let mut t = AmplitudeTensor::new(sig);
    for tuple in canonical_tuples(sig, space) {
        t.insert(tuple, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).unwrap();
    }
    t
}

pub fn random_s_state(space: &ModeSpace, ns: &[usize], rng: &mut impl Rng) -> PolaritonState<f64> {
    let mut state = PolaritonState::new();
    for &n in ns {
        state.add(random_tensor(space, Signature::new(n, 0, 0), rng));
    }
    state
}

pub fn random_scenario(seed: u64, ns: &[usize], max_sectors: usize, max_ns: usize) -> ScatteringScenario<f64> {
    let mut r = rng(seed);
    let (space, mats) = random_matrices(&mut r, max_sectors, max_ns);
    let psi = random_s_state(&space, ns, &mut r);
    ScatteringScenario::new(space, mats, psi).unwrap()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Outgoing state by expanding `prod_j (sum_i Z_ij b_i^dag)^{n_j} / sqrt(n_j!)`
/// as a polynomial in creation operators, then reading tuple amplitudes.
/// No permanents involved.
pub fn fock_expansion_oracle(sc: &ScatteringScenario<f64>) -> BTreeMap<Signature, AmplitudeTensor<f64>> {
    let z = sc.global_z();
    let space = sc.mode_space();
    // monomial (sorted output labels) -> coefficient
    let mut poly: BTreeMap<Vec<usize>, C> = BTreeMap::new();
    for tensor in sc.psi_in().components().values() {
        for (tuple, &psi) in tensor.iter() {
            let occ = polariton::fock::tuple_to_occupation(tuple);
            let coeff = psi * (tuple.multiplicity() as f64).sqrt() / (occ.factorial_product() as f64).sqrt();
            let mut terms: BTreeMap<Vec<usize>, C> = BTreeMap::new();
            terms.insert(Vec::new(), coeff);
            for j in tuple.labels() {
                let mut next: BTreeMap<Vec<usize>, C> = BTreeMap::new();
                for (mono, v) in &terms {
                    for i in 0..z.nrows() {
                        let w = z[(i, j)];
                        if w == c(0.0, 0.0) {
                            continue;
                        }
                        let mut m = mono.clone();
                        let at = m.partition_point(|&x| x <= i);
                        m.insert(at, i);
                        *next.entry(m).or_insert(c(0.0, 0.0)) += v * w;
                    }
                }
                terms = next;
            }
            for (m, v) in terms {
                *poly.entry(m).or_insert(c(0.0, 0.0)) += v;
            }
        }
    }
    let mut out: BTreeMap<Signature, AmplitudeTensor<f64>> = BTreeMap::new();
    for (mono, v) in poly {
        let mut t = PolaritonTuple::default();
        for &i in &mono {
            match space.character_of(i).unwrap() {
                Character::S => t.s.push(i),
                Character::E => t.e.push(i),
                Character::M => t.m.push(i),
            }
        }
        let occ = polariton::fock::tuple_to_occupation(&t);
        // b^dag monomial = sqrt(prod m!) |m>, and c_occ = sqrt(M) psi_tuple
        let c_occ = v * (occ.factorial_product() as f64).sqrt();
        let psi = c_occ / (t.multiplicity() as f64).sqrt();
        let sig = t.signature();
        out.entry(sig).or_insert_with(|| AmplitudeTensor::new(sig)).insert(t, psi).unwrap();
    }
    out
}

pub fn max_state_deviation(
    a: &BTreeMap<Signature, AmplitudeTensor<f64>>,
    b: &BTreeMap<Signature, AmplitudeTensor<f64>>,
) -> f64 {
    let mut worst: f64 = 0.0;
    let keys: std::collections::BTreeSet<_> = a.keys().chain(b.keys()).copied().collect();
    for k in keys {
        let empty = AmplitudeTensor::new(k);
        let x = a.get(&k).unwrap_or(&empty);
        let y = b.get(&k).unwrap_or(&empty);
        worst = worst.max(x.max_deviation(y));
    }
    worst
}

pub fn total_norm(state: &BTreeMap<Signature, AmplitudeTensor<f64>>) -> f64 {
    state.values().map(|t| t.norm_sqr()).sum()
}

pub fn unit(space: &ModeSpace, k: usize) -> polariton::num::CVector<f64> {
    let mut v = polariton::num::CVector::zeros(space.count(Character::S));
    v[k] = c(1.0, 0.0);
    v
}

pub fn factorial_f(n: usize) -> f64 {
    factorial(n)
}
