use super::ReducedDensityMatrix;
use crate::dense::DenseTensor;
use crate::error::{Error, Result};
use crate::fock::{canonical_tuples, entangled_pair, AmplitudeTensor, PolaritonTuple, Signature};
use crate::linalg::{self, hermitian_eigen_2x2};
use crate::modespace::{Character, ModeSpace};
use crate::num::{real, CMatrix, CVector, Complex, Real};
use crate::scatter::ScatteringScenario;

fn require_single_component<T: Real>(sc: &ScatteringScenario<T>, n: usize) -> Result<&AmplitudeTensor<T>> {
    let psi = sc.psi_in();
    let found = psi
        .components()
        .keys()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" ");
    match (psi.components().len(), psi.s_component(n)) {
        (1, Some(t)) => Ok(t),
        _ => Err(Error::WrongCount { expected: n, found }),
    }
}

fn s_vector<T: Real>(space: &ModeSpace, tensor: &AmplitudeTensor<T>) -> CVector<T> {
    let mut v = CVector::zeros(space.count(Character::S));
    for (t, &val) in tensor.iter() {
        v[space.local_index(t.s[0]).unwrap()] = val;
    }
    v
}

fn quad<T: Real>(v: &CVector<T>, m: &CMatrix<T>, w: &CVector<T>) -> Complex<T> {
    v.dotc(&(m * w))
}

#[derive(Clone, Debug, PartialEq)]
pub struct OnePolariton<T: Real> {
    pub p_s: T,
    pub p_e: T,
    pub p_m: T,
    /// `T psi / sqrt(P_s)`; absent when nothing is transmitted.
    pub phi_1s: Option<AmplitudeTensor<T>>,
}

impl<T: Real> OnePolariton<T> {
    /// `P_s |phi><phi| + (P_e + P_m) |0><0|`.
    pub fn reconstruct(&self, space: &ModeSpace) -> ReducedDensityMatrix<T> {
        let mut rho = ReducedDensityMatrix::zeros(space, 1);
        rho.block_mut(0, 0).unwrap()[(0, 0)] = real(self.p_e + self.p_m);
        if let Some(phi) = &self.phi_1s {
            let v = s_vector(space, phi);
            *rho.block_mut(1, 1).unwrap() = (&v * v.adjoint()) * real(self.p_s);
        }
        rho
    }
}

pub fn one_polariton<T: Real>(sc: &ScatteringScenario<T>) -> Result<OnePolariton<T>> {
    let psi = require_single_component(sc, 1)?;
    let space = sc.mode_space();
    let v = s_vector(space, psi);
    let k = sc.kernels();
    let p_s = quad(&v, &k.j_s, &v).re;
    let p_e = quad(&v, &k.j_e, &v).re;
    let p_m = quad(&v, &k.j_m, &v).re;
    let phi_1s = if p_s > T::zero() {
        let dressed = sc.transmission() * &v;
        let mut t = AmplitudeTensor::new(Signature::new(1, 0, 0));
        for (i, &mode) in space.modes(Character::S).iter().enumerate() {
            t.insert(PolaritonTuple::s_only(vec![mode]), dressed[i] / real(p_s.sqrt()))?;
        }
        Some(t)
    } else {
        None
    };
    Ok(OnePolariton { p_s, p_e, p_m, phi_1s })
}

/// The six two-polariton channel probabilities, `(2 - delta) <psi|J x J|psi>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PairProbabilities<T> {
    pub ss: T,
    pub se: T,
    pub sm: T,
    pub ee: T,
    pub em: T,
    pub mm: T,
}

impl<T: Real> PairProbabilities<T> {
    pub fn sum(&self) -> T {
        self.ss + self.se + self.sm + self.ee + self.em + self.mm
    }

    pub fn as_array(&self) -> [(&'static str, T); 6] {
        [("ss", self.ss), ("se", self.se), ("sm", self.sm), ("ee", self.ee), ("em", self.em), ("mm", self.mm)]
    }
}

/// Hermitian matrix with its eigenpairs (descending eigenvalues).
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralForm<T: Real> {
    pub matrix: CMatrix<T>,
    pub eigenvalues: Vec<T>,
    pub eigenvectors: CMatrix<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoPolariton<T: Real> {
    pub probabilities: PairProbabilities<T>,
    /// Normalised `(T x T) psi`; absent when `P_ss` vanishes.
    pub rho_2s_state: Option<AmplitudeTensor<T>>,
    /// Normalised one-polariton operator over s-modes; absent when no
    /// single polariton survives.
    pub rho_1s: Option<SpectralForm<T>>,
    pub vacuum_weight: T,
}

impl<T: Real> TwoPolariton<T> {
    pub fn reconstruct(&self, space: &ModeSpace) -> ReducedDensityMatrix<T> {
        let mut rho = ReducedDensityMatrix::zeros(space, 2);
        rho.block_mut(0, 0).unwrap()[(0, 0)] = real(self.vacuum_weight);
        if let Some(r1) = &self.rho_1s {
            *rho.block_mut(1, 1).unwrap() = &r1.matrix * real(self.probabilities.se + self.probabilities.sm);
        }
        if let Some(phi) = &self.rho_2s_state {
            let basis = rho.basis(2).to_vec();
            let v = CVector::from_iterator(basis.len(), basis.iter().map(|t| phi.get(t)));
            *rho.block_mut(2, 2).unwrap() = (&v * v.adjoint()) * real(self.probabilities.ss);
        }
        rho
    }
}

fn pair_expectation<T: Real>(d: &DenseTensor<T>, a: &CMatrix<T>, b: &CMatrix<T>, cap: usize) -> Result<T> {
    let applied = d.apply(0, a, cap)?.apply(1, b, cap)?;
    Ok(d.inner(&applied).re)
}

fn pair_probabilities<T: Real>(sc: &ScatteringScenario<T>, d: &DenseTensor<T>) -> Result<PairProbabilities<T>> {
    let k = sc.kernels();
    let cap = sc.limits().dense_max;
    let two = T::one() + T::one();
    Ok(PairProbabilities {
        ss: pair_expectation(d, &k.j_s, &k.j_s, cap)?,
        se: two * pair_expectation(d, &k.j_s, &k.j_e, cap)?,
        sm: two * pair_expectation(d, &k.j_s, &k.j_m, cap)?,
        ee: pair_expectation(d, &k.j_e, &k.j_e, cap)?,
        em: two * pair_expectation(d, &k.j_e, &k.j_m, cap)?,
        mm: pair_expectation(d, &k.j_m, &k.j_m, cap)?,
    })
}

pub fn two_polariton<T: Real>(sc: &ScatteringScenario<T>) -> Result<TwoPolariton<T>> {
    let psi = require_single_component(sc, 2)?;
    let space = sc.mode_space();
    let cap = sc.limits().dense_max;
    let d = DenseTensor::from_s_tensor(psi, space, cap)?;
    let probabilities = pair_probabilities(sc, &d)?;
    let t = sc.transmission();
    let n = space.count(Character::S);

    let phi2 = d.apply(0, t, cap)?.apply(1, t, cap)?;
    let rho_2s_state = if probabilities.ss > T::zero() {
        let norm = real(probabilities.ss.sqrt());
        let mut out = AmplitudeTensor::new(Signature::new(2, 0, 0));
        for xi in canonical_tuples(Signature::new(2, 0, 0), space) {
            let idx: Vec<usize> = xi.s.iter().map(|&i| space.local_index(i).unwrap()).collect();
            out.insert(xi, phi2.get(&idx) / norm)?;
        }
        Some(out)
    } else {
        None
    };

    let one = probabilities.se + probabilities.sm;
    let rho_1s = if one > T::zero() {
        let dressed = d.apply(0, t, cap)?;
        let absorbed = dressed.apply(1, &sc.kernels().j_em(), cap)?;
        let a = CMatrix::from_row_slice(n, n, absorbed.data());
        let b = CMatrix::from_row_slice(n, n, dressed.data());
        let two = T::one() + T::one();
        let matrix = (a * b.adjoint()) * real(two / one);
        let (eigenvalues, eigenvectors) = linalg::hermitian_eigen(&matrix);
        Some(SpectralForm { matrix, eigenvalues, eigenvectors })
    } else {
        None
    };

    Ok(TwoPolariton {
        probabilities,
        rho_2s_state,
        rho_1s,
        vacuum_weight: probabilities.ee + probabilities.em + probabilities.mm,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntangledPairEigen<T: Real> {
    pub x_s: CMatrix<T>,
    pub x_em: CMatrix<T>,
    /// `X_em` with the diagonal swapped, as it enters the eigenproblem.
    pub x_em_tilde: CMatrix<T>,
    /// `P_se + P_sm` for the entangled input.
    pub one_polariton_weight: T,
    pub eigenvalues: [T; 2],
    /// Coefficient vectors (columns) normalised with respect to `X_s`.
    pub eigenvectors: CMatrix<T>,
    /// `T (c_1 phi1 + c_2 phi2)` for each eigenvector, over s-modes.
    pub states: Vec<CVector<T>>,
}

fn sqrt_2x2<T: Real>(m: &CMatrix<T>, inverse: bool) -> CMatrix<T> {
    let (vals, vecs) = hermitian_eigen_2x2(m);
    let mut d = CMatrix::zeros(2, 2);
    for i in 0..2 {
        let r = vals[i].max(T::zero()).sqrt();
        d[(i, i)] = real(if inverse { T::one() / r } else { r });
    }
    &vecs * d * vecs.adjoint()
}

/// The 2×2 eigenproblem for the entangled pair built from orthonormal
/// `phi1`, `phi2` (vectors over s-modes). Only the scenario's matrices are
/// used; its input state is ignored.
pub fn entangled_pair_eigenproblem<T: Real>(
    sc: &ScatteringScenario<T>,
    phi1: &CVector<T>,
    phi2: &CVector<T>,
) -> Result<EntangledPairEigen<T>> {
    let space = sc.mode_space();
    let n = space.count(Character::S);
    if phi1.len() != n || phi2.len() != n {
        return Err(Error::Shape(format!("single-polariton vectors must have length {n}")));
    }
    let tol = T::lit(1e-10);
    let gram = [phi1.dotc(phi1), phi1.dotc(phi2), phi2.dotc(phi2)];
    if crate::num::modulus(gram[0] - real(T::one())) > tol
        || crate::num::modulus(gram[1]) > tol
        || crate::num::modulus(gram[2] - real(T::one())) > tol
    {
        return Err(Error::Parameter("phi1 and phi2 must be orthonormal".into()));
    }
    let k = sc.kernels();
    let j_em = k.j_em();
    let phis = [phi1, phi2];
    let x_s = CMatrix::from_fn(2, 2, |i, j| quad(phis[i], &k.j_s, phis[j]));
    let x_em = CMatrix::from_fn(2, 2, |i, j| quad(phis[i], &j_em, phis[j]));
    let det = x_s[(0, 0)] * x_s[(1, 1)] - x_s[(0, 1)] * x_s[(1, 0)];
    if crate::num::modulus(det) < T::lit(1e-12) {
        return Err(Error::SingularTransmission(crate::num::modulus(det).to_f64()));
    }
    let x_em_tilde = CMatrix::from_row_slice(2, 2, &[x_em[(1, 1)], x_em[(0, 1)], x_em[(1, 0)], x_em[(0, 0)]]);

    let cap = sc.limits().dense_max;
    let psi = entangled_pair(space, phi1, phi2)?;
    let d = DenseTensor::from_s_tensor(&psi, space, cap)?;
    let two = T::one() + T::one();
    let one_polariton_weight = two * pair_expectation(&d, &k.j_s, &j_em, cap)?;

    let root = sqrt_2x2(&x_s, false);
    let inv_root = sqrt_2x2(&x_s, true);
    let h = if one_polariton_weight > T::lit(1e-14) {
        (&root * &x_em_tilde * &root) / real(one_polariton_weight)
    } else {
        CMatrix::zeros(2, 2)
    };
    let (eigenvalues, v) = hermitian_eigen_2x2(&h);
    let eigenvectors = &inv_root * v;
    let t = sc.transmission();
    let states = (0..2)
        .map(|a| t * (phi1 * eigenvectors[(0, a)] + phi2 * eigenvectors[(1, a)]))
        .collect();
    Ok(EntangledPairEigen { x_s, x_em, x_em_tilde, one_polariton_weight, eigenvalues, eigenvectors, states })
}
