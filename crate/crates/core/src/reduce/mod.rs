//! Reduced density matrix of the scattered radiation and its spectrum.

mod special;

pub use special::{
    entangled_pair_eigenproblem, one_polariton, two_polariton, EntangledPairEigen, OnePolariton, PairProbabilities,
    SpectralForm, TwoPolariton,
};

use crate::error::{Error, Result};
use crate::fock::{canonical_tuples, PolaritonTuple, Signature};
use crate::linalg;
use crate::modespace::{Character, ModeSpace};
use crate::num::{cplx, factorial_real, real, CMatrix, Complex, Real};
use crate::scatter::ScatteringScenario;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub const DEFAULT_RANK_TOL: f64 = 1e-9;
const HERMITIAN_TOL: f64 = 1e-8;

/// Density matrix over s-only outgoing states, blocked by photon number.
/// Rows and columns of block `(P, P')` follow the canonical s-tuples of
/// size `P` and `P'`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedDensityMatrix<T: Real> {
    bases: BTreeMap<usize, Vec<PolaritonTuple>>,
    index: BTreeMap<usize, BTreeMap<PolaritonTuple, usize>>,
    blocks: BTreeMap<(usize, usize), CMatrix<T>>,
}

/// One exported entry `rho(tuple_row | tuple_col)` of block `(P, P')`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityRecord {
    #[serde(rename = "P")]
    pub p: usize,
    #[serde(rename = "P'")]
    pub p_prime: usize,
    pub tuple_row: Vec<usize>,
    pub tuple_col: Vec<usize>,
    pub re: f64,
    pub im: f64,
}

impl<T: Real> ReducedDensityMatrix<T> {
    /// All-zero matrix holding blocks for photon numbers `0..=max_p`.
    pub fn zeros(space: &ModeSpace, max_p: usize) -> Self {
        let mut bases = BTreeMap::new();
        let mut index = BTreeMap::new();
        for p in 0..=max_p {
            let basis = canonical_tuples(Signature::new(p, 0, 0), space);
            index.insert(p, basis.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect());
            bases.insert(p, basis);
        }
        let mut blocks = BTreeMap::new();
        for p in 0..=max_p {
            for q in 0..=max_p {
                blocks.insert((p, q), CMatrix::zeros(bases[&p].len(), bases[&q].len()));
            }
        }
        Self { bases, index, blocks }
    }

    pub fn max_p(&self) -> usize {
        self.bases.keys().next_back().copied().unwrap_or(0)
    }

    pub fn basis(&self, p: usize) -> &[PolaritonTuple] {
        self.bases.get(&p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn block(&self, p: usize, p_prime: usize) -> Option<&CMatrix<T>> {
        self.blocks.get(&(p, p_prime))
    }

    pub fn block_mut(&mut self, p: usize, p_prime: usize) -> Option<&mut CMatrix<T>> {
        self.blocks.get_mut(&(p, p_prime))
    }

    pub fn blocks(&self) -> &BTreeMap<(usize, usize), CMatrix<T>> {
        &self.blocks
    }

    /// Entry `rho(row | col)`; zero if either tuple is outside the basis.
    pub fn get(&self, row: &PolaritonTuple, col: &PolaritonTuple) -> Complex<T> {
        let (p, q) = (row.len(), col.len());
        let i = self.index.get(&p).and_then(|m| m.get(&row.canonical()));
        let j = self.index.get(&q).and_then(|m| m.get(&col.canonical()));
        match (i, j, self.blocks.get(&(p, q))) {
            (Some(&i), Some(&j), Some(b)) => b[(i, j)],
            _ => Complex::new(T::zero(), T::zero()),
        }
    }

    /// `sum_P sum_canonical multiplicity * rho(t | t)`.
    pub fn trace(&self) -> T {
        let mut tr = T::zero();
        for (&p, basis) in &self.bases {
            let b = &self.blocks[&(p, p)];
            for (i, t) in basis.iter().enumerate() {
                tr += T::lit(t.multiplicity() as f64) * b[(i, i)].re;
            }
        }
        tr
    }

    pub fn hermiticity_residual(&self) -> T {
        let mut worst = T::zero();
        for (&(p, q), b) in &self.blocks {
            if let Some(other) = self.blocks.get(&(q, p)) {
                worst = worst.max(crate::num::max_abs(&(b - other.adjoint())));
            }
        }
        worst
    }

    /// Largest entrywise modulus difference; missing blocks count as zero.
    pub fn max_deviation(&self, other: &Self) -> T {
        use crate::num::max_abs;
        let mut worst = T::zero();
        for (key, b) in &self.blocks {
            worst = worst.max(match other.blocks.get(key) {
                Some(o) => max_abs(&(b - o)),
                None => max_abs(b),
            });
        }
        for (key, o) in &other.blocks {
            if !self.blocks.contains_key(key) {
                worst = worst.max(max_abs(o));
            }
        }
        worst
    }

    /// `W^{1/2} rho W^{1/2}` with `W` the diagonal multiplicity matrix,
    /// rows ordered by photon number then canonical tuple.
    pub fn weighted_matrix(&self) -> (CMatrix<T>, Vec<PolaritonTuple>) {
        let mut labels = Vec::new();
        let mut offsets = BTreeMap::new();
        for (&p, basis) in &self.bases {
            offsets.insert(p, labels.len());
            labels.extend(basis.iter().cloned());
        }
        let weights: Vec<T> = labels.iter().map(|t| T::lit(t.multiplicity() as f64).sqrt()).collect();
        let n = labels.len();
        let mut h = CMatrix::zeros(n, n);
        for (&(p, q), b) in &self.blocks {
            let (r0, c0) = (offsets[&p], offsets[&q]);
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    h[(r0 + i, c0 + j)] = b[(i, j)] * weights[r0 + i] * weights[c0 + j];
                }
            }
        }
        (h, labels)
    }

    pub fn to_records(&self) -> Vec<DensityRecord> {
        let mut out = Vec::new();
        for (&(p, q), b) in &self.blocks {
            for (i, row) in self.bases[&p].iter().enumerate() {
                for (j, col) in self.bases[&q].iter().enumerate() {
                    let z = b[(i, j)];
                    if z.re == T::zero() && z.im == T::zero() {
                        continue;
                    }
                    out.push(DensityRecord {
                        p,
                        p_prime: q,
                        tuple_row: row.s.clone(),
                        tuple_col: col.s.clone(),
                        re: z.re.to_f64(),
                        im: z.im.to_f64(),
                    });
                }
            }
        }
        out
    }

    pub fn from_records(space: &ModeSpace, max_p: usize, records: &[DensityRecord]) -> Result<Self> {
        let mut rho = Self::zeros(space, max_p);
        for rec in records {
            let row = PolaritonTuple::s_only(rec.tuple_row.clone());
            let col = PolaritonTuple::s_only(rec.tuple_col.clone());
            let (Some(&i), Some(&j)) = (
                rho.index.get(&rec.p).and_then(|m| m.get(&row)),
                rho.index.get(&rec.p_prime).and_then(|m| m.get(&col)),
            ) else {
                return Err(Error::InvalidLabel(format!("density record {row} / {col} outside the basis")));
            };
            rho.blocks.get_mut(&(rec.p, rec.p_prime)).unwrap()[(i, j)] = cplx(T::lit(rec.re), T::lit(rec.im));
        }
        Ok(rho)
    }

    fn row_index(&self, p: usize, t: &PolaritonTuple) -> Option<usize> {
        self.index.get(&p).and_then(|m| m.get(t)).copied()
    }
}

/// Offset of a tuple of local indices inside a row-major `[n; k]` grid.
fn grid_offset(local: &[usize], n: usize) -> usize {
    local.iter().fold(0, |acc, &i| acc * n + i)
}

/// Closed-form reduced density matrix: dressed inputs `T^{P}` contracted
/// against the absorption kernels on the remaining `S` slots.
pub fn reduced_density<T: Real>(sc: &ScatteringScenario<T>) -> Result<ReducedDensityMatrix<T>> {
    if !sc.psi_in().is_s_only() {
        return Err(Error::UnsupportedInput("closed-form reduction needs an s-only input".into()));
    }
    let space = sc.mode_space();
    let max_n = sc.psi_in().max_n();
    let mut rho = ReducedDensityMatrix::zeros(space, max_n);
    let n_s = space.count(Character::S);
    let cap = sc.limits().dense_max;
    let t = sc.transmission();
    let k = sc.kernels();

    let mut dense = BTreeMap::new();
    for n in sc.psi_in().numbers() {
        if let Some(d) = sc.dense_input(n)? {
            dense.insert(n, d);
        }
    }

    let pairs: Vec<(usize, usize)> = (0..=max_n).flat_map(|p| (0..=max_n).map(move |q| (p, q))).collect();
    let results: Vec<Result<((usize, usize), CMatrix<T>)>> = pairs
        .par_iter()
        .map(|&(p, q)| {
            let rows: Vec<usize> = rho.basis(p).iter().map(|x| local_offset(space, x, n_s)).collect();
            let cols: Vec<usize> = rho.basis(q).iter().map(|x| local_offset(space, x, n_s)).collect();
            let mut block = CMatrix::<T>::zeros(rows.len(), cols.len());
            for s in 0..=max_n {
                let (Some(dp), Some(dq)) = (dense.get(&(p + s)), dense.get(&(q + s))) else {
                    continue;
                };
                let mut phi = dp.clone();
                for slot in 0..p {
                    phi = phi.apply(slot, t, cap)?;
                }
                let mut phi_q = dq.clone();
                for slot in 0..q {
                    phi_q = phi_q.apply(slot, t, cap)?;
                }
                let inner = n_s.pow(s as u32);
                let right = select_rows(phi_q.data(), &cols, inner);
                let coef = (factorial_real::<T>(p + s) * factorial_real::<T>(q + s)
                    / (factorial_real::<T>(p) * factorial_real::<T>(q)))
                .sqrt();
                for nq in 0..=s {
                    let mut dressed = phi.clone();
                    for slot in 0..s {
                        let kern = if slot < nq { &k.j_e } else { &k.j_m };
                        dressed = dressed.apply(p + slot, kern, cap)?;
                    }
                    let left = select_rows(dressed.data(), &rows, inner);
                    let w = coef / (factorial_real::<T>(nq) * factorial_real::<T>(s - nq));
                    block += (left * right.adjoint()) * real(w);
                }
            }
            Ok(((p, q), block))
        })
        .collect();
    for r in results {
        let (key, block) = r?;
        rho.blocks.insert(key, block);
    }
    Ok(rho)
}

fn local_offset(space: &ModeSpace, t: &PolaritonTuple, n_s: usize) -> usize {
    let local: Vec<usize> = t.s.iter().map(|&i| space.local_index(i).unwrap()).collect();
    grid_offset(&local, n_s)
}

fn select_rows<T: Real>(data: &[Complex<T>], rows: &[usize], inner: usize) -> CMatrix<T> {
    CMatrix::from_fn(rows.len(), inner, |i, j| data[rows[i] * inner + j])
}

/// Partial trace of `|Psi_out><Psi_out|` over every e/m tuple, computed from
/// the permanent-built outgoing state.
pub fn partial_trace_oracle<T: Real>(sc: &ScatteringScenario<T>) -> Result<ReducedDensityMatrix<T>> {
    let outputs = sc.full_output_state()?;
    let max_p = sc.psi_in().max_n();
    let mut rho = ReducedDensityMatrix::zeros(sc.mode_space(), max_p);

    type Grouped<T> = BTreeMap<(Vec<usize>, Vec<usize>), Vec<(PolaritonTuple, Complex<T>)>>;
    let mut grouped: BTreeMap<Signature, Grouped<T>> = BTreeMap::new();
    for (sig, tensor) in &outputs {
        let g = grouped.entry(*sig).or_default();
        for (t, v) in tensor.iter() {
            g.entry((t.e.clone(), t.m.clone()))
                .or_default()
                .push((PolaritonTuple::s_only(t.s.clone()), *v));
        }
    }
    for (sig, g) in &grouped {
        for (sig2, g2) in &grouped {
            if sig.q != sig2.q || sig.r != sig2.r {
                continue;
            }
            let (p, q) = (sig.p, sig2.p);
            let mut block = rho.blocks[&(p, q)].clone();
            for (em, list) in g {
                let Some(list2) = g2.get(em) else { continue };
                let weight = T::lit(
                    (PolaritonTuple::new(Vec::new(), em.0.clone(), em.1.clone()).multiplicity()) as f64,
                );
                for (row, v) in list {
                    let i = rho.row_index(p, row).unwrap();
                    for (col, v2) in list2 {
                        let j = rho.row_index(q, col).unwrap();
                        block[(i, j)] += *v * v2.conj() * weight;
                    }
                }
            }
            rho.blocks.insert((p, q), block);
        }
    }
    Ok(rho)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceReport<T: Real> {
    pub purity: T,
    pub von_neumann_entropy: T,
    /// Descending; only rows with positive diagonal weight enter the solve.
    pub eigenvalues: Vec<T>,
    pub schmidt_rank_estimate: usize,
    pub trace: T,
}

pub fn analyze<T: Real>(rho: &ReducedDensityMatrix<T>) -> Result<DecoherenceReport<T>> {
    analyze_with(rho, T::lit(DEFAULT_RANK_TOL))
}

pub fn analyze_with<T: Real>(rho: &ReducedDensityMatrix<T>, rank_tol: T) -> Result<DecoherenceReport<T>> {
    let herm = rho.hermiticity_residual();
    if herm > T::lit(HERMITIAN_TOL) {
        return Err(Error::Integrity(format!("density matrix is not Hermitian (residual {herm:e})")));
    }
    let (h, _) = rho.weighted_matrix();
    let support: Vec<usize> = (0..h.nrows()).filter(|&i| h[(i, i)].re > T::zero()).collect();
    let reduced = CMatrix::from_fn(support.len(), support.len(), |i, j| h[(support[i], support[j])]);
    let (eigenvalues, _) = linalg::hermitian_eigen(&reduced);
    let purity = eigenvalues.iter().fold(T::zero(), |a, &l| a + l * l);
    let von_neumann_entropy = eigenvalues
        .iter()
        .filter(|&&l| l > T::zero())
        .fold(T::zero(), |a, &l| a - l * l.ln());
    let schmidt_rank_estimate = eigenvalues.iter().filter(|&&l| l > rank_tol).count();
    Ok(DecoherenceReport { purity, von_neumann_entropy, eigenvalues, schmidt_rank_estimate, trace: rho.trace() })
}
