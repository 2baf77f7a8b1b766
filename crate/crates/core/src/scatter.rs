//! Transition amplitudes, outgoing states and sector probabilities.

use crate::dense::DenseTensor;
use crate::error::{Error, Result};
use crate::fock::{
    canonical_tuples, enumerate_sectors, permanent, tuple_to_occupation, AmplitudeTensor, PolaritonState,
    PolaritonTuple, Signature,
};
use crate::modespace::{Character, ModeSpace};
use crate::num::{factorial_real, real, CMatrix, Complex, Real};
use crate::scatmat::{BlockScatteringMatrix, KernelSet, DEFAULT_TAU_UNITARY};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest polariton number accepted in an input state.
    pub n_max: usize,
    /// Largest permanent evaluated.
    pub permanent_max: usize,
    /// Largest dense ordered-tuple tensor, in complex entries.
    pub dense_max: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { n_max: 6, permanent_max: 12, dense_max: 1 << 22 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub unitary: f64,
    pub state: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { unitary: DEFAULT_TAU_UNITARY, state: 1e-10 }
    }
}

/// What ingestion did to the supplied input.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct IngestReport {
    pub norm_before: f64,
    pub renormalized: bool,
}

const WARN_CORRECTION: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct ScatteringScenario<T: Real> {
    space: ModeSpace,
    matrices: Vec<BlockScatteringMatrix<T>>,
    psi_in: PolaritonState<T>,
    limits: Limits,
    tolerances: Tolerances,
    ingest: IngestReport,
    z: CMatrix<T>,
    t: CMatrix<T>,
    a_e: CMatrix<T>,
    a_m: CMatrix<T>,
    kernels: KernelSet<T>,
}

/// Value of `p_PQR` with the unclamped number kept for diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SectorProbability<T> {
    pub probability: T,
    pub raw: T,
    pub imaginary: T,
}

fn sub_matrix<T: Real>(z: &CMatrix<T>, rows: &[usize], cols: &[usize]) -> CMatrix<T> {
    CMatrix::from_fn(rows.len(), cols.len(), |i, j| z[(rows[i], cols[j])])
}

impl<T: Real> ScatteringScenario<T> {
    pub fn new(
        space: ModeSpace,
        matrices: Vec<BlockScatteringMatrix<T>>,
        psi_in: impl Into<PolaritonState<T>>,
    ) -> Result<Self> {
        Self::with_options(space, matrices, psi_in, Limits::default(), Tolerances::default())
    }

    pub fn with_options(
        space: ModeSpace,
        matrices: Vec<BlockScatteringMatrix<T>>,
        psi_in: impl Into<PolaritonState<T>>,
        limits: Limits,
        tolerances: Tolerances,
    ) -> Result<Self> {
        let mut psi_in = psi_in.into();
        let sectors = space.sectors();
        if matrices.len() != sectors.len() {
            return Err(Error::Shape(format!(
                "{} matrices supplied for {} sectors",
                matrices.len(),
                sectors.len()
            )));
        }
        let n = space.total_modes();
        let mut z = CMatrix::<T>::zeros(n, n);
        for (k, (mat, sec)) in matrices.iter().zip(sectors).enumerate() {
            if mat.dims() != (sec.n_s, sec.n_e, sec.n_m) {
                return Err(Error::Shape(format!(
                    "sector {k}: matrix blocks {:?} do not match channel counts ({}, {}, {})",
                    mat.dims(),
                    sec.n_s,
                    sec.n_e,
                    sec.n_m
                )));
            }
            let report = mat.validate(T::lit(tolerances.unitary));
            if !report.is_unitary {
                return Err(Error::NotUnitary(report.max_residual));
            }
            let range = space.sector_range(k);
            z.view_mut((range.start, range.start), (range.len(), range.len())).copy_from(mat.z());
        }
        let matrices: Vec<_> = matrices.into_iter().enumerate().map(|(k, m)| m.with_sector(k)).collect();

        psi_in.validate(&space)?;
        let n_in = psi_in.max_n();
        if n_in > limits.n_max {
            return Err(Error::Resource { what: "polariton number", value: n_in, cap: limits.n_max });
        }
        let norm = psi_in.norm_sqr();
        if !(norm > T::zero()) {
            return Err(Error::State("input state has zero norm".into()));
        }
        let norm_before = norm.to_f64();
        let renormalized = (norm_before - 1.0).abs() > WARN_CORRECTION;
        if renormalized {
            log::warn!("input state norm {norm_before} renormalised to 1");
        }
        psi_in.scale(real(T::one() / norm.sqrt()));

        let s = space.modes(Character::S);
        let e = space.modes(Character::E);
        let m = space.modes(Character::M);
        let t = sub_matrix(&z, s, s);
        let a_e = sub_matrix(&z, e, s);
        let a_m = sub_matrix(&z, m, s);
        let kernels = KernelSet {
            j_s: t.adjoint() * &t,
            j_e: a_e.adjoint() * &a_e,
            j_m: a_m.adjoint() * &a_m,
        };
        Ok(Self {
            space,
            matrices,
            psi_in,
            limits,
            tolerances,
            ingest: IngestReport { norm_before, renormalized },
            z,
            t,
            a_e,
            a_m,
            kernels,
        })
    }

    /// Same matrices, different input.
    pub fn with_input(&self, psi_in: impl Into<PolaritonState<T>>) -> Result<Self> {
        Self::with_options(self.space.clone(), self.matrices.clone(), psi_in, self.limits, self.tolerances)
    }

    pub fn mode_space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn matrices(&self) -> &[BlockScatteringMatrix<T>] {
        &self.matrices
    }

    pub fn psi_in(&self) -> &PolaritonState<T> {
        &self.psi_in
    }

    pub fn limits(&self) -> Limits {
        self.limits
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    pub fn ingest_report(&self) -> IngestReport {
        self.ingest
    }

    /// Block-diagonal unitary over all global modes.
    pub fn global_z(&self) -> &CMatrix<T> {
        &self.z
    }

    /// Transmission over all s-modes (rows outgoing, columns ingoing).
    pub fn transmission(&self) -> &CMatrix<T> {
        &self.t
    }

    pub fn absorption(&self, ch: Character) -> &CMatrix<T> {
        match ch {
            Character::S => &self.t,
            Character::E => &self.a_e,
            Character::M => &self.a_m,
        }
    }

    /// Kernels over all s-modes.
    pub fn kernels(&self) -> &KernelSet<T> {
        &self.kernels
    }

    pub fn is_lossless(&self) -> bool {
        let tau = T::lit(self.tolerances.unitary);
        self.matrices.iter().all(|m| m.validate(tau).is_lossless)
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n > self.limits.n_max {
            return Err(Error::Resource { what: "polariton number", value: n, cap: self.limits.n_max });
        }
        if n > self.limits.permanent_max {
            return Err(Error::Resource { what: "permanent size", value: n, cap: self.limits.permanent_max });
        }
        Ok(())
    }

    fn permanent_of(&self, out: &PolaritonTuple, inp: &PolaritonTuple) -> Result<Complex<T>> {
        let rows: Vec<usize> = out.labels().collect();
        let cols: Vec<usize> = inp.labels().collect();
        permanent(&sub_matrix(&self.z, &rows, &cols))
    }

    /// `<out|in>` between tuple states: the permanent of the matrix of
    /// Z-entries, scaled by `1/sqrt(P!Q!R! p!q!r!)`. Zero unless both the
    /// polariton number and the multiset of frequency sectors agree.
    pub fn amplitude(&self, out: &PolaritonTuple, inp: &PolaritonTuple) -> Result<Complex<T>> {
        self.check_size(out.len().max(inp.len()))?;
        out.validate(&self.space)?;
        inp.validate(&self.space)?;
        if out.len() != inp.len() || out.sector_tags(&self.space) != inp.sector_tags(&self.space) {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let perm = self.permanent_of(out, inp)?;
        let norm = [out.signature(), inp.signature()]
            .iter()
            .flat_map(|s| [s.p, s.q, s.r])
            .fold(T::one(), |acc, k| acc * factorial_real::<T>(k));
        Ok(perm.unscale(norm.sqrt()))
    }

    /// Amplitude between normalised occupation states:
    /// `Perm / sqrt(prod m_j! prod n_i!)`.
    pub fn occupation_amplitude(&self, out: &PolaritonTuple, inp: &PolaritonTuple) -> Result<Complex<T>> {
        self.check_size(out.len().max(inp.len()))?;
        out.validate(&self.space)?;
        inp.validate(&self.space)?;
        if out.len() != inp.len() || out.sector_tags(&self.space) != inp.sector_tags(&self.space) {
            return Ok(Complex::new(T::zero(), T::zero()));
        }
        let perm = self.permanent_of(out, inp)?;
        let norm = (tuple_to_occupation(out).factorial_product() * tuple_to_occupation(inp).factorial_product()) as f64;
        Ok(perm.unscale(T::lit(norm).sqrt()))
    }

    /// Outgoing wavefunction in every sector reachable from the input,
    /// built from permanent amplitudes.
    pub fn full_output_state(&self) -> Result<BTreeMap<Signature, AmplitudeTensor<T>>> {
        let mut out: BTreeMap<Signature, AmplitudeTensor<T>> = BTreeMap::new();
        for (sig_in, psi) in self.psi_in.components() {
            let n = sig_in.total();
            self.check_size(n)?;
            let inputs: Vec<(PolaritonTuple, T, Complex<T>, Vec<usize>)> = psi
                .iter()
                .map(|(t, v)| (t.clone(), T::lit(t.multiplicity() as f64), *v, t.sector_tags(&self.space)))
                .collect();
            let tags: BTreeSet<&Vec<usize>> = inputs.iter().map(|x| &x.3).collect();
            for sig_out in enumerate_sectors(n, &self.space) {
                let tuples: Vec<PolaritonTuple> = canonical_tuples(sig_out, &self.space)
                    .into_iter()
                    .filter(|t| tags.contains(&t.sector_tags(&self.space)))
                    .collect();
                let values: Vec<Result<Complex<T>>> = tuples
                    .par_iter()
                    .map(|xi| {
                        let xi_tags = xi.sector_tags(&self.space);
                        let mut acc = Complex::new(T::zero(), T::zero());
                        for (inp, mult, v, in_tags) in &inputs {
                            if *in_tags != xi_tags {
                                continue;
                            }
                            acc += self.amplitude(xi, inp)? * *v * *mult;
                        }
                        Ok(acc)
                    })
                    .collect();
                let mut tensor = AmplitudeTensor::new(sig_out);
                for (t, v) in tuples.into_iter().zip(values) {
                    tensor.insert(t, v?)?;
                }
                match out.get_mut(&sig_out) {
                    Some(prev) => prev.accumulate(&tensor),
                    None => {
                        out.insert(sig_out, tensor);
                    }
                }
            }
        }
        Ok(out)
    }

    fn require_s_only(&self) -> Result<()> {
        if !self.psi_in.is_s_only() {
            return Err(Error::UnsupportedInput(
                "input holds e/m polaritons; use full_output_state".into(),
            ));
        }
        Ok(())
    }

    /// Dense expansion of the `n`-polariton s component, if present.
    pub(crate) fn dense_input(&self, n: usize) -> Result<Option<DenseTensor<T>>> {
        match self.psi_in.s_component(n) {
            Some(psi) => Ok(Some(DenseTensor::from_s_tensor(psi, &self.space, self.limits.dense_max)?)),
            None => Ok(None),
        }
    }

    /// Outgoing wavefunction of one sector by direct contraction of the
    /// input with `T`, `A_e`, `A_m` slot by slot (s-only inputs).
    pub fn outgoing_wavefunction(&self, sig: Signature) -> Result<AmplitudeTensor<T>> {
        self.require_s_only()?;
        let n = sig.total();
        let mut tensor = AmplitudeTensor::new(sig);
        let Some(dense) = self.dense_input(n)? else {
            return Ok(tensor);
        };
        let mats: Vec<&CMatrix<T>> = std::iter::repeat_n(&self.t, sig.p)
            .chain(std::iter::repeat_n(&self.a_e, sig.q))
            .chain(std::iter::repeat_n(&self.a_m, sig.r))
            .collect();
        let out = dense.apply_all(&mats, self.limits.dense_max)?;
        let pref = (factorial_real::<T>(n) / (factorial_real::<T>(sig.p) * factorial_real::<T>(sig.q) * factorial_real::<T>(sig.r))).sqrt();
        for xi in canonical_tuples(sig, &self.space) {
            let idx: Vec<usize> = xi.labels().map(|i| self.space.local_index(i).unwrap()).collect();
            tensor.insert(xi, out.get(&idx) * pref)?;
        }
        Ok(tensor)
    }

    /// `p_PQR` from the kernels: `N!/(P!Q!R!) <psi| J_s^P J_e^Q J_m^R |psi>`.
    pub fn sector_probability(&self, sig: Signature) -> Result<SectorProbability<T>> {
        self.require_s_only()?;
        let n = sig.total();
        let zero = SectorProbability { probability: T::zero(), raw: T::zero(), imaginary: T::zero() };
        let Some(dense) = self.dense_input(n)? else {
            return Ok(zero);
        };
        let k = &self.kernels;
        let mats: Vec<&CMatrix<T>> = std::iter::repeat_n(&k.j_s, sig.p)
            .chain(std::iter::repeat_n(&k.j_e, sig.q))
            .chain(std::iter::repeat_n(&k.j_m, sig.r))
            .collect();
        let applied = dense.apply_all(&mats, self.limits.dense_max)?;
        let pref = factorial_real::<T>(n) / (factorial_real::<T>(sig.p) * factorial_real::<T>(sig.q) * factorial_real::<T>(sig.r));
        let value = dense.inner(&applied) * pref;
        let raw = value.re;
        let probability = if raw < T::zero() && raw > -T::lit(1e-12) { T::zero() } else { raw };
        Ok(SectorProbability { probability, raw, imaginary: value.im })
    }
}

/// `sum_canonical multiplicity * |Psi|^2` of one sector tensor.
pub fn probability_from_amplitudes<T: Real>(tensor: &AmplitudeTensor<T>) -> T {
    tensor.norm_sqr()
}
