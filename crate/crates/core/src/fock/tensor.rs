use super::tuple::{PolaritonTuple, Signature};
use crate::error::{Error, Result};
use crate::modespace::{Character, ModeSpace};
use crate::num::{cplx, real, CVector, Complex, Real};
use serde::{Deserialize, Serialize};
use std::collections::btree_map::{self, BTreeMap};

/// Symmetric wavefunction of fixed character content, stored on canonical
/// tuples. Entries not present are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeTensor<T: Real> {
    signature: Signature,
    values: BTreeMap<PolaritonTuple, Complex<T>>,
}

/// One `{tuple, re, im}` entry of a serialized tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeRecord {
    pub tuple: PolaritonTuple,
    pub re: f64,
    pub im: f64,
}

impl<T: Real> AmplitudeTensor<T> {
    pub fn new(signature: Signature) -> Self {
        Self { signature, values: BTreeMap::new() }
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn n(&self) -> usize {
        self.signature.total()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check(&self, tuple: &PolaritonTuple) -> Result<()> {
        if tuple.signature() != self.signature {
            return Err(Error::Shape(format!(
                "tuple {tuple} has signature {}, tensor holds {}",
                tuple.signature(),
                self.signature
            )));
        }
        Ok(())
    }

    /// Set the amplitude of the exchange class of `tuple`.
    pub fn insert(&mut self, tuple: PolaritonTuple, value: Complex<T>) -> Result<()> {
        self.check(&tuple)?;
        self.values.insert(tuple.canonical(), value);
        Ok(())
    }

    pub fn get(&self, tuple: &PolaritonTuple) -> Complex<T> {
        let key;
        let key = if tuple.is_canonical() {
            tuple
        } else {
            key = tuple.canonical();
            &key
        };
        self.values.get(key).copied().unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    pub fn iter(&self) -> btree_map::Iter<'_, PolaritonTuple, Complex<T>> {
        self.values.iter()
    }

    /// Tuple-measure norm squared: `sum_canonical multiplicity * |psi|^2`.
    pub fn norm_sqr(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, (t, v)| acc + T::lit(t.multiplicity() as f64) * v.norm_sqr())
    }

    pub fn scale(&mut self, factor: Complex<T>) {
        for v in self.values.values_mut() {
            *v *= factor;
        }
    }

    /// Largest entrywise modulus difference with another tensor.
    pub fn max_deviation(&self, other: &Self) -> T {
        let mut worst = T::zero();
        for (t, v) in &self.values {
            worst = worst.max((*v - other.get(t)).norm_sqr().sqrt());
        }
        for (t, v) in &other.values {
            worst = worst.max((*v - self.get(t)).norm_sqr().sqrt());
        }
        worst
    }

    pub fn to_records(&self) -> Vec<AmplitudeRecord> {
        self.values
            .iter()
            .map(|(t, v)| AmplitudeRecord { tuple: t.clone(), re: v.re.to_f64(), im: v.im.to_f64() })
            .collect()
    }

    /// Build from records. Records whose tuples fall in the same exchange
    /// class are averaged; the second value reports the largest deviation of a
    /// record from its class average.
    pub fn from_records(records: &[AmplitudeRecord]) -> Result<(Self, T)> {
        let Some(first) = records.first() else {
            return Err(Error::State("empty amplitude list".into()));
        };
        let sig = first.tuple.signature();
        let mut sums: BTreeMap<PolaritonTuple, (Complex<T>, usize)> = BTreeMap::new();
        for rec in records {
            if rec.tuple.signature() != sig {
                return Err(Error::Shape(format!(
                    "mixed signatures {} and {} in one tensor",
                    sig,
                    rec.tuple.signature()
                )));
            }
            let entry = sums.entry(rec.tuple.canonical()).or_insert((Complex::new(T::zero(), T::zero()), 0));
            entry.0 += cplx(T::lit(rec.re), T::lit(rec.im));
            entry.1 += 1;
        }
        let mut tensor = Self::new(sig);
        for (t, (sum, count)) in sums {
            tensor.values.insert(t, sum.unscale(T::count(count)));
        }
        let mut correction = T::zero();
        for rec in records {
            let avg = tensor.get(&rec.tuple);
            correction = correction.max((avg - cplx(T::lit(rec.re), T::lit(rec.im))).norm_sqr().sqrt());
        }
        Ok((tensor, correction))
    }

    /// Add another tensor of the same signature entrywise.
    pub fn accumulate(&mut self, other: &Self) {
        debug_assert_eq!(self.signature, other.signature);
        for (t, v) in &other.values {
            let cur = self.get(t);
            self.values.insert(t.clone(), cur + v);
        }
    }

    /// Map every stored value, dropping nothing.
    pub fn map_values(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            signature: self.signature,
            values: self.values.iter().map(|(t, v)| (t.clone(), f(*v))).collect(),
        }
    }
}

/// Pure state as a superposition of fixed-signature components.
#[derive(Clone, Debug, PartialEq)]
pub struct PolaritonState<T: Real> {
    components: BTreeMap<Signature, AmplitudeTensor<T>>,
}

impl<T: Real> Default for PolaritonState<T> {
    fn default() -> Self {
        Self { components: BTreeMap::new() }
    }
}

impl<T: Real> From<AmplitudeTensor<T>> for PolaritonState<T> {
    fn from(t: AmplitudeTensor<T>) -> Self {
        let mut s = Self::default();
        s.components.insert(t.signature(), t);
        s
    }
}

impl<T: Real> PolaritonState<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add a component; amplitudes on a signature already present are summed.
    pub fn add(&mut self, tensor: AmplitudeTensor<T>) {
        match self.components.get_mut(&tensor.signature()) {
            Some(existing) => existing.accumulate(&tensor),
            None => {
                self.components.insert(tensor.signature(), tensor);
            }
        }
    }

    pub fn components(&self) -> &BTreeMap<Signature, AmplitudeTensor<T>> {
        &self.components
    }

    pub fn component(&self, sig: Signature) -> Option<&AmplitudeTensor<T>> {
        self.components.get(&sig)
    }

    /// The s-only component with `n` polaritons.
    pub fn s_component(&self, n: usize) -> Option<&AmplitudeTensor<T>> {
        self.components.get(&Signature::new(n, 0, 0))
    }

    pub fn is_s_only(&self) -> bool {
        self.components.keys().all(Signature::is_s_only)
    }

    pub fn max_n(&self) -> usize {
        self.components.keys().map(Signature::total).max().unwrap_or(0)
    }

    /// Polariton numbers present, ascending and without repeats.
    pub fn numbers(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.components.keys().map(Signature::total).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    }

    pub fn norm_sqr(&self) -> T {
        self.components.values().fold(T::zero(), |a, t| a + t.norm_sqr())
    }

    pub fn scale(&mut self, factor: Complex<T>) {
        for t in self.components.values_mut() {
            t.scale(factor);
        }
    }

    pub fn validate(&self, space: &ModeSpace) -> Result<()> {
        for t in self.components.values() {
            for (tuple, _) in t.iter() {
                tuple.validate(space)?;
            }
        }
        Ok(())
    }
}

fn s_vector_check<T: Real>(space: &ModeSpace, phi: &CVector<T>) -> Result<()> {
    if phi.len() != space.count(Character::S) {
        return Err(Error::Shape(format!(
            "single-polariton vector has length {}, the mode space has {} s-modes",
            phi.len(),
            space.count(Character::S)
        )));
    }
    Ok(())
}

/// One s-polariton in the `k`-th s-mode (counting s-modes only).
pub fn single_mode<T: Real>(space: &ModeSpace, k: usize) -> Result<AmplitudeTensor<T>> {
    let mode = *space
        .modes(Character::S)
        .get(k)
        .ok_or_else(|| Error::InvalidLabel(format!("s-mode {k} out of range")))?;
    let mut t = AmplitudeTensor::new(Signature::new(1, 0, 0));
    t.insert(PolaritonTuple::s_only(vec![mode]), real(T::one()))?;
    Ok(t)
}

/// `psi(x, y) = phi(x) phi(y)` over s-modes.
pub fn product_pair<T: Real>(space: &ModeSpace, phi: &CVector<T>) -> Result<AmplitudeTensor<T>> {
    s_vector_check(space, phi)?;
    let modes = space.modes(Character::S);
    let mut t = AmplitudeTensor::new(Signature::new(2, 0, 0));
    for i in 0..modes.len() {
        for j in i..modes.len() {
            let v = phi[i] * phi[j];
            if v != Complex::new(T::zero(), T::zero()) {
                t.insert(PolaritonTuple::s_only(vec![modes[i], modes[j]]), v)?;
            }
        }
    }
    Ok(t)
}

/// `psi(x, y) = (phi1(x) phi2(y) + phi2(x) phi1(y)) / sqrt 2` over s-modes.
pub fn entangled_pair<T: Real>(
    space: &ModeSpace,
    phi1: &CVector<T>,
    phi2: &CVector<T>,
) -> Result<AmplitudeTensor<T>> {
    s_vector_check(space, phi1)?;
    s_vector_check(space, phi2)?;
    let modes = space.modes(Character::S);
    let inv = T::lit(std::f64::consts::FRAC_1_SQRT_2);
    let mut t = AmplitudeTensor::new(Signature::new(2, 0, 0));
    for i in 0..modes.len() {
        for j in i..modes.len() {
            let v = (phi1[i] * phi2[j] + phi2[i] * phi1[j]) * inv;
            if v != Complex::new(T::zero(), T::zero()) {
                t.insert(PolaritonTuple::s_only(vec![modes[i], modes[j]]), v)?;
            }
        }
    }
    Ok(t)
}
