//! Dense tensors over ordered tuples, used by the kernel and closed-form routes.

use crate::error::{Error, Result};
use crate::fock::{distinct_permutations, AmplitudeTensor};
use crate::modespace::{Character, ModeSpace};
use crate::num::{CMatrix, Complex, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct DenseTensor<T: Real> {
    dims: Vec<usize>,
    data: Vec<Complex<T>>,
}

fn checked_size(dims: &[usize], cap: usize) -> Result<usize> {
    let mut size: usize = 1;
    for &d in dims {
        size = size.checked_mul(d).unwrap_or(usize::MAX);
        if size > cap {
            return Err(Error::Resource { what: "dense tensor entries", value: size, cap });
        }
    }
    Ok(size)
}

impl<T: Real> DenseTensor<T> {
    pub fn zeros(dims: Vec<usize>, cap: usize) -> Result<Self> {
        let size = checked_size(&dims, cap)?;
        Ok(Self { dims, data: vec![Complex::new(T::zero(), T::zero()); size] })
    }

    /// Expand an s-only symmetric tensor over every ordering; slot indices
    /// are positions within the s-mode list.
    pub fn from_s_tensor(tensor: &AmplitudeTensor<T>, space: &ModeSpace, cap: usize) -> Result<Self> {
        if !tensor.signature().is_s_only() {
            return Err(Error::UnsupportedInput("dense expansion needs an s-only tensor".into()));
        }
        let n_s = space.count(Character::S);
        let mut out = Self::zeros(vec![n_s; tensor.n()], cap)?;
        for (tuple, &value) in tensor.iter() {
            let local: Vec<usize> = tuple.s.iter().map(|&i| space.local_index(i).unwrap()).collect();
            for perm in distinct_permutations(&local) {
                let at = out.offset(&perm);
                out.data[at] = value;
            }
        }
        Ok(out)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn offset(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + i)
    }

    pub fn get(&self, index: &[usize]) -> Complex<T> {
        self.data[self.offset(index)]
    }

    /// Contract `m` (rows: new slot range, cols: old) into one slot.
    pub fn apply(&self, slot: usize, m: &CMatrix<T>, cap: usize) -> Result<Self> {
        assert_eq!(m.ncols(), self.dims[slot], "slot dimension mismatch");
        let outer: usize = self.dims[..slot].iter().product();
        let inner: usize = self.dims[slot + 1..].iter().product();
        let old = self.dims[slot];
        let new = m.nrows();
        let mut dims = self.dims.clone();
        dims[slot] = new;
        let mut out = Self::zeros(dims, cap)?;
        for o in 0..outer {
            for b in 0..old {
                let src = &self.data[(o * old + b) * inner..(o * old + b + 1) * inner];
                if src.iter().all(|z| z.re == T::zero() && z.im == T::zero()) {
                    continue;
                }
                for a in 0..new {
                    let w = m[(a, b)];
                    if w.re == T::zero() && w.im == T::zero() {
                        continue;
                    }
                    let dst = &mut out.data[(o * new + a) * inner..(o * new + a + 1) * inner];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += w * s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Apply one matrix per slot, in slot order.
    pub fn apply_all(&self, matrices: &[&CMatrix<T>], cap: usize) -> Result<Self> {
        assert_eq!(matrices.len(), self.dims.len());
        let mut cur = self.clone();
        for (slot, m) in matrices.iter().enumerate() {
            cur = cur.apply(slot, m, cap)?;
        }
        Ok(cur)
    }

    /// `sum conj(self) * other`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        assert_eq!(self.dims, other.dims);
        self.data
            .iter()
            .zip(&other.data)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }
}
