use crate::error::{Error, Result};
use crate::num::{CMatrix, Complex, Real};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PermanentAlgorithm {
    #[default]
    Ryser,
    Glynn,
    Naive,
}

fn check_square<T: Real>(m: &CMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::Shape(format!(
            "permanent needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m.nrows())
}

/// Permanent by Ryser's formula (the default engine).
pub fn permanent<T: Real>(m: &CMatrix<T>) -> Result<Complex<T>> {
    permanent_with(m, PermanentAlgorithm::Ryser)
}

pub fn permanent_with<T: Real>(m: &CMatrix<T>, algorithm: PermanentAlgorithm) -> Result<Complex<T>> {
    check_square(m)?;
    Ok(match algorithm {
        PermanentAlgorithm::Ryser => ryser(m),
        PermanentAlgorithm::Glynn => glynn(m),
        PermanentAlgorithm::Naive => naive(m),
    })
}

const CHUNK_BITS: u32 = 10;

/// Ryser's inclusion-exclusion sum with Gray-code column updates.
///
/// The `2^n` subsets are cut into fixed chunks of `2^CHUNK_BITS`
/// Gray-code steps; chunk partial sums are combined in chunk order, so
/// the result does not depend on how many threads run the chunks.
pub fn ryser<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    let n = m.nrows();
    if n == 0 {
        return Complex::new(T::one(), T::zero());
    }
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << CHUNK_BITS.min(n as u32);
    let chunks = total / chunk;
    let partial: Vec<Complex<T>> = (0..chunks)
        .into_par_iter()
        .map(|c| ryser_chunk(m, c * chunk, (c + 1) * chunk))
        .collect();
    let sum = partial.into_iter().fold(Complex::new(T::zero(), T::zero()), |a, b| a + b);
    if n % 2 == 1 {
        -sum
    } else {
        sum
    }
}

fn ryser_chunk<T: Real>(m: &CMatrix<T>, start: u64, end: u64) -> Complex<T> {
    let n = m.nrows();
    let zero = Complex::new(T::zero(), T::zero());
    let mut rows = vec![zero; n];
    let gray = start ^ (start >> 1);
    for j in 0..n {
        if gray >> j & 1 == 1 {
            for (i, r) in rows.iter_mut().enumerate() {
                *r += m[(i, j)];
            }
        }
    }
    let mut size = gray.count_ones();
    let mut acc = zero;
    let mut k = start;
    loop {
        if k != 0 {
            let prod = rows.iter().fold(Complex::new(T::one(), T::zero()), |p, r| p * r);
            if size % 2 == 1 {
                acc -= prod;
            } else {
                acc += prod;
            }
        }
        k += 1;
        if k >= end {
            break;
        }
        let j = k.trailing_zeros() as usize;
        let g = k ^ (k >> 1);
        if g >> j & 1 == 1 {
            size += 1;
            for (i, r) in rows.iter_mut().enumerate() {
                *r += m[(i, j)];
            }
        } else {
            size -= 1;
            for (i, r) in rows.iter_mut().enumerate() {
                *r -= m[(i, j)];
            }
        }
    }
    acc
}

/// Glynn's formula with Gray-code sign flips; `2^(n-1)` terms.
pub fn glynn<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    let n = m.nrows();
    if n == 0 {
        return Complex::new(T::one(), T::zero());
    }
    let zero = Complex::new(T::zero(), T::zero());
    let mut cols: Vec<Complex<T>> = (0..n).map(|j| (0..n).fold(zero, |a, i| a + m[(i, j)])).collect();
    let mut sign_neg = false;
    let mut delta = vec![true; n];
    let steps: u64 = 1 << (n - 1);
    let term = |cols: &[Complex<T>]| cols.iter().fold(Complex::new(T::one(), T::zero()), |p, c| p * c);
    let mut acc = term(&cols);
    let two = T::one() + T::one();
    for k in 1..steps {
        let i = k.trailing_zeros() as usize + 1;
        let s = if delta[i] { -two } else { two };
        delta[i] = !delta[i];
        sign_neg = !sign_neg;
        for (j, c) in cols.iter_mut().enumerate() {
            *c += m[(i, j)] * s;
        }
        let t = term(&cols);
        if sign_neg {
            acc -= t;
        } else {
            acc += t;
        }
    }
    acc.unscale(T::count(steps as usize))
}

/// Direct sum over all `n!` permutations.
pub fn naive<T: Real>(m: &CMatrix<T>) -> Complex<T> {
    let n = m.nrows();
    let mut used = vec![false; n];
    fn rec<T: Real>(m: &CMatrix<T>, row: usize, used: &mut [bool], prod: Complex<T>) -> Complex<T> {
        let n = m.nrows();
        if row == n {
            return prod;
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            if !used[j] {
                used[j] = true;
                acc += rec(m, row + 1, used, prod * m[(row, j)]);
                used[j] = false;
            }
        }
        acc
    }
    rec(m, 0, &mut used, Complex::new(T::one(), T::zero()))
}
