//! Dense complex helpers built on nalgebra.

use crate::num::{abs, modulus, real, CMatrix, CVector, Complex, Real};
use nalgebra as na;
use rand::Rng;
use rand_distr::StandardNormal;

pub fn adjoint<T: Real>(m: &CMatrix<T>) -> CMatrix<T> {
    m.adjoint()
}

/// max-abs of `Z Z^† - I` and `Z^† Z - I`.
pub fn unitarity_residual<T: Real>(z: &CMatrix<T>) -> T {
    let n = z.nrows();
    let id = CMatrix::<T>::identity(n, n);
    let left = z * z.adjoint() - &id;
    let right = z.adjoint() * z - &id;
    crate::num::max_abs(&left).max(crate::num::max_abs(&right))
}

pub fn hermiticity_residual<T: Real>(h: &CMatrix<T>) -> T {
    crate::num::max_abs(&(h - h.adjoint()))
}

/// Eigenpairs of a Hermitian matrix, eigenvalues in descending order.
pub fn hermitian_eigen<T: Real>(h: &CMatrix<T>) -> (Vec<T>, CMatrix<T>) {
    let n = h.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    let sym = (h + h.adjoint()).map(|z| z * real(T::lit(0.5)));
    let eig = na::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// `[-clamp, 0)` are treated as zero; anything below is reported back.
/// Eigenvalues up to `floor` are also treated as zero, so that rounding
/// noise is not amplified by the square root.
pub fn psd_sqrt<T: Real>(h: &CMatrix<T>, clamp: T, floor: T) -> Result<CMatrix<T>, T> {
    let (values, vectors) = hermitian_eigen(h);
    if let Some(&low) = values.last() {
        if low < -clamp {
            return Err(low);
        }
    }
    let n = h.nrows();
    let mut scaled = vectors.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let root = if lambda > floor { lambda.sqrt() } else { T::zero() };
        for i in 0..n {
            scaled[(i, j)] = scaled[(i, j)] * real(root);
        }
    }
    Ok(&scaled * vectors.adjoint())
}

fn dot<T: Real>(a: &CVector<T>, b: &CVector<T>) -> Complex<T> {
    a.dotc(b)
}

fn vnorm<T: Real>(v: &CVector<T>) -> T {
    v.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr()).sqrt()
}

fn project_out<T: Real>(v: &mut CVector<T>, basis: &[CVector<T>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, v);
            v.axpy(-c, b, Complex::new(T::one(), T::zero()));
        }
    }
}

/// Multiply a column by a phase so its largest-modulus entry is real and positive.
/// Ties are broken towards the lowest index.
pub fn fix_phase<T: Real>(v: &mut CVector<T>) {
    let peak = v.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)));
    if peak == T::zero() {
        return;
    }
    let cut = peak * (T::one() - T::lit(1e-12));
    let Some(pivot) = v.iter().position(|z| modulus(*z) >= cut) else {
        return;
    };
    let z = v[pivot];
    let phase = z.conj() / real(modulus(z));
    v.apply(|x| *x = *x * phase);
    v[pivot] = real(modulus(z));
}

/// Orthonormal basis of `k` vectors spanning the orthogonal complement of the
/// (orthonormal) columns of `c`, via column-pivoted Gram-Schmidt QR of the
/// complement projector. Each returned column has the phase fixed by [`fix_phase`].
pub fn complement_basis<T: Real>(c: &CMatrix<T>, k: usize) -> CMatrix<T> {
    let n = c.nrows();
    let projector = CMatrix::<T>::identity(n, n) - c * c.adjoint();
    let taken: Vec<CVector<T>> = c.column_iter().map(|col| col.into_owned()).collect();
    let mut residual: Vec<CVector<T>> = projector.column_iter().map(|col| col.into_owned()).collect();
    let mut basis: Vec<CVector<T>> = Vec::with_capacity(k);
    let mut out = CMatrix::zeros(n, k);
    for step in 0..k {
        let mut pivot = 0;
        let mut best = -T::one();
        for (j, col) in residual.iter().enumerate() {
            let nrm = vnorm(col);
            if nrm > best {
                best = nrm;
                pivot = j;
            }
        }
        let mut v = residual[pivot].clone();
        project_out(&mut v, &taken);
        project_out(&mut v, &basis);
        let nrm = vnorm(&v);
        v.unscale_mut(nrm);
        fix_phase(&mut v);
        for col in residual.iter_mut() {
            let coeff = dot(&v, col);
            col.axpy(-coeff, &v, Complex::new(T::one(), T::zero()));
        }
        out.set_column(step, &v);
        basis.push(v);
    }
    out
}

/// Thin QR of the columns of `g` by modified Gram-Schmidt with one round of
/// reorthogonalisation. The triangular factor has a positive real diagonal.
pub fn orthonormalize<T: Real>(g: &CMatrix<T>) -> CMatrix<T> {
    let mut basis: Vec<CVector<T>> = Vec::with_capacity(g.ncols());
    let mut out = CMatrix::zeros(g.nrows(), g.ncols());
    for (j, col) in g.column_iter().enumerate() {
        let mut v = col.into_owned();
        project_out(&mut v, &basis);
        let nrm = vnorm(&v);
        v.unscale_mut(nrm);
        out.set_column(j, &v);
        basis.push(v);
    }
    out
}

pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix<T> {
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re * scale), T::lit(im * scale))
    })
}

/// Haar-distributed unitary.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix<T> {
    orthonormalize(&complex_gaussian::<T, R>(n, n, rng))
}

/// Eigen-decomposition of a 2×2 Hermitian matrix in closed form.
/// Returns eigenvalues in descending order and eigenvectors as columns.
/// When the off-diagonal entry vanishes the eigenvectors are basis vectors.
pub fn hermitian_eigen_2x2<T: Real>(h: &CMatrix<T>) -> ([T; 2], CMatrix<T>) {
    let a = h[(0, 0)].re;
    let d = h[(1, 1)].re;
    let b = (h[(0, 1)] + h[(1, 0)].conj()) * real(T::lit(0.5));
    let half = T::lit(0.5);
    let mean = (a + d) * half;
    let gap = ((a - d) * half).powi(2) + b.norm_sqr();
    let rad = gap.sqrt();
    let hi = mean + rad;
    let lo = mean - rad;
    let scale = abs(a).max(abs(d)).max(modulus(b)).max(T::min_value().unwrap_or(T::zero()));
    let mut v = CMatrix::zeros(2, 2);
    if modulus(b) <= T::default_epsilon() * scale {
        if a >= d {
            v[(0, 0)] = real(T::one());
            v[(1, 1)] = real(T::one());
        } else {
            v[(1, 0)] = real(T::one());
            v[(0, 1)] = real(T::one());
        }
        return ([a.max(d), a.min(d)], v);
    }
    for (j, lambda) in [hi, lo].into_iter().enumerate() {
        let u1 = CVector::from_vec(vec![b, real(lambda - a)]);
        let u2 = CVector::from_vec(vec![real(lambda - d), b.conj()]);
        let mut u = if vnorm(&u1) >= vnorm(&u2) { u1 } else { u2 };
        let nrm = vnorm(&u);
        u.unscale_mut(nrm);
        v.set_column(j, &u);
    }
    ([hi, lo], v)
}
