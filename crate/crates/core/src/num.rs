//! Scalar abstraction shared by every numerical routine.

use nalgebra as na;
use std::fmt;

pub use na::Complex;

pub type CMatrix<T> = na::DMatrix<Complex<T>>;
pub type CVector<T> = na::DVector<Complex<T>>;

/// Real floating-point type the simulator can run on.
pub trait Real:
    na::RealField + Copy + fmt::Debug + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
    fn lit(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn count(n: usize) -> Self;
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            #[inline]
            fn lit(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline]
            fn count(n: usize) -> Self {
                n as $t
            }
        }
    )*};
}

impl_real!(f32, f64);

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    <T as na::ComplexField>::abs(x)
}

#[inline]
pub fn modulus<T: Real>(z: Complex<T>) -> T {
    z.norm_sqr().sqrt()
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

pub fn factorial_real<T: Real>(n: usize) -> T {
    (1..=n).fold(T::one(), |acc, k| acc * T::count(k))
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs<T: Real>(m: &CMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, z| acc.max(modulus(*z)))
}
