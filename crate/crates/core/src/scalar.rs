//! Scalar abstraction shared by every numeric routine in the crate.
//!
//! All state vectors, Hamiltonians and solvers are generic over a real
//! field `T`; amplitudes are `Complex<T>`. `f64` is the working precision
//! used by the acceptance suite, `f32` is supported for cheap exploratory runs
//! with tolerances widened automatically by [`tol`].

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar usable throughout the crate.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + std::fmt::LowerExp + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex amplitude over `T`.
pub type C<T> = Complex<T>;

/// Converts an `f64` literal into `T`.
#[inline]
pub fn real<T: Real>(x: f64) -> T {
    <T as FromPrimitive>::from_f64(x).expect("f64 literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Real>(x: T) -> f64 {
    ToPrimitive::to_f64(&x).expect("scalar convertible to f64")
}

/// A tolerance of `x` in working precision, never tighter than 256 ulps of `T`.
#[inline]
pub fn tol<T: Real>(x: f64) -> T {
    let floor = 256.0 * to_f64(T::default_epsilon());
    real(x.max(floor))
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub fn abs<T: Real>(x: T) -> T {
    if x < T::zero() {
        -x
    } else {
        x
    }
}

/// `|z|`.
#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    z.norm_sqr().sqrt()
}

/// `exp(i·phi)`.
#[inline]
pub fn cis<T: Real>(phi: T) -> C<T> {
    Complex::new(phi.cos(), phi.sin())
}
