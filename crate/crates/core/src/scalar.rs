//! Real scalar abstraction shared by the dense algebra, the Lindblad engine
//! and the channel-block-encoding code.

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display, LowerExp};

/// Floating point type the numerical core is generic over (`f32` or `f64`).
pub trait Real:
    'static
    + Copy
    + Send
    + Sync
    + Default
    + Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
{
    /// Machine epsilon of the underlying type, as `f64`.
    const EPSILON_F64: f64;

    fn from_f64_lossy(x: f64) -> Self;

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Converts an absolute tolerance stated for double precision into one
    /// that is attainable in this precision.
    fn tol(base: f64) -> Self {
        // 1e4 ulps of headroom for dense products of modest size
        Self::from_f64_lossy(base.max(Self::EPSILON_F64 * 1.0e4))
    }
}

impl Real for f32 {
    const EPSILON_F64: f64 = f32::EPSILON as f64;

    fn from_f64_lossy(x: f64) -> Self {
        x as f32
    }
}

impl Real for f64 {
    const EPSILON_F64: f64 = f64::EPSILON;

    fn from_f64_lossy(x: f64) -> Self {
        x
    }
}

/// Complex number over a [`Real`].
pub type Cx<T> = Complex<T>;

#[inline]
pub fn cx<T: Real>(re: f64, im: f64) -> Cx<T> {
    Complex::new(T::from_f64_lossy(re), T::from_f64_lossy(im))
}

#[inline]
pub fn real<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

/// `i^k` for `k` taken modulo 4.
#[inline]
pub fn i_pow<T: Real>(k: u8) -> Cx<T> {
    let (o, z) = (T::one(), T::zero());
    match k % 4 {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    }
}
