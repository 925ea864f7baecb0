//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real scalar type: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand for the complex scalar over `R`.
pub type C<R> = Complex<R>;

#[inline]
pub(crate) fn czero<R: Real>() -> C<R> {
    C::new(R::zero(), R::zero())
}

#[inline]
pub(crate) fn cone<R: Real>() -> C<R> {
    C::new(R::one(), R::zero())
}

/// `e^{2πiθ}`.
#[inline]
pub fn unit_phase<R: Real>(theta: R) -> C<R> {
    let arg = R::TAU() * theta;
    C::new(arg.cos(), arg.sin())
}

/// Turn angle of `z` in `[0, 1)`, i.e. `arg(z) / 2π` reduced mod 1.
#[inline]
pub fn turns<R: Real>(z: C<R>) -> R {
    let t = z.im.atan2(z.re) / R::TAU();
    if t < R::zero() {
        t + R::one()
    } else {
        t
    }
}

#[inline]
pub(crate) fn is_finite_c<R: Real>(z: C<R>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
