use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};
use rustfft::FftNum;

/// floating point scalar used by the numeric modules: f32 or f64
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + FftNum + Debug + Display + Default + Send + Sync
{
}

impl Real for f32 {}
impl Real for f64 {}

/// literal conversion; every `Real` can represent an f64 approximately
#[inline]
pub(crate) fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).unwrap()
}

#[inline]
pub(crate) fn two_pi<T: Real>() -> T {
    T::TAU()
}

#[inline]
pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap()
}
