//! Scalar abstractions shared by the numeric modules.
//!
//! Metric and baseline math is written once against [`Real`] and instantiated
//! for `f32` and `f64`. The random-selection probability additionally runs on
//! [`ProbScalar`], which also admits exact rationals.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num};

/// Floating-point scalar used by metrics, envelopes and resampling.
pub trait Real: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from an integer count.
    fn count(n: u64) -> Self {
        Self::from_u64(n).expect("count representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Scalar in which a ratio of two counts can be formed, exactly or rounded.
pub trait ProbScalar: Num + Clone + PartialOrd + Debug {
    fn ratio(num: u64, den: u64) -> Self;
}

impl ProbScalar for f32 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f32 / den as f32
    }
}

impl ProbScalar for f64 {
    fn ratio(num: u64, den: u64) -> Self {
        num as f64 / den as f64
    }
}

impl ProbScalar for BigRational {
    fn ratio(num: u64, den: u64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
}

/// Linear-interpolation quantile of an ascending slice (`q` in `[0, 1]`).
///
/// Position `h = (n - 1) q`; the result interpolates between the two
/// neighbouring order statistics.
pub fn quantile_sorted<T: Real>(sorted: &[T], q: T) -> Option<T> {
    if sorted.is_empty() {
        return None;
    }
    let last = sorted.len() - 1;
    let h = T::count(last as u64) * q;
    let lo = h.floor().to_usize().unwrap_or(0).min(last);
    let hi = (lo + 1).min(last);
    let frac = h - T::count(lo as u64);
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * frac)
}

/// Median with the two-middle-values-averaged convention for even lengths.
pub fn median_sorted<T: Real>(sorted: &[T]) -> Option<T> {
    quantile_sorted(sorted, T::lit(0.5))
}

pub fn mean<T: Real>(values: &[T]) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
    Some(sum / T::count(values.len() as u64))
}

/// Sorts a vector of non-NaN reals ascending.
pub fn sort_reals<T: Real>(values: &mut [T]) {
    values.sort_by(|a, b| a.partial_cmp(b).expect("NaN in sorted values"));
}
