use std::fmt::Debug;

use num_traits::{Float, FromPrimitive, Num, Signed, ToPrimitive};

/// Scalars the modulating-chain algebra runs over.
///
/// Gaussian elimination, the Poisson system and the `U`/`V` sums only need
/// field operations and an order, so exact types (`Ratio<i64>`) work as well as
/// `f32`/`f64`.
pub trait Field: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive {
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index fits the scalar type")
    }

    /// Tolerance literal. Types that cannot represent it get an exact zero.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).unwrap_or_else(Self::zero)
    }

    /// For diagnostics and error payloads only.
    fn approx_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Field for T where T: Clone + Debug + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive {}

/// Floating-point scalars: everything in [`Field`] plus powers and logs.
pub trait Real: Field + Float + Copy + Send + Sync + 'static {}

impl Real for f32 {}
impl Real for f64 {}

pub(crate) fn max_abs<T: Field>(values: impl IntoIterator<Item = T>) -> T {
    values
        .into_iter()
        .map(|v| v.abs())
        .fold(T::zero(), |acc, v| if v > acc { v } else { acc })
}
