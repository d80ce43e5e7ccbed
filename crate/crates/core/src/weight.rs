use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_traits::{ToPrimitive, Zero};

/// Scalar usable as a link weight and path cost.
///
/// Costs must be totally ordered so that the equal-cost criteria (ECMP, DWE)
/// are exact. Integers and exact rationals qualify; IEEE floats do not.
/// Every algorithm assumes strictly positive link weights.
pub trait Weight: Copy + Ord + Hash + Zero + ToPrimitive + Debug + Display + Send + Sync + 'static {
    /// Ratio `self / base` as a float, used for stretch reporting.
    fn ratio(self, base: Self) -> f64 {
        let num = self.to_f64().unwrap_or(f64::NAN);
        let den = base.to_f64().unwrap_or(f64::NAN);
        num / den
    }
}

impl<T> Weight for T where T: Copy + Ord + Hash + Zero + ToPrimitive + Debug + Display + Send + Sync + 'static {}
