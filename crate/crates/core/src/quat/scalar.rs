use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Sign of a real scalar, with a tolerance band around zero for floats.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

/// Scalar field underlying [`Quaternion`](super::Quaternion).
///
/// Two regimes are provided: [`Rational`] (exact, every identity holds with
/// zero residual) and `f64` (metric computations, tolerances apply).
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync
{
    /// `true` for the exact regime.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Absolute tolerance used when this regime compares against zero,
    /// for a quantity of magnitude `scale`.
    fn tolerance(scale: f64) -> f64;

    fn sign_tol(&self, scale: f64) -> Sign {
        let tol = Self::tolerance(scale);
        let v = self.to_f64_lossy();
        if Self::EXACT {
            if self.is_zero() {
                Sign::Zero
            } else if self.is_positive() {
                Sign::Positive
            } else {
                Sign::Negative
            }
        } else if v.abs() <= tol {
            Sign::Zero
        } else if v > 0.0 {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }

    fn is_negligible(&self, scale: f64) -> bool {
        self.sign_tol(scale) == Sign::Zero
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    fn tolerance(scale: f64) -> f64 {
        1e-12 * scale.max(1.0)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn tolerance(_scale: f64) -> f64 {
        0.0
    }
}

/// Exact rational from a numerator/denominator pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}
