//! Hamilton quaternions over a pluggable scalar regime, and the Hurwitz order.
//!
//! Multiplication is the (noncommutative) Hamilton product and is only ever
//! exposed in a fixed operand order: `a * b` means `a` on the left. Scaling by
//! a real number is spelled [`Quaternion::scale`], since real scalars are the
//! only ones that commute with everything.

mod hurwitz;
mod scalar;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

pub use hurwitz::{hurwitz_units, is_in_order, HurwitzElement};
pub(crate) use hurwitz::hamilton as hurwitz_hamilton;
pub use scalar::{rat, Rational, Scalar, Sign};

/// `x0 + x1 i + x2 j + x3 k`.
#[derive(Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Quaternion<T> {
    pub x0: T,
    pub x1: T,
    pub x2: T,
    pub x3: T,
}

/// Float quaternion.
pub type Quat = Quaternion<f64>;
/// Exact quaternion.
pub type QuatQ = Quaternion<Rational>;

impl<T: Scalar> Quaternion<T> {
    pub fn new(x0: T, x1: T, x2: T, x3: T) -> Self {
        Quaternion { x0, x1, x2, x3 }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn i() -> Self {
        Self::new(T::zero(), T::one(), T::zero(), T::zero())
    }

    pub fn j() -> Self {
        Self::new(T::zero(), T::zero(), T::one(), T::zero())
    }

    pub fn k() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::one())
    }

    pub fn real(x0: T) -> Self {
        Self::new(x0, T::zero(), T::zero(), T::zero())
    }

    /// Purely imaginary quaternion `x1 i + x2 j + x3 k`.
    pub fn imag(x1: T, x2: T, x3: T) -> Self {
        Self::new(T::zero(), x1, x2, x3)
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        Self::new(
            T::from_ratio(c[0], 1),
            T::from_ratio(c[1], 1),
            T::from_ratio(c[2], 1),
            T::from_ratio(c[3], 1),
        )
    }

    pub fn coords(&self) -> [&T; 4] {
        [&self.x0, &self.x1, &self.x2, &self.x3]
    }

    pub fn conj(&self) -> Self {
        Self::new(self.x0.clone(), -self.x1.clone(), -self.x2.clone(), -self.x3.clone())
    }

    /// Reduced trace `x + conj(x) = 2 x0`.
    pub fn trace(&self) -> T {
        self.x0.clone() + self.x0.clone()
    }

    /// Reduced norm `x conj(x)`.
    pub fn norm(&self) -> T {
        self.x0.clone() * self.x0.clone()
            + self.x1.clone() * self.x1.clone()
            + self.x2.clone() * self.x2.clone()
            + self.x3.clone() * self.x3.clone()
    }

    pub fn re(&self) -> T {
        self.x0.clone()
    }

    /// Imaginary part `(x - conj(x)) / 2`.
    pub fn im(&self) -> Self {
        Self::new(T::zero(), self.x1.clone(), self.x2.clone(), self.x3.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(
            self.x0.clone() * s.clone(),
            self.x1.clone() * s.clone(),
            self.x2.clone() * s.clone(),
            self.x3.clone() * s.clone(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.x0.is_zero() && self.x1.is_zero() && self.x2.is_zero() && self.x3.is_zero()
    }

    pub fn is_imaginary(&self) -> bool {
        self.x0.is_negligible(self.abs_f64())
    }

    /// `conj(x) / norm(x)`.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.norm();
        if n.is_zero() || (!T::EXACT && n.to_f64_lossy() == 0.0) {
            return Err(domain("inverse of the zero quaternion"));
        }
        let inv = T::one() / n;
        Ok(self.conj().scale(&inv))
    }

    /// Euclidean length `norm(x)^{1/2}` as a float.
    pub fn abs_f64(&self) -> f64 {
        self.norm().to_f64_lossy().sqrt()
    }

    pub fn to_f64(&self) -> Quat {
        Quaternion::new(
            self.x0.to_f64_lossy(),
            self.x1.to_f64_lossy(),
            self.x2.to_f64_lossy(),
            self.x3.to_f64_lossy(),
        )
    }
}

impl Quat {
    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x0, self.x1, self.x2, self.x3]
    }

    /// Exponential of a quaternion.
    pub fn exp(&self) -> Self {
        let v = self.im();
        let theta = v.abs_f64();
        let r = self.x0.exp();
        if theta < 1e-300 {
            return Quaternion::real(r);
        }
        let s = r * theta.sin() / theta;
        Quaternion::new(r * theta.cos(), v.x1 * s, v.x2 * s, v.x3 * s)
    }

    /// Max-norm distance between coordinate vectors.
    pub fn max_abs_diff(&self, other: &Quat) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl QuatQ {
    pub fn from_ratios(c: [(i64, i64); 4]) -> Self {
        Quaternion::new(
            rat(c[0].0, c[0].1),
            rat(c[1].0, c[1].1),
            rat(c[2].0, c[2].1),
            rat(c[3].0, c[3].1),
        )
    }
}

impl<'a, T: Scalar> Add<&'a Quaternion<T>> for &'a Quaternion<T> {
    type Output = Quaternion<T>;
    fn add(self, o: &'a Quaternion<T>) -> Quaternion<T> {
        Quaternion::new(
            self.x0.clone() + o.x0.clone(),
            self.x1.clone() + o.x1.clone(),
            self.x2.clone() + o.x2.clone(),
            self.x3.clone() + o.x3.clone(),
        )
    }
}

impl<'a, T: Scalar> Sub<&'a Quaternion<T>> for &'a Quaternion<T> {
    type Output = Quaternion<T>;
    fn sub(self, o: &'a Quaternion<T>) -> Quaternion<T> {
        Quaternion::new(
            self.x0.clone() - o.x0.clone(),
            self.x1.clone() - o.x1.clone(),
            self.x2.clone() - o.x2.clone(),
            self.x3.clone() - o.x3.clone(),
        )
    }
}

impl<'a, T: Scalar> Mul<&'a Quaternion<T>> for &'a Quaternion<T> {
    type Output = Quaternion<T>;
    fn mul(self, o: &'a Quaternion<T>) -> Quaternion<T> {
        let (a0, a1, a2, a3) = (&self.x0, &self.x1, &self.x2, &self.x3);
        let (b0, b1, b2, b3) = (&o.x0, &o.x1, &o.x2, &o.x3);
        let m = |x: &T, y: &T| x.clone() * y.clone();
        Quaternion::new(
            m(a0, b0) - m(a1, b1) - m(a2, b2) - m(a3, b3),
            m(a0, b1) + m(a1, b0) + m(a2, b3) - m(a3, b2),
            m(a0, b2) - m(a1, b3) + m(a2, b0) + m(a3, b1),
            m(a0, b3) + m(a1, b2) - m(a2, b1) + m(a3, b0),
        )
    }
}

impl<T: Scalar> Neg for &Quaternion<T> {
    type Output = Quaternion<T>;
    fn neg(self) -> Quaternion<T> {
        Quaternion::new(-self.x0.clone(), -self.x1.clone(), -self.x2.clone(), -self.x3.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr<Quaternion<T>> for Quaternion<T> {
            type Output = Quaternion<T>;
            fn $m(self, o: Quaternion<T>) -> Quaternion<T> {
                (&self).$m(&o)
            }
        }
        impl<'a, T: Scalar> $tr<&'a Quaternion<T>> for Quaternion<T> {
            type Output = Quaternion<T>;
            fn $m(self, o: &'a Quaternion<T>) -> Quaternion<T> {
                (&self).$m(o)
            }
        }
        impl<'a, T: Scalar> $tr<Quaternion<T>> for &'a Quaternion<T> {
            type Output = Quaternion<T>;
            fn $m(self, o: Quaternion<T>) -> Quaternion<T> {
                self.$m(&o)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<T: Scalar> Neg for Quaternion<T> {
    type Output = Quaternion<T>;
    fn neg(self) -> Quaternion<T> {
        -&self
    }
}

impl<T: Scalar> AddAssign<&Quaternion<T>> for Quaternion<T> {
    fn add_assign(&mut self, o: &Quaternion<T>) {
        *self = &*self + o;
    }
}

impl<T: Scalar + fmt::Display> fmt::Display for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + {}i + {}j + {}k)", self.x0, self.x1, self.x2, self.x3)
    }
}

impl<T: fmt::Debug> fmt::Debug for Quaternion<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}, {:?}, {:?}]", self.x0, self.x1, self.x2, self.x3)
    }
}
