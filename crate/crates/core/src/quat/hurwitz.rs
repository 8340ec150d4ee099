use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{Quaternion, QuatQ, Rational, Scalar};
use crate::error::{domain, Result};

/// Element of the Hurwitz order `Z<1, i, j, (1+i+j+k)/2>`, stored as
/// doubled numerators: the quaternion is `(n0 + n1 i + n2 j + n3 k) / 2`
/// with `n0 ≡ n1 ≡ n2 ≡ n3 (mod 2)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HurwitzElement {
    n: [i64; 4],
}

impl HurwitzElement {
    pub const ZERO: HurwitzElement = HurwitzElement { n: [0; 4] };
    pub const ONE: HurwitzElement = HurwitzElement { n: [2, 0, 0, 0] };
    pub const I: HurwitzElement = HurwitzElement { n: [0, 2, 0, 0] };
    pub const J: HurwitzElement = HurwitzElement { n: [0, 0, 2, 0] };
    pub const K: HurwitzElement = HurwitzElement { n: [0, 0, 0, 2] };
    /// `(1 + i + j + k) / 2`.
    pub const OMEGA: HurwitzElement = HurwitzElement { n: [1, 1, 1, 1] };

    /// From doubled numerators; rejects mixed parity.
    pub fn from_doubled(n: [i64; 4]) -> Result<Self> {
        let p = n[0].rem_euclid(2);
        if n.iter().any(|&c| c.rem_euclid(2) != p) {
            return Err(domain(format!("doubled numerators {n:?} have mixed parity")));
        }
        Ok(HurwitzElement { n })
    }

    /// Lipschitz (all-integer) element.
    pub fn from_integers(a: [i64; 4]) -> Self {
        HurwitzElement { n: [2 * a[0], 2 * a[1], 2 * a[2], 2 * a[3]] }
    }

    pub fn from_int(a: i64) -> Self {
        Self::from_integers([a, 0, 0, 0])
    }

    /// Converts an exact quaternion, failing if it is not in the order.
    pub fn try_from_quat(x: &QuatQ) -> Result<Self> {
        let mut n = [0i64; 4];
        for (slot, c) in n.iter_mut().zip(x.coords()) {
            let d = c * Rational::from_integer(BigInt::from(2));
            if !d.is_integer() {
                return Err(domain("coordinate not in (1/2)Z"));
            }
            *slot = d.to_integer().to_i64().ok_or_else(|| domain("coordinate overflow"))?;
        }
        Self::from_doubled(n)
    }

    pub fn doubled(&self) -> [i64; 4] {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.n == [0; 4]
    }

    /// Whether all coordinates are half-odd-integers.
    pub fn is_half_integral(&self) -> bool {
        self.n[0].rem_euclid(2) == 1
    }

    pub fn conj(&self) -> Self {
        HurwitzElement { n: [self.n[0], -self.n[1], -self.n[2], -self.n[3]] }
    }

    /// Reduced norm; always a rational integer.
    pub fn norm(&self) -> i64 {
        let s: i64 = self.n.iter().map(|c| c * c).sum();
        debug_assert_eq!(s % 4, 0);
        s / 4
    }

    /// Reduced trace `2 x0`; always a rational integer.
    pub fn trace(&self) -> i64 {
        self.n[0]
    }

    pub fn is_unit(&self) -> bool {
        self.norm() == 1
    }

    /// Inverse of a unit (`conj`); `None` otherwise.
    pub fn unit_inverse(&self) -> Option<Self> {
        self.is_unit().then(|| self.conj())
    }

    pub fn to_quat<T: Scalar>(&self) -> Quaternion<T> {
        Quaternion::new(
            T::from_ratio(self.n[0], 2),
            T::from_ratio(self.n[1], 2),
            T::from_ratio(self.n[2], 2),
            T::from_ratio(self.n[3], 2),
        )
    }
}

/// Raw product of two integer 4-vectors under the Hamilton rules.
#[inline]
pub(crate) fn hamilton(a: &[i64; 4], b: &[i64; 4]) -> [i64; 4] {
    [
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    ]
}

impl Mul for HurwitzElement {
    type Output = HurwitzElement;
    #[inline]
    fn mul(self, o: HurwitzElement) -> HurwitzElement {
        let p = hamilton(&self.n, &o.n);
        debug_assert!(p.iter().all(|c| c % 2 == 0), "Hurwitz order not closed: {p:?}");
        HurwitzElement { n: [p[0] / 2, p[1] / 2, p[2] / 2, p[3] / 2] }
    }
}

impl Add for HurwitzElement {
    type Output = HurwitzElement;
    #[inline]
    fn add(self, o: HurwitzElement) -> HurwitzElement {
        HurwitzElement {
            n: [self.n[0] + o.n[0], self.n[1] + o.n[1], self.n[2] + o.n[2], self.n[3] + o.n[3]],
        }
    }
}

impl Sub for HurwitzElement {
    type Output = HurwitzElement;
    #[inline]
    fn sub(self, o: HurwitzElement) -> HurwitzElement {
        self + (-o)
    }
}

impl Neg for HurwitzElement {
    type Output = HurwitzElement;
    #[inline]
    fn neg(self) -> HurwitzElement {
        HurwitzElement { n: [-self.n[0], -self.n[1], -self.n[2], -self.n[3]] }
    }
}

impl fmt::Debug for HurwitzElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "H{:?}/2", self.n)
    }
}

impl fmt::Display for HurwitzElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_quat::<Rational>(), f)
    }
}

/// The 24 units of the Hurwitz order: `±1, ±i, ±j, ±k, (±1±i±j±k)/2`.
pub fn hurwitz_units() -> Vec<HurwitzElement> {
    let mut units = Vec::with_capacity(24);
    for axis in 0..4 {
        for s in [2i64, -2] {
            let mut n = [0; 4];
            n[axis] = s;
            units.push(HurwitzElement { n });
        }
    }
    for mask in 0..16u32 {
        let sign = |b: u32| if mask & (1 << b) == 0 { 1 } else { -1 };
        units.push(HurwitzElement { n: [sign(0), sign(1), sign(2), sign(3)] });
    }
    units
}

/// Membership in the Hurwitz order: `2x` integral with coordinates of equal parity.
pub fn is_in_order(x: &QuatQ) -> bool {
    let two = Rational::from_integer(BigInt::from(2));
    let mut parity = None;
    for c in x.coords() {
        let d = c * &two;
        if !d.is_integer() {
            return false;
        }
        let p = d.to_integer() % BigInt::from(2);
        let p = if p.is_zero() { 0 } else { 1 };
        match parity {
            None => parity = Some(p),
            Some(q) if q != p => return false,
            _ => {}
        }
    }
    true
}

impl One for HurwitzElement {
    fn one() -> Self {
        HurwitzElement::ONE
    }
}
