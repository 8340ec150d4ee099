//! Exact canonical forms of finite chains modulo the integral stabiliser of
//! `∞`: Hurwitz translations and unit rotations.

use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::chain::Chain;
use crate::error::{domain, Result};
use crate::heis::HeisPoint;
use crate::hermitian::{HVector, ProjectivePoint};
use crate::quat::{hurwitz_units, HurwitzElement, QuatQ, Rational};
use crate::siegel::BoundaryPoint;

/// A polar point with entries in the Hurwitz order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IntPolar {
    pub z: [HurwitzElement; 3],
}

impl IntPolar {
    pub fn new(z0: HurwitzElement, z: HurwitzElement, z2: HurwitzElement) -> Self {
        IntPolar { z: [z0, z, z2] }
    }

    /// The polar `[0 : 1 : 0]` of the standard vertical chain.
    pub fn seed() -> Self {
        IntPolar::new(HurwitzElement::ZERO, HurwitzElement::ONE, HurwitzElement::ZERO)
    }

    /// `q = -tr(conj(z0) z2) + n(z)`.
    pub fn q(&self) -> i64 {
        -(self.z[0].conj() * self.z[2]).trace() + self.z[1].norm()
    }

    /// `n(z2)`; the squared radius of the chain is `q / n(z2)`.
    pub fn norm_z2(&self) -> i64 {
        self.z[2].norm()
    }

    pub fn to_projective(&self) -> ProjectivePoint<Rational> {
        let [a, b, c] = self.z.map(|x| x.to_quat::<Rational>());
        ProjectivePoint::new(HVector::new(a, b, c)).expect("nonzero")
    }

    pub fn to_chain(&self) -> Result<Chain<Rational>> {
        crate::chain::chain_from_polar(&self.to_projective())
    }

    /// 12 doubled numerators, `z0` first.
    pub fn doubled(&self) -> [i64; 12] {
        let mut out = [0; 12];
        for (k, x) in self.z.iter().enumerate() {
            out[4 * k..4 * k + 4].copy_from_slice(&x.doubled());
        }
        out
    }

    pub fn from_doubled(n: &[i64; 12]) -> Result<Self> {
        let part = |k: usize| HurwitzElement::from_doubled([n[4 * k], n[4 * k + 1], n[4 * k + 2], n[4 * k + 3]]);
        Ok(IntPolar { z: [part(0)?, part(1)?, part(2)?] })
    }

    /// Center numerators `(doubled(z conj z2), 2 Im(z0 conj z2))`: the center is
    /// `(ζ, u) = (first / (2N), second / N)` with `N = n(z2)`.
    pub(crate) fn center_numerators(&self) -> ([i64; 4], [i64; 3]) {
        let zc = self.z[2].conj();
        let zeta = (self.z[1] * zc).doubled();
        let w = (self.z[0] * zc).doubled();
        (zeta, [w[1], w[2], w[3]])
    }
}

/// Canonical form of a finite chain modulo translations by the Hurwitz
/// Heisenberg lattice and the 288 integral rotations.
///
/// With `D` the least positive integer such that `D ζ ∈ O` and `D u ∈ Z³`
/// (a class invariant), `zeta` holds the coordinates of the reduced `ζ` in
/// the basis `1, i, j, ω` as numerators over `2D` in `[0, 2D)`, and `u` holds
/// the reduced vertical coordinate as numerators over `D` in `[0, 2D)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassKey {
    /// Squared radius as a reduced fraction `(num, den)`.
    pub radius_sq: (i64, i64),
    pub den: i64,
    pub zeta: [i64; 4],
    pub u: [i64; 3],
}

impl ClassKey {
    /// Cygan diameter `2R`.
    pub fn diameter(&self) -> f64 {
        2.0 * (self.radius_sq.0 as f64 / self.radius_sq.1 as f64).sqrt()
    }

    /// The reduced center as a point of `[0,1)⁷`: basis coordinates of `ζ`
    /// and `u / 2`.
    pub fn unit_cube_coords(&self) -> [f64; 7] {
        let d2 = (2 * self.den) as f64;
        let mut out = [0.0; 7];
        for k in 0..4 {
            out[k] = self.zeta[k] as f64 / d2;
        }
        for k in 0..3 {
            out[4 + k] = self.u[k] as f64 / d2;
        }
        out
    }

    /// The reduced center as an exact Heisenberg point.
    pub fn center(&self) -> HeisPoint<Rational> {
        let c = |n: i64, d: i64| Rational::new(n.into(), d.into());
        let d2 = 2 * self.den;
        let [a, b, cc, d] = self.zeta;
        // ζ = a + b i + c j + d ω over 2D.
        let zeta = QuatQ::new(
            c(2 * a + d, 2 * d2),
            c(2 * b + d, 2 * d2),
            c(2 * cc + d, 2 * d2),
            c(d, 2 * d2),
        );
        let u = QuatQ::new(c(0, 1), c(self.u[0], self.den), c(self.u[1], self.den), c(self.u[2], self.den));
        HeisPoint { zeta, u }
    }

    /// All distinct reduced centers in the orbit of this class under the
    /// integral rotations, as points of `[0,1)⁷`.
    pub fn rotated_unit_cube_coords(&self) -> Vec<[f64; 7]> {
        let (zn, un) = self.raw_numerators();
        let mut reps: Vec<([i64; 4], [i64; 3])> =
            rotations().iter().map(|r| reduce(&r.apply_zeta(&zn), &r.apply_u(&un), self.den)).collect();
        reps.sort_unstable();
        reps.dedup();
        let d2 = (2 * self.den) as f64;
        reps.iter()
            .map(|(z, u)| {
                let mut out = [0.0; 7];
                for k in 0..4 {
                    out[k] = z[k] as f64 / d2;
                }
                for k in 0..3 {
                    out[4 + k] = u[k] as f64 / d2;
                }
                out
            })
            .collect()
    }

    /// Doubled `D ζ` and `D u` numerators of the reduced center.
    fn raw_numerators(&self) -> ([i64; 4], [i64; 3]) {
        let [a, b, c, d] = self.zeta;
        let h = d / 2;
        ([a + h, b + h, c + h, h], self.u)
    }
}

/// An integral rotation `(ζ, u) ↦ (U ζ μ⁻¹, μ u μ⁻¹)` as integer matrices
/// on doubled numerators (`zeta` scaled by 4) and on `Im H` (signed permutation).
#[derive(Clone, Debug)]
pub struct IntRotation {
    pub big_u: HurwitzElement,
    pub mu: HurwitzElement,
    zeta: [[i64; 4]; 4],
    u: [[i64; 3]; 3],
    /// Rows giving twice the basis coordinates `a, b, c, d` of the image.
    basis_rows: [[i64; 4]; 4],
}

impl IntRotation {
    fn new(big_u: HurwitzElement, mu: HurwitzElement) -> Self {
        let basis = [HurwitzElement::ONE, HurwitzElement::I, HurwitzElement::J, HurwitzElement::K];
        let mut zeta = [[0; 4]; 4];
        let mut u = [[0; 3]; 3];
        for (c, e) in basis.iter().enumerate() {
            // Image of the doubled basis vector 2e, kept at doubled scale ×2.
            let img = crate::quat::hurwitz_hamilton(&big_u.doubled(), &crate::quat::hurwitz_hamilton(&e.doubled(), &mu.conj().doubled()));
            for r in 0..4 {
                zeta[r][c] = img[r] / 4;
            }
            if c > 0 {
                let img = crate::quat::hurwitz_hamilton(&mu.doubled(), &crate::quat::hurwitz_hamilton(&e.doubled(), &mu.conj().doubled()));
                for r in 1..4 {
                    u[r - 1][c - 1] = img[r] / 8;
                }
            }
        }
        let basis_rows = std::array::from_fn(|k| {
            std::array::from_fn(|c| if k < 3 { zeta[k][c] - zeta[3][c] } else { 2 * zeta[3][c] })
        });
        IntRotation { big_u, mu, zeta, u, basis_rows }
    }

    /// Applies the rotation to doubled numerators; the result is scaled by 2
    /// relative to the input, so callers divide by 2.
    #[inline]
    fn apply_zeta(&self, z: &[i64; 4]) -> [i64; 4] {
        let m = &self.zeta;
        std::array::from_fn(|r| (m[r][0] * z[0] + m[r][1] * z[1] + m[r][2] * z[2] + m[r][3] * z[3]) / 2)
    }

    #[inline]
    fn apply_u(&self, u: &[i64; 3]) -> [i64; 3] {
        let m = &self.u;
        std::array::from_fn(|r| m[r][0] * u[0] + m[r][1] * u[1] + m[r][2] * u[2])
    }
}

/// The 288 distinct integral rotations (pairs `(U, μ)` of Hurwitz units
/// modulo the common sign).
pub fn rotations() -> &'static [IntRotation] {
    static ROT: OnceLock<Vec<IntRotation>> = OnceLock::new();
    ROT.get_or_init(|| {
        let units = hurwitz_units();
        let mut out = Vec::with_capacity(288);
        for &u in &units {
            for &m in &units {
                if (-u, -m) < (u, m) {
                    continue;
                }
                out.push(IntRotation::new(u, m));
            }
        }
        out
    })
}

/// Reduces the center `(zn / (2D), un / D)` (with `D zeta ∈ O`, `D u ∈ Z³`)
/// modulo lattice translations; returns `(basis numerators, u numerators)`.
#[inline]
fn reduce(zn: &[i64; 4], un: &[i64; 3], den: i64) -> ([i64; 4], [i64; 3]) {
    let d2 = 2 * den;
    let coords = [zn[0] - zn[3], zn[1] - zn[3], zn[2] - zn[3], 2 * zn[3]];
    let mut red = [0i64; 4];
    let mut shift = [0i64; 4];
    for k in 0..4 {
        shift[k] = coords[k].div_euclid(d2);
        red[k] = coords[k] - shift[k] * d2;
    }
    // Lattice element ζt = fa + fb i + fc j + fd ω as doubled numerators.
    let t = [2 * shift[0] + shift[3], 2 * shift[1] + shift[3], 2 * shift[2] + shift[3], shift[3]];
    // Translating by -ζt adds -2 Im(conj(ζt) ζ) and a vertical part of parity n(ζt).
    let h = crate::quat::hurwitz_hamilton(&[t[0], -t[1], -t[2], -t[3]], zn);
    let parity = (t.iter().map(|x| x * x).sum::<i64>() / 4).rem_euclid(2);
    let mut u = [0i64; 3];
    for k in 0..3 {
        debug_assert_eq!(h[k + 1] % 2, 0);
        u[k] = (un[k] - h[k + 1] / 2 + parity * den).rem_euclid(d2);
    }
    (red, u)
}

/// Least `D > 0` dividing `base` with `D ζ ∈ O` and `D u ∈ Z³`, where
/// `ζ = zn / (2 base)` and `u = un / base`; returns `(D, zn', un')` rescaled.
fn minimal_denominator(zn: &[i64; 4], un: &[i64; 3], base: i64) -> (i64, [i64; 4], [i64; 3]) {
    let mut g = base;
    for &x in zn.iter().chain(un.iter()) {
        g = g.gcd(&x);
    }
    let d0 = base / g;
    let rest = base / d0;
    for k in (1..=rest).filter(|k| rest % k == 0) {
        let d = d0 * k;
        // D ζ has doubled numerators zn·D/base; they must share a parity.
        let z: [i64; 4] = zn.map(|x| x * d / base);
        let p = z[0].rem_euclid(2);
        if z.iter().all(|x| x.rem_euclid(2) == p) {
            return (d, z, un.map(|x| x * d / base));
        }
    }
    unreachable!("base itself is admissible")
}

/// `v mod m` in `[0, m)` via a float quotient with exact correction; valid
/// while `|v|` is far below `2^52`.
#[inline]
fn fast_mod(v: i64, m: i64, inv: f64) -> i64 {
    let r = v - (v as f64 * inv).floor() as i64 * m;
    if r < 0 {
        r + m
    } else if r >= m {
        r - m
    } else {
        r
    }
}

fn canonical_from_numerators(zn: &[i64; 4], un: &[i64; 3], base: i64, radius_sq: (i64, i64)) -> ClassKey {
    let (den, zn, un) = minimal_denominator(zn, un, base);
    let d2 = 2 * den;
    let inv = 1.0 / d2 as f64;
    let rots = rotations();
    // Lexicographic minimum, one basis coordinate at a time over the
    // surviving rotations; the vertical part is computed only for ties.
    let mut cand: [u16; 288] = std::array::from_fn(|i| i as u16);
    let mut len = rots.len();
    let mut zeta = [0i64; 4];
    for k in 0..4 {
        let mut best = i64::MAX;
        let mut kept = 0;
        for idx in 0..len {
            let r = cand[idx];
            let row = &rots[r as usize].basis_rows[k];
            let v = fast_mod((row[0] * zn[0] + row[1] * zn[1] + row[2] * zn[2] + row[3] * zn[3]) >> 1, d2, inv);
            if v < best {
                best = v;
                kept = 0;
            }
            if v == best {
                cand[kept] = r;
                kept += 1;
            }
        }
        len = kept;
        zeta[k] = best;
    }
    let u = cand[..len]
        .iter()
        .map(|&r| {
            let r = &rots[r as usize];
            let (z, u) = reduce(&r.apply_zeta(&zn), &r.apply_u(&un), den);
            debug_assert_eq!(z, zeta);
            u
        })
        .min()
        .expect("nonempty rotation group");
    ClassKey { radius_sq, den, zeta, u }
}

/// Canonical key of the finite chain with the given integral polar.
pub fn canonical_key(p: &IntPolar) -> Result<ClassKey> {
    let n = p.norm_z2();
    if n == 0 {
        return Err(domain("vertical chains have no finite class"));
    }
    let q = p.q();
    if q <= 0 {
        return Err(domain("polar point must be positive"));
    }
    let g = q.gcd(&n);
    let (zn, un) = p.center_numerators();
    Ok(canonical_from_numerators(&zn, &un, n, (q / g, n / g)))
}

fn to_i64(r: &num_bigint::BigInt) -> Result<i64> {
    r.to_i64().ok_or_else(|| domain("coordinate exceeds the 64-bit range"))
}

/// Canonical key of an arbitrary finite chain with exact rational data.
pub fn canonical_class(c: &Chain<Rational>) -> Result<ClassKey> {
    let BoundaryPoint::Finite(center) = c.center() else {
        return Err(domain("vertical chains have no finite class"));
    };
    let r2 = c.radius_sq().expect("finite chain");
    let coords = [&center.zeta.x0, &center.zeta.x1, &center.zeta.x2, &center.zeta.x3, &center.u.x1, &center.u.x2, &center.u.x3];
    let mut base = num_bigint::BigInt::one();
    for x in coords {
        base = base.lcm(x.denom());
    }
    // Doubling the ζ numerators keeps them over 2·base.
    let base_i = to_i64(&base)?;
    let b = Rational::from_integer(base.clone());
    let two = Rational::from_integer(2.into());
    let z = [&center.zeta.x0, &center.zeta.x1, &center.zeta.x2, &center.zeta.x3];
    let mut zn = [0i64; 4];
    for (k, x) in z.iter().enumerate() {
        zn[k] = to_i64(&(*x * &b * &two).to_integer())?;
    }
    let mut un = [0i64; 3];
    for (k, x) in [&center.u.x1, &center.u.x2, &center.u.x3].iter().enumerate() {
        un[k] = to_i64(&(*x * &b).to_integer())?;
    }
    // base·ζ may be non-integral in O only through parity; double the base then.
    let (zn, un, base_i) = if zn.iter().all(|x| x.rem_euclid(2) == zn[0].rem_euclid(2)) {
        (zn, un, base_i)
    } else {
        (zn.map(|x| 2 * x), un.map(|x| 2 * x), 2 * base_i)
    };
    if r2.is_zero() || r2.is_negative() {
        return Err(domain("radius must be positive"));
    }
    let radius_sq = (to_i64(r2.numer())?, to_i64(r2.denom())?);
    Ok(canonical_from_numerators(&zn, &un, base_i, radius_sq))
}
