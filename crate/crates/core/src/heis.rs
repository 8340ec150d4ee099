//! The quaternionic Heisenberg group `Heis₇ = H × Im H`, the boundary of the
//! Siegel domain minus `∞`, with its Cygan gauges, isometries and the
//! integral lattice `Heis₇ ∩ (O × O)`.

use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Error, Result};
use crate::hermitian::{bq_element, ProjectivePoint, UnitaryElement};
use crate::quat::{rat, QuatQ, Quaternion, Rational, Scalar};

/// A point `(ζ, u)` of the Heisenberg group, `ζ ∈ H`, `u ∈ Im H`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisPoint<T> {
    pub zeta: Quaternion<T>,
    pub u: Quaternion<T>,
}

impl<T: Scalar> HeisPoint<T> {
    pub fn new(zeta: Quaternion<T>, u: Quaternion<T>) -> Result<Self> {
        if !u.is_imaginary() {
            return Err(domain("vertical coordinate must be purely imaginary"));
        }
        Ok(HeisPoint { zeta, u })
    }

    pub fn identity() -> Self {
        HeisPoint { zeta: Quaternion::zero(), u: Quaternion::zero() }
    }

    /// Central element `(0, u)`.
    pub fn vertical(u: Quaternion<T>) -> Result<Self> {
        Self::new(Quaternion::zero(), u)
    }

    /// Horizontal element `(ζ, 0)`.
    pub fn horizontal(zeta: Quaternion<T>) -> Self {
        HeisPoint { zeta, u: Quaternion::zero() }
    }

    pub fn to_f64(&self) -> HeisPoint<f64> {
        HeisPoint { zeta: self.zeta.to_f64(), u: self.u.to_f64() }
    }

    /// `(ζ0..ζ3, u1..u3)`.
    pub fn coords_f64(&self) -> [f64; 7] {
        let z = self.zeta.to_f64();
        let u = self.u.to_f64();
        [z.x0, z.x1, z.x2, z.x3, u.x1, u.x2, u.x3]
    }

    /// The isotropic projective point `[w0 : w : 1]`.
    pub fn to_projective(&self) -> ProjectivePoint<T> {
        let (w0, w) = coords_w(self);
        ProjectivePoint::from_siegel(w0, w)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coords_f64()
            .iter()
            .zip(other.coords_f64())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl HeisPoint<f64> {
    pub fn from_coords(c: [f64; 7]) -> Self {
        HeisPoint {
            zeta: Quaternion::new(c[0], c[1], c[2], c[3]),
            u: Quaternion::imag(c[4], c[5], c[6]),
        }
    }
}

/// `(ζ, u)(ζ', u') = (ζ + ζ', u + u' + 2 Im(conj(ζ) ζ'))`.
pub fn heis_mul<T: Scalar>(a: &HeisPoint<T>, b: &HeisPoint<T>) -> HeisPoint<T> {
    let twist = (&a.zeta.conj() * &b.zeta).im();
    let u = &(&a.u + &b.u) + &(&twist + &twist);
    HeisPoint { zeta: &a.zeta + &b.zeta, u }
}

/// `(ζ, u)⁻¹ = (-ζ, -u)`.
pub fn heis_inv<T: Scalar>(a: &HeisPoint<T>) -> HeisPoint<T> {
    HeisPoint { zeta: -&a.zeta, u: -&a.u }
}

/// `(w0, w) = ((n(ζ) + u) / 2, ζ)`.
pub fn coords_w<T: Scalar>(p: &HeisPoint<T>) -> (Quaternion<T>, Quaternion<T>) {
    let w0 = (&Quaternion::real(p.zeta.norm()) + &p.u).scale(&T::half());
    (w0, p.zeta.clone())
}

/// Inverse of [`coords_w`]; requires `tr(w0) = n(w)`.
pub fn coords_zeta<T: Scalar>(w0: &Quaternion<T>, w: &Quaternion<T>) -> Result<HeisPoint<T>> {
    let scale = w0.abs_f64() + w.norm().to_f64_lossy();
    if !(w0.trace() - w.norm()).is_negligible(scale) {
        return Err(domain("boundary point must satisfy tr(w0) = n(w)"));
    }
    let u = w0.im();
    Ok(HeisPoint { zeta: w.clone(), u: &u + &u })
}

/// Reads a finite boundary point off an isotropic projective point.
pub fn from_projective<T: Scalar>(p: &ProjectivePoint<T>) -> Result<HeisPoint<T>> {
    let (w0, w) = p.siegel_coords()?;
    coords_zeta(&w0, &w)
}

/// `Π_v(ζ, u) = ζ`.
pub fn vertical_projection<T: Scalar>(p: &HeisPoint<T>) -> Quaternion<T> {
    p.zeta.clone()
}

fn gauge_parts<T: Scalar>(p: &HeisPoint<T>) -> (f64, f64) {
    let nz = p.zeta.norm().to_f64_lossy();
    (nz * nz + p.u.norm().to_f64_lossy(), nz)
}

/// Cygan gauge `(n(ζ)² + n(u))^{1/4}` of a point.
pub fn cygan_gauge<T: Scalar>(p: &HeisPoint<T>) -> f64 {
    gauge_parts(p).0.sqrt().sqrt()
}

/// Modified Cygan gauge `A^{1/2} / (A^{1/2} + n(ζ))^{1/2}` with `A = n(ζ)² + n(u)`.
pub fn mod_cygan_gauge<T: Scalar>(p: &HeisPoint<T>) -> f64 {
    let (a, nz) = gauge_parts(p);
    let sa = a.sqrt();
    if sa == 0.0 {
        return 0.0;
    }
    sa / (sa + nz).sqrt()
}

/// Left-invariant Cygan distance.
pub fn cygan_dist<T: Scalar>(a: &HeisPoint<T>, b: &HeisPoint<T>) -> f64 {
    cygan_gauge(&heis_mul(&heis_inv(a), b))
}

/// Left-invariant modified Cygan distance (symmetric, not a metric).
pub fn mod_cygan_dist<T: Scalar>(a: &HeisPoint<T>, b: &HeisPoint<T>) -> f64 {
    mod_cygan_gauge(&heis_mul(&heis_inv(a), b))
}

/// Isometries and similarities of the Heisenberg group fixing `∞`.
#[derive(Clone, Debug, PartialEq)]
pub enum HeisMap<T> {
    /// Left translation by a group element.
    Translation(HeisPoint<T>),
    /// `(ζ, u) ↦ (U ζ μ⁻¹, μ u μ⁻¹)` for unit quaternions `U`, `μ`.
    Rotation { big_u: Quaternion<T>, mu: Quaternion<T> },
    /// `(ζ, u) ↦ (λ ζ, λ² u)`.
    Dilation(T),
}

impl<T: Scalar> HeisMap<T> {
    pub fn translation(t: HeisPoint<T>) -> Self {
        HeisMap::Translation(t)
    }

    pub fn rotation(big_u: Quaternion<T>, mu: Quaternion<T>) -> Result<Self> {
        for x in [&big_u, &mu] {
            if !(x.norm() - T::one()).is_negligible(1.0) {
                return Err(contract("rotation parameters must be unit quaternions"));
            }
        }
        Ok(HeisMap::Rotation { big_u, mu })
    }

    pub fn dilation(lambda: T) -> Result<Self> {
        if !lambda.is_positive() {
            return Err(contract("dilation factor must be positive"));
        }
        Ok(HeisMap::Dilation(lambda))
    }

    pub fn apply(&self, p: &HeisPoint<T>) -> HeisPoint<T> {
        match self {
            HeisMap::Translation(t) => heis_mul(t, p),
            HeisMap::Rotation { big_u, mu } => {
                let mu_inv = mu.conj();
                HeisPoint {
                    zeta: &(big_u * &p.zeta) * &mu_inv,
                    u: &(mu * &p.u) * &mu_inv,
                }
            }
            HeisMap::Dilation(l) => HeisPoint {
                zeta: p.zeta.scale(l),
                u: p.u.scale(&(l.clone() * l.clone())),
            },
        }
    }

    /// Metric ratio: 1 for translations and rotations, `λ` for dilations.
    pub fn ratio(&self) -> T {
        match self {
            HeisMap::Dilation(l) => l.clone(),
            _ => T::one(),
        }
    }

    /// The matrix of the map as an element of the stabiliser of `∞` in `U_q`.
    pub fn matrix(&self) -> UnitaryElement<T> {
        let one = Quaternion::one();
        let zero = Quaternion::zero();
        let result = match self {
            HeisMap::Translation(t) => bq_element(&t.zeta, &t.u, &one, &one, &T::one()),
            HeisMap::Rotation { big_u, mu } => bq_element(&zero, &zero, big_u, mu, &T::one()),
            HeisMap::Dilation(l) => bq_element(&zero, &zero, &one, &one, l),
        };
        result.expect("validated parameters")
    }
}

/// The lattice `Heis₇ ∩ (O × O)` of points with `w0, w` in the Hurwitz order.
#[derive(Clone, Debug)]
pub struct HeisLattice {
    generators: Vec<HeisPoint<Rational>>,
}

impl HeisLattice {
    /// Generators: lifts of the order basis `1, i, j, ω` with `w0 = ω`,
    /// and the central elements `2i, 2j, 2k`.
    pub fn hurwitz() -> Self {
        let ijk = QuatQ::imag(rat(1, 1), rat(1, 1), rat(1, 1));
        let half = rat(1, 2);
        let lift = |zeta: QuatQ| HeisPoint { zeta, u: ijk.clone() };
        let generators = vec![
            lift(QuatQ::one()),
            lift(QuatQ::i()),
            lift(QuatQ::j()),
            lift(QuatQ::new(half.clone(), half.clone(), half.clone(), half)),
            HeisPoint::horizontal(QuatQ::zero()).with_u(QuatQ::i().scale(&rat(2, 1))),
            HeisPoint::horizontal(QuatQ::zero()).with_u(QuatQ::j().scale(&rat(2, 1))),
            HeisPoint::horizontal(QuatQ::zero()).with_u(QuatQ::k().scale(&rat(2, 1))),
        ];
        HeisLattice { generators }
    }

    /// The finite-index integral sublattice `ζ ∈ Z⁴`, `u ∈ 2Z³`, generated by
    /// `1, i, j, k` and `2i, 2j, 2k`.
    pub fn integral_sublattice() -> Self {
        let mut generators: Vec<_> = [QuatQ::one(), QuatQ::i(), QuatQ::j(), QuatQ::k()]
            .into_iter()
            .map(HeisPoint::horizontal)
            .collect();
        for e in [QuatQ::i(), QuatQ::j(), QuatQ::k()] {
            generators.push(HeisPoint::horizontal(QuatQ::zero()).with_u(e.scale(&rat(2, 1))));
        }
        HeisLattice { generators }
    }

    pub fn generators(&self) -> &[HeisPoint<Rational>] {
        &self.generators
    }

    /// Lebesgue covolume in `(ζ, u)` coordinates: the absolute Gram
    /// determinant of the generator coordinate vectors.
    pub fn covolume(&self) -> Result<Rational> {
        let rows: Vec<Vec<Rational>> = self
            .generators
            .iter()
            .map(|g| {
                let z = &g.zeta;
                let u = &g.u;
                vec![z.x0.clone(), z.x1.clone(), z.x2.clone(), z.x3.clone(), u.x1.clone(), u.x2.clone(), u.x3.clone()]
            })
            .collect();
        let d = determinant(rows)?;
        if d == rat(0, 1) {
            return Err(Error::Contract("degenerate lattice generators".into()));
        }
        Ok(if d < rat(0, 1) { -d } else { d })
    }
}

impl<T: Scalar> HeisPoint<T> {
    fn with_u(mut self, u: Quaternion<T>) -> Self {
        self.u = u;
        self
    }
}

/// Whether an exact point lies in `Heis₇ ∩ (O × O)`.
pub fn in_hurwitz_lattice(p: &HeisPoint<Rational>) -> bool {
    let (w0, w) = coords_w(p);
    crate::quat::is_in_order(&w0) && crate::quat::is_in_order(&w)
}

/// Covolume of the Hurwitz Heisenberg lattice.
pub fn lattice_covolume() -> Rational {
    HeisLattice::hurwitz().covolume().expect("Hurwitz lattice generators are independent")
}

/// Factor turning Lebesgue measure in `(ζ, u)` coordinates into the Haar
/// measure whose quotient by the lattice has total mass `D_A² / 4`.
pub fn haar_scale(d_a: i64) -> Result<Rational> {
    if d_a != 2 {
        return Err(domain("only the Hurwitz order (discriminant 2) is supported"));
    }
    Ok(rat(d_a * d_a, 4) / lattice_covolume())
}

/// Exact determinant by fraction-preserving Gaussian elimination.
pub(crate) fn determinant(mut m: Vec<Vec<Rational>>) -> Result<Rational> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(contract("determinant needs a square matrix"));
    }
    let zero = rat(0, 1);
    let mut det = rat(1, 1);
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| m[r][col] != zero) else {
            return Ok(zero);
        };
        if piv != col {
            m.swap(piv, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det *= &p;
        for r in col + 1..n {
            if m[r][col] == zero {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let delta = &f * &m[col][c];
                m[r][c] -= delta;
            }
        }
    }
    Ok(det)
}
