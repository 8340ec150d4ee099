//! The Siegel domain `{(w0, w) : tr w0 - n(w) > 0}`, its horoballs centered
//! at `∞`, and the distance from the horoball `H₁` to a geodesic line.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::heis::{coords_w, from_projective, heis_inv, heis_mul, mod_cygan_dist, HeisPoint};
use crate::hermitian::{PointClass, ProjectivePoint};
use crate::quat::{Quat, Quaternion, Scalar};

/// Interior point of the Siegel domain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiegelPoint<T> {
    pub w0: Quaternion<T>,
    pub w: Quaternion<T>,
}

impl<T: Scalar> SiegelPoint<T> {
    pub fn new(w0: Quaternion<T>, w: Quaternion<T>) -> Result<Self> {
        let p = SiegelPoint { w0, w };
        if !p.height().is_positive() {
            return Err(domain("point is not in the Siegel domain"));
        }
        Ok(p)
    }

    /// `tr(w0) - n(w)`.
    pub fn height(&self) -> T {
        self.w0.trace() - self.w.norm()
    }
}

/// A point at infinity of the Siegel domain: `∞` or a Heisenberg point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BoundaryPoint<T> {
    Infinity,
    Finite(HeisPoint<T>),
}

impl<T: Scalar> BoundaryPoint<T> {
    pub fn to_projective(&self) -> ProjectivePoint<T> {
        match self {
            BoundaryPoint::Infinity => ProjectivePoint::infinity(),
            BoundaryPoint::Finite(p) => p.to_projective(),
        }
    }

    pub fn from_projective(p: &ProjectivePoint<T>) -> Result<Self> {
        if p.class() != PointClass::Isotropic {
            return Err(domain("boundary points are isotropic"));
        }
        if p.is_infinity() {
            return Ok(BoundaryPoint::Infinity);
        }
        Ok(BoundaryPoint::Finite(from_projective(p)?))
    }

    pub fn finite(&self) -> Option<&HeisPoint<T>> {
        match self {
            BoundaryPoint::Infinity => None,
            BoundaryPoint::Finite(p) => Some(p),
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, BoundaryPoint::Infinity)
    }
}

/// Membership in the closed horoball `H_s = {height ≥ s}`.
pub fn horoball_contains<T: Scalar>(s: &T, p: &SiegelPoint<T>) -> Result<bool> {
    if !s.is_positive() {
        return Err(domain("horoball parameter must be positive"));
    }
    Ok(p.height() >= *s)
}

/// Distance between the horospheres `∂H₁` and `∂H_s`: `-ln(s) / 2`.
pub fn horoball_distance(s: f64) -> Result<f64> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(domain("horoball parameter must lie in (0, 1]"));
    }
    Ok(-s.ln() / 2.0)
}

fn w0_of_nonzero(x: &HeisPoint<f64>) -> Result<(Quat, Quat)> {
    let (w0, w) = coords_w(x);
    if w0.norm() == 0.0 {
        return Err(domain("geodesic endpoint coincides with the origin"));
    }
    Ok((w0, w))
}

/// The point at time `t` on the geodesic line from `x` to `(0, 0)`:
/// `(w0 (1 + e^{2t} w0)⁻¹, w (1 + e^{2t} w0)⁻¹)`.
pub fn geodesic_to_origin(x: &HeisPoint<f64>, t: f64) -> Result<SiegelPoint<f64>> {
    let (w0, w) = w0_of_nonzero(x)?;
    let den = (&Quat::one() + &w0.scale(&(2.0 * t).exp())).inverse()?;
    Ok(SiegelPoint { w0: &w0 * &den, w: &w * &den })
}

/// Height along the geodesic: `s(t) = 2 e^{2t} n(w0) / n(1 + e^{2t} w0)`.
pub fn height_profile(x: &HeisPoint<f64>, t: f64) -> Result<f64> {
    let (w0, _) = w0_of_nonzero(x)?;
    let e = (2.0 * t).exp();
    Ok(2.0 * e * w0.norm() / (&Quat::one() + &w0.scale(&e)).norm())
}

/// Maximum of [`height_profile`] over `t ∈ [-20, 20]` by golden-section
/// search; returns `(t_max, s_max)`.
pub fn max_height(x: &HeisPoint<f64>) -> Result<(f64, f64)> {
    w0_of_nonzero(x)?;
    let f = |t: f64| height_profile(x, t).expect("checked nonzero");
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (-20.0f64, 20.0f64);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let t = (a + b) / 2.0;
    Ok((t, f(t)))
}

/// Signed distance from `H₁` to a geodesic line; `intersects` is set when
/// the line enters the horoball, in which case `value ≤ 0` is the negated
/// penetration depth (`-∞` for lines ending at `∞`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HoroballGap {
    pub value: f64,
    pub intersects: bool,
}

/// `d(H₁, ]x, y[) = -ln(d''(x, y) / √2)`.
pub fn dist_horoball_to_geodesic(x: &BoundaryPoint<f64>, y: &BoundaryPoint<f64>) -> Result<HoroballGap> {
    let (BoundaryPoint::Finite(a), BoundaryPoint::Finite(b)) = (x, y) else {
        if x == y {
            return Err(domain("geodesic endpoints coincide"));
        }
        return Ok(HoroballGap { value: f64::NEG_INFINITY, intersects: true });
    };
    let dd = mod_cygan_dist(a, b);
    if dd == 0.0 {
        return Err(domain("geodesic endpoints coincide"));
    }
    let value = -(dd / std::f64::consts::SQRT_2).ln();
    Ok(HoroballGap { value, intersects: value < 0.0 })
}

/// The same distance computed from the maximal height along the geodesic,
/// after translating `y` to the origin.
pub fn dist_horoball_to_geodesic_by_height(x: &HeisPoint<f64>, y: &HeisPoint<f64>) -> Result<f64> {
    let moved = heis_mul(&heis_inv(y), x);
    let (_, s_max) = max_height(&moved)?;
    Ok(-s_max.ln() / 2.0)
}

/// Length of the common perpendicular between `H₁` and the geodesic line
/// of a chain of Cygan diameter `diam`: `-ln(diam / 2)`.
pub fn perpendicular_length_from_diameter(diam: f64) -> Result<f64> {
    if diam.is_nan() || diam <= 0.0 {
        return Err(domain("diameter must be positive"));
    }
    if diam > 2.0 {
        return Err(domain("chains of diameter above 2 meet the horoball H₁"));
    }
    Ok(-(diam / 2.0).ln())
}
