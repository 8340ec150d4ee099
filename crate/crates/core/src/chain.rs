//! Chains in the boundary of the quaternionic hyperbolic plane, described by
//! their polar points: membership, center, radius, diameter, reflexions,
//! orthogonality, and the calibration `ω = du - 2 Im(conj(ζ) dζ)`.

use nalgebra::{DMatrix, SVD};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Error, Result};
use crate::heis::{coords_w, heis_mul, HeisMap, HeisPoint};
use crate::hermitian::{act, phi_form, q_form, HVector, Mat3, PointClass, ProjectivePoint, UnitaryElement};
use crate::quat::{Quat, Quaternion, Scalar};
use crate::siegel::BoundaryPoint;

/// Below this size, float radii and `|q|` values are rejected as degenerate.
pub const DEGENERACY_FLOOR: f64 = 1e-12;

/// Tolerance on `(ι ι')² = ±1` when testing orthogonality in floats.
pub const FLOAT_ORTHOGONALITY_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
enum Shape<T> {
    /// Preimage of `foot` under the vertical projection, plus `∞`.
    Vertical { foot: Quaternion<T> },
    /// Ellipsoid with the given center and squared radius.
    Finite { center: HeisPoint<T>, radius_sq: T },
}

/// A chain, determined by its positive polar point.
#[derive(Clone, Debug)]
pub struct Chain<T> {
    polar: ProjectivePoint<T>,
    shape: Shape<T>,
}

/// Builds the chain with the given polar point.
pub fn chain_from_polar<T: Scalar>(p: &ProjectivePoint<T>) -> Result<Chain<T>> {
    let v = p.rep();
    let scale = v.norm_sq_f64();
    let q = q_form(v);
    if !T::EXACT && q.to_f64_lossy().abs() < DEGENERACY_FLOOR * scale.max(1.0) {
        return Err(Error::IllConditioned("polar point is nearly isotropic".into()));
    }
    if p.class() != PointClass::Positive {
        return Err(domain("polar point of a chain must be positive"));
    }
    let [z0, z, z2] = &v.z;
    let shape = if z2.norm().is_negligible(scale) {
        Shape::Vertical { foot: (z0 * &z.inverse()?).conj() }
    } else {
        let inv = z2.inverse()?;
        let radius_sq = q / z2.norm();
        if !T::EXACT && radius_sq.to_f64_lossy().sqrt() < DEGENERACY_FLOOR {
            return Err(Error::IllConditioned("chain radius is below the degeneracy floor".into()));
        }
        let a = (z0 * &inv).im();
        Shape::Finite { center: HeisPoint { zeta: z * &inv, u: &a + &a }, radius_sq }
    };
    Ok(Chain { polar: p.clone(), shape })
}

impl<T: Scalar> Chain<T> {
    /// The finite chain with given center and squared radius; its polar is
    /// the translate of `[-R²/2 : 0 : 1]` by the center.
    pub fn finite(center: &HeisPoint<T>, radius_sq: T) -> Result<Self> {
        if !radius_sq.is_positive() {
            return Err(contract("radius must be positive"));
        }
        let base = HVector::new(Quaternion::real(-(radius_sq * T::half())), Quaternion::zero(), Quaternion::one());
        let polar = HeisMap::translation(center.clone()).matrix().matrix().apply(&base);
        chain_from_polar(&ProjectivePoint::new(polar)?)
    }

    /// The vertical chain `Π_v⁻¹(foot) ∪ {∞}`.
    pub fn vertical(foot: &Quaternion<T>) -> Self {
        let polar = HVector::new(foot.conj(), Quaternion::one(), Quaternion::zero());
        chain_from_polar(&ProjectivePoint::new(polar).expect("nonzero")).expect("q = 1")
    }

    /// The standard vertical chain `{ζ = 0} ∪ {∞}`, polar `[0 : 1 : 0]`.
    pub fn standard_vertical() -> Self {
        Self::vertical(&Quaternion::zero())
    }

    pub fn polar(&self) -> &ProjectivePoint<T> {
        &self.polar
    }

    pub fn is_vertical(&self) -> bool {
        matches!(self.shape, Shape::Vertical { .. })
    }

    /// `q(P) / n(z2)`, exact in the rational regime.
    pub fn radius_sq(&self) -> Option<&T> {
        match &self.shape {
            Shape::Finite { radius_sq, .. } => Some(radius_sq),
            Shape::Vertical { .. } => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        self.radius_sq().map(|r| r.to_f64_lossy().sqrt())
    }

    /// `(z z2⁻¹, 2 Im(z0 z2⁻¹))`, or `∞` for vertical chains.
    pub fn center(&self) -> BoundaryPoint<T> {
        match &self.shape {
            Shape::Finite { center, .. } => BoundaryPoint::Finite(center.clone()),
            Shape::Vertical { .. } => BoundaryPoint::Infinity,
        }
    }

    /// Vertical projection of a vertical chain.
    pub fn foot(&self) -> Option<&Quaternion<T>> {
        match &self.shape {
            Shape::Vertical { foot } => Some(foot),
            Shape::Finite { .. } => None,
        }
    }

    /// Cygan diameter: `2R`, infinite for vertical chains.
    pub fn diameter_cygan(&self) -> f64 {
        self.radius().map_or(f64::INFINITY, |r| 2.0 * r)
    }

    /// Modified Cygan diameter: `diameter_cygan / √2`.
    pub fn diameter_mod_cygan(&self) -> f64 {
        self.diameter_cygan() / std::f64::consts::SQRT_2
    }

    /// The image chain `g C`, with polar `g P`.
    pub fn transform(&self, g: &UnitaryElement<T>) -> Result<Self> {
        chain_from_polar(&act(g, &self.polar))
    }

    pub fn to_f64(&self) -> Chain<f64> {
        chain_from_polar(&ProjectivePoint::new(self.polar.rep().to_f64()).expect("nonzero"))
            .expect("positive polar stays positive in floats")
    }

    /// `|Φ(x, P)|` for `x = [w0 : w : 1]`, relative to the size of `P`.
    pub fn membership_residual(&self, x: &HeisPoint<T>) -> f64 {
        let p = self.polar.rep();
        let (w0, w) = coords_w(x);
        let [z0, z, z2] = &p.z;
        let lhs = &(&(&w.conj() * z) - &(&w0.conj() * z2)) - z0;
        lhs.abs_f64() / p.norm_sq_f64().sqrt()
    }

    /// Whether the boundary point lies on the chain.
    pub fn contains(&self, x: &BoundaryPoint<T>) -> bool {
        match x {
            BoundaryPoint::Infinity => self.is_vertical(),
            BoundaryPoint::Finite(h) => {
                let r = self.membership_residual(h);
                if T::EXACT {
                    r == 0.0 && {
                        let (w0, w) = coords_w(h);
                        phi_form(&HVector::from_siegel(w0, w), self.polar.rep()).is_zero()
                    }
                } else {
                    r <= 1e-10 * (1.0 + h.coords_f64().iter().map(|c| c.abs()).fold(0.0, f64::max)).powi(2)
                }
            }
        }
    }
}

/// Membership of an isotropic projective point in a chain.
pub fn membership<T: Scalar>(c: &Chain<T>, x: &ProjectivePoint<T>) -> Result<bool> {
    Ok(c.contains(&BoundaryPoint::from_projective(x)?))
}

/// Point of a finite chain: `ζ = ζ0 + R s`, `u = u0 + 2 Im(conj(ζ0) ζ)`.
pub fn ellipsoid_point(c: &Chain<f64>, s: &Quat) -> Result<HeisPoint<f64>> {
    let Shape::Finite { center, radius_sq } = &c.shape else {
        return Err(domain("vertical chains are not ellipsoids"));
    };
    if (s.norm() - 1.0).abs() > 1e-9 {
        return Err(contract("ellipsoid parameter must be a unit quaternion"));
    }
    let zeta = &center.zeta + &s.scale(&radius_sq.sqrt());
    let t = (&center.zeta.conj() * &zeta).im();
    Ok(HeisPoint { u: &center.u + &(&t + &t), zeta })
}

fn isotropic_rows<T: Scalar>(x: &BoundaryPoint<T>) -> [Quaternion<T>; 3] {
    // Row vector x* J, so that Φ(x, v) = Σ row_j v_j.
    let z = x.to_projective().rep().clone().z;
    [-z[2].conj(), z[1].conj(), -z[0].conj()]
}

/// The unique chain through two distinct boundary points.
pub fn chain_through<T: Scalar>(x: &BoundaryPoint<T>, y: &BoundaryPoint<T>) -> Result<Chain<T>> {
    if x.to_projective().same_point(&y.to_projective()) {
        return Err(domain("a chain through a single point is not unique"));
    }
    let (a, b) = (isotropic_rows(x), isotropic_rows(y));
    let polar = if T::EXACT { null_by_elimination(&a, &b)? } else { null_by_svd(&a, &b)? };
    let p = ProjectivePoint::new(polar)?;
    if p.class() != PointClass::Positive {
        return Err(Error::IllConditioned("solution of the chain system is not positive".into()));
    }
    chain_from_polar(&p)
}

/// Solves `Σ a_j v_j = Σ b_j v_j = 0` by left elimination over `H`.
fn null_by_elimination<T: Scalar>(a: &[Quaternion<T>; 3], b: &[Quaternion<T>; 3]) -> Result<HVector<T>> {
    let pick = |r: &[Quaternion<T>; 3], skip: Option<usize>| {
        (0..3)
            .filter(|&j| Some(j) != skip && !r[j].is_zero())
            .max_by(|&i, &j| r[i].abs_f64().total_cmp(&r[j].abs_f64()))
    };
    let p = pick(a, None).ok_or_else(|| domain("degenerate boundary point"))?;
    let f = &b[p] * &a[p].inverse()?;
    let b2: [Quaternion<T>; 3] = std::array::from_fn(|j| &b[j] - &(&f * &a[j]));
    let others: Vec<usize> = (0..3).filter(|&j| j != p).collect();
    let (i, j) = (others[0], others[1]);
    let mut v: [Quaternion<T>; 3] = std::array::from_fn(|_| Quaternion::zero());
    match pick(&b2, Some(p)) {
        None => return Err(domain("boundary points coincide")),
        Some(q) => {
            let other = if q == i { j } else { i };
            v[other] = Quaternion::one();
            v[q] = -(&b2[q].inverse()? * &b2[other]);
        }
    }
    let rest = &(&a[i] * &v[i]) + &(&a[j] * &v[j]);
    v[p] = -(&a[p].inverse()? * &rest);
    let [v0, v1, v2] = v;
    Ok(HVector::new(v0, v1, v2))
}

/// Real 4×4 matrix of left multiplication by `q`.
fn left_mult_matrix(q: &Quat) -> [[f64; 4]; 4] {
    let (a, b, c, d) = (q.x0, q.x1, q.x2, q.x3);
    [[a, -b, -c, -d], [b, a, -d, c], [c, d, a, -b], [d, -c, b, a]]
}

/// Solves the same system as a real 8×12 problem via singular values.
fn null_by_svd<T: Scalar>(a: &[Quaternion<T>; 3], b: &[Quaternion<T>; 3]) -> Result<HVector<T>> {
    let mut m = DMatrix::<f64>::zeros(12, 12);
    for (row_block, r) in [a, b].into_iter().enumerate() {
        for (j, q) in r.iter().enumerate() {
            let l = left_mult_matrix(&q.to_f64());
            for (rr, row) in l.iter().enumerate() {
                for (cc, val) in row.iter().enumerate() {
                    m[(4 * row_block + rr, 4 * j + cc)] = *val;
                }
            }
        }
    }
    let svd = SVD::new(m, false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::IllConditioned("singular value decomposition failed".into()))?;
    let mut order: Vec<usize> = (0..12).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s = |k: usize| svd.singular_values[order[k]];
    if s(0) == 0.0 || s(7) < 1e-9 * s(0) {
        return Err(Error::IllConditioned("chain system lost rank".into()));
    }
    let row = v_t.row(order[11]);
    let quat = |k: usize| Quaternion::new(
        T::from_f64(row[4 * k]).expect("finite"),
        T::from_f64(row[4 * k + 1]).expect("finite"),
        T::from_f64(row[4 * k + 2]).expect("finite"),
        T::from_f64(row[4 * k + 3]).expect("finite"),
    );
    Ok(HVector::new(quat(0), quat(1), quat(2)))
}

/// The reflexion of a chain, `x ↦ x - 2 P Φ(P, x) / q(P)`.
pub fn reflexion<T: Scalar>(c: &Chain<T>) -> UnitaryElement<T> {
    let p = c.polar.rep();
    let pj = [-p.z[2].conj(), p.z[1].conj(), -p.z[0].conj()];
    let f = T::two() / q_form(p);
    let m: [[Quaternion<T>; 3]; 3] = std::array::from_fn(|r| {
        std::array::from_fn(|col| {
            let e = (&p.z[r] * &pj[col]).scale(&f);
            if r == col {
                &Quaternion::one() - &e
            } else {
                -e
            }
        })
    });
    UnitaryElement::trusted(Mat3::from_rows(m))
}

/// The same reflexion, built by conjugating a normal form: a translation
/// and the dilation-conjugate of the unit-sphere reflexion for finite chains,
/// and a horizontal translate of `[z0 : -z1 : z2]` for vertical chains.
pub fn reflexion_by_normal_form<T: Scalar>(c: &Chain<T>) -> UnitaryElement<T> {
    match &c.shape {
        Shape::Finite { center, radius_sq } => {
            let t = HeisMap::translation(center.clone()).matrix();
            let z = Quaternion::zero;
            let d = Mat3::from_rows([
                [z(), z(), Quaternion::real(radius_sq.clone() * T::half())],
                [z(), Quaternion::one(), z()],
                [Quaternion::real(T::two() / radius_sq.clone()), z(), z()],
            ]);
            let d = UnitaryElement::trusted(d);
            t.compose(&d).compose(&t.inverse())
        }
        Shape::Vertical { foot } => {
            let t = HeisMap::translation(HeisPoint::horizontal(foot.clone())).matrix();
            let flip = Mat3::diag(Quaternion::one(), -Quaternion::one(), Quaternion::one());
            t.compose(&UnitaryElement::trusted(flip)).compose(&t.inverse())
        }
    }
}

/// `ι(∞)`, read off the first column of the reflexion.
pub fn center_by_reflexion<T: Scalar>(c: &Chain<T>) -> Result<BoundaryPoint<T>> {
    BoundaryPoint::from_projective(&act(&reflexion(c), &ProjectivePoint::infinity()))
}

/// Orthogonality: `(ι ι')² = ±1` in `PU_q`.
pub fn orthogonal<T: Scalar>(c1: &Chain<T>, c2: &Chain<T>) -> Result<bool> {
    if c1.polar.same_point(&c2.polar) {
        return Err(domain("a chain is not orthogonal to itself"));
    }
    let m = reflexion(c1).compose(&reflexion(c2));
    let sq = m.compose(&m);
    let id = Mat3::identity();
    Ok(if T::EXACT {
        sq.matrix() == &id || sq.matrix() == &id.neg()
    } else {
        sq.matrix().max_abs_diff(&id) <= FLOAT_ORTHOGONALITY_TOL
            || sq.matrix().max_abs_diff(&id.neg()) <= FLOAT_ORTHOGONALITY_TOL
    })
}

/// Value of the calibration on a tangent vector.
#[derive(Clone, Debug, PartialEq)]
pub struct CalibrationValue(pub Quat);

impl CalibrationValue {
    /// `(ω1, ω2, ω3)`.
    pub fn components(&self) -> [f64; 3] {
        [self.0.x1, self.0.x2, self.0.x3]
    }
}

/// `ω = du - 2 Im(conj(ζ) dζ)` at `p` on the tangent vector `(dζ, du)`.
pub fn omega(p: &HeisPoint<f64>, dzeta: &Quat, du: &Quat) -> CalibrationValue {
    let t = (&p.zeta.conj() * dzeta).im();
    CalibrationValue(&du.im() - &(&t + &t))
}

/// Matrix `M[a][b] = ω_b(∂f/∂v_a)` of the pullback of `ω` by a map of
/// `Im H`, by central differences with step `h`.
pub fn pullback_omega(f: impl Fn(&Quat) -> HeisPoint<f64>, v: &Quat, h: f64) -> [[f64; 3]; 3] {
    let base = f(v);
    let dirs = [Quat::i(), Quat::j(), Quat::k()];
    std::array::from_fn(|a| {
        let plus = f(&(v + &dirs[a].scale(&h)));
        let minus = f(&(v - &dirs[a].scale(&h)));
        let inv = 1.0 / (2.0 * h);
        let dz = (&plus.zeta - &minus.zeta).scale(&inv);
        let du = (&plus.u - &minus.u).scale(&inv);
        omega(&base, &dz, &du).components()
    })
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Density of `ω1 ∧ ω2 ∧ ω3` pulled back through [`ellipsoid_point`],
/// relative to the round measure of the unit sphere at `s`.
pub fn ellipsoid_density(c: &Chain<f64>, s: &Quat) -> Result<f64> {
    let base = ellipsoid_point(c, s)?;
    let h = 1e-5;
    let mut m = [[0.0; 3]; 3];
    for (a, e) in [Quat::i(), Quat::j(), Quat::k()].iter().enumerate() {
        let dir = s * e;
        let along = |t: f64| ellipsoid_point(c, &(&s.scale(&t.cos()) + &dir.scale(&t.sin())));
        let (p, q) = (along(h)?, along(-h)?);
        let inv = 1.0 / (2.0 * h);
        let dz = (&p.zeta - &q.zeta).scale(&inv);
        let du = (&p.u - &q.u).scale(&inv);
        m[a] = omega(&base, &dz, &du).components();
    }
    Ok(det3(&m).abs())
}

/// Monte Carlo estimate of the barycenter of `μ_C`, with per-coordinate
/// standard errors.
#[derive(Clone, Debug)]
pub struct Barycenter {
    pub mean: HeisPoint<f64>,
    pub std_error: [f64; 7],
    pub samples: usize,
}

impl Barycenter {
    /// Euclidean norm of the standard-error vector.
    pub fn combined_std_error(&self) -> f64 {
        self.std_error.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    w: f64,
    w2: f64,
    wp: [f64; 7],
    w2p: [f64; 7],
    w2p2: [f64; 7],
}

impl Moments {
    fn merge(mut self, o: Moments) -> Moments {
        self.w += o.w;
        self.w2 += o.w2;
        for k in 0..7 {
            self.wp[k] += o.wp[k];
            self.w2p[k] += o.w2p[k];
            self.w2p2[k] += o.w2p2[k];
        }
        self
    }
}

fn unit_quaternion(rng: &mut ChaCha8Rng) -> Quat {
    loop {
        let q = Quat::from_array(std::array::from_fn(|_| StandardNormal.sample(rng)));
        let n = q.abs_f64();
        if n > 1e-6 {
            return q.scale(&(1.0 / n));
        }
    }
}

/// Barycenter of `μ_C` by uniform sampling of the sphere parameter of
/// [`ellipsoid_point`], importance-weighted by [`ellipsoid_density`].
/// Deterministic for a given seed regardless of thread count.
pub fn mu_barycenter(c: &Chain<f64>, samples: usize, seed: u64) -> Result<Barycenter> {
    if c.is_vertical() {
        return Err(domain("vertical chains have infinite mass"));
    }
    if samples < 1000 {
        return Err(Error::Insufficient("at least 1000 samples are required".into()));
    }
    const CHUNK: usize = 8192;
    let chunks = samples.div_ceil(CHUNK);
    let moments = (0..chunks)
        .into_par_iter()
        .map(|k| -> Result<Moments> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let n = CHUNK.min(samples - k * CHUNK);
            let mut m = Moments::default();
            for _ in 0..n {
                let s = unit_quaternion(&mut rng);
                let w = ellipsoid_density(c, &s)?;
                let p = ellipsoid_point(c, &s)?.coords_f64();
                m.w += w;
                m.w2 += w * w;
                for i in 0..7 {
                    m.wp[i] += w * p[i];
                    m.w2p[i] += w * w * p[i];
                    m.w2p2[i] += w * w * p[i] * p[i];
                }
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(Moments::default(), Moments::merge);
    let mean: [f64; 7] = std::array::from_fn(|i| moments.wp[i] / moments.w);
    let std_error = std::array::from_fn(|i| {
        let ss = moments.w2p2[i] - 2.0 * mean[i] * moments.w2p[i] + mean[i] * mean[i] * moments.w2;
        ss.max(0.0).sqrt() / moments.w
    });
    Ok(Barycenter { mean: HeisPoint::from_coords(mean), std_error, samples })
}

/// The chart `v ↦ (R e^{-v/(2R²)}, 0)` of the standard-position chain
/// (center `(0, 0)`, basepoint `(-R, 0)`), moved onto `c` by a rotation
/// `(ζ, u) ↦ (U ζ, u)` and the translation by the center.
pub fn chart_tau(c: &Chain<f64>, basepoint: &HeisPoint<f64>, v: &Quat) -> Result<HeisPoint<f64>> {
    let Shape::Finite { center, radius_sq } = &c.shape else {
        return Err(domain("use vertical_chart for vertical chains"));
    };
    if !c.contains(&BoundaryPoint::Finite(basepoint.clone())) {
        return Err(domain("basepoint is not on the chain"));
    }
    if !v.is_imaginary() {
        return Err(domain("chart parameter must be purely imaginary"));
    }
    let r = radius_sq.sqrt();
    if v.abs_f64() > 2.0 * std::f64::consts::PI * radius_sq * (1.0 + 1e-12) {
        return Err(domain("chart parameter lies outside the ball of radius 2πR²"));
    }
    let standard = HeisPoint::horizontal(v.scale(&(-1.0 / (2.0 * radius_sq))).exp().scale(&r));
    let big_u = (&basepoint.zeta - &center.zeta).scale(&(-1.0 / r));
    let rotated = HeisMap::Rotation { big_u, mu: Quat::one() }.apply(&standard);
    Ok(heis_mul(center, &rotated))
}

/// The chart `v ↦ (ζ0, v)` of the vertical chain over `ζ0`.
pub fn vertical_chart(c: &Chain<f64>, v: &Quat) -> Result<HeisPoint<f64>> {
    let foot = c.foot().ok_or_else(|| domain("use chart_tau for finite chains"))?;
    HeisPoint::new(foot.clone(), v.clone())
}

/// Serialized chain: schema version and float polar coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRecord {
    pub version: u8,
    pub polar: [[f64; 4]; 3],
}

pub const CHAIN_RECORD_VERSION: u8 = 1;

impl Chain<f64> {
    pub fn to_record(&self) -> ChainRecord {
        ChainRecord { version: CHAIN_RECORD_VERSION, polar: self.polar.rep().z.clone().map(|q| q.to_array()) }
    }

    pub fn from_record(r: &ChainRecord) -> Result<Self> {
        if r.version != CHAIN_RECORD_VERSION {
            return Err(contract(format!("unsupported chain record version {}", r.version)));
        }
        let [a, b, c] = r.polar.map(Quat::from_array);
        chain_from_polar(&ProjectivePoint::new(HVector::new(a, b, c))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heis::{cygan_dist, mod_cygan_dist, vertical_projection};
    use crate::quat::{rat, QuatQ, Rational};
    use proptest::prelude::*;
    use rand::Rng;

    fn qi(a: [i64; 4]) -> QuatQ {
        QuatQ::from_ints(a)
    }

    fn polar(z0: QuatQ, z: QuatQ, z2: QuatQ) -> ProjectivePoint<Rational> {
        ProjectivePoint::new(HVector::new(z0, z, z2)).unwrap()
    }

    fn unit_chain() -> Chain<Rational> {
        chain_from_polar(&polar(QuatQ::real(rat(-1, 2)), QuatQ::zero(), QuatQ::one())).unwrap()
    }

    fn rand_point(rng: &mut ChaCha8Rng) -> HeisPoint<f64> {
        HeisPoint::from_coords(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
    }

    fn rand_finite(rng: &mut ChaCha8Rng) -> Chain<f64> {
        Chain::finite(&rand_point(rng), rng.gen_range(0.1..4.0)).unwrap()
    }

    fn rational_quat() -> impl Strategy<Value = QuatQ> {
        prop::array::uniform4((-5i64..5, 1i64..4)).prop_map(QuatQ::from_ratios)
    }

    fn rational_chain() -> impl Strategy<Value = Chain<Rational>> {
        (rational_quat(), rational_quat(), 1i64..9, 1i64..4).prop_map(|(z, u, n, d)| {
            Chain::finite(&HeisPoint::new(z, u.im()).unwrap(), rat(n, d)).unwrap()
        })
    }

    #[test]
    fn polar_examples() {
        let v = Chain::<Rational>::standard_vertical();
        assert!(v.is_vertical());
        assert_eq!(v.center(), BoundaryPoint::Infinity);
        let c = unit_chain();
        assert_eq!(c.center(), BoundaryPoint::Finite(HeisPoint::identity()));
        assert_eq!(c.radius_sq(), Some(&rat(1, 1)));
        for (r2, r) in [(rat(1, 4), 0.5), (rat(9, 1), 3.0)] {
            let c = chain_from_polar(&polar(QuatQ::real(-(r2.clone() * rat(1, 2))), QuatQ::zero(), QuatQ::one())).unwrap();
            assert_eq!(c.radius_sq(), Some(&r2));
            assert_eq!(c.radius(), Some(r));
            assert_eq!(c.center(), BoundaryPoint::Finite(HeisPoint::identity()));
        }
        assert!(chain_from_polar(&polar(QuatQ::one(), QuatQ::zero(), QuatQ::zero())).is_err());
        assert!(chain_from_polar(&polar(QuatQ::one(), QuatQ::zero(), QuatQ::one())).is_err());
    }

    #[test]
    fn standard_vertical_polar_is_orthogonal_to_its_points() {
        let p = HVector::new(QuatQ::zero(), QuatQ::one(), QuatQ::zero());
        for x in [HVector::infinity(), HVector::new(qi([0, 3, 1, 0]), QuatQ::zero(), QuatQ::one())] {
            assert!(phi_form(&p, &x).is_zero());
        }
    }

    #[test]
    fn degenerate_float_polars() {
        let tiny = Quat::real(1e-14);
        let p = ProjectivePoint::new(HVector::new(&tiny.scale(&-0.5) * &Quat::one(), Quat::zero(), Quat::one())).unwrap();
        assert!(matches!(chain_from_polar(&p), Err(Error::IllConditioned(_))));
        let p = ProjectivePoint::new(HVector::new(Quat::real(-0.5e-25), Quat::zero(), Quat::one())).unwrap();
        assert!(matches!(chain_from_polar(&p), Err(Error::IllConditioned(_))));
    }

    #[test]
    fn membership_examples() {
        let v = Chain::<Rational>::standard_vertical();
        for u in [[1, 0, 0], [0, -3, 2]] {
            assert!(v.contains(&BoundaryPoint::Finite(HeisPoint::vertical(qi([0, u[0], u[1], u[2]])).unwrap())));
        }
        assert!(v.contains(&BoundaryPoint::Infinity));
        assert!(!v.contains(&BoundaryPoint::Finite(HeisPoint::horizontal(QuatQ::one()))));
        let c = unit_chain();
        assert!(c.contains(&BoundaryPoint::Finite(HeisPoint::horizontal(QuatQ::i()))));
        assert!(!c.contains(&BoundaryPoint::Infinity));
        assert!(!c.contains(&BoundaryPoint::Finite(HeisPoint::horizontal(qi([1, 1, 0, 0])))));
        let interior = ProjectivePoint::new(HVector::new(QuatQ::one(), QuatQ::zero(), QuatQ::one())).unwrap();
        assert!(membership(&c, &interior).is_err());
    }

    #[test]
    fn ellipsoid_examples() {
        let c = unit_chain().to_f64();
        assert_eq!(ellipsoid_point(&c, &Quat::one()).unwrap(), HeisPoint::horizontal(Quat::one()));
        let shifted = Chain::finite(&HeisPoint::horizontal(Quat::i()), 1.0).unwrap();
        let p = ellipsoid_point(&shifted, &Quat::one()).unwrap();
        // ζ = 1 + i, u = 2 Im(conj(i)(1 + i)) = 2 Im(1 - i) = -2i.
        assert!(p.max_abs_diff(&HeisPoint::new(Quat::new(1.0, 1.0, 0.0, 0.0), Quat::i().scale(&-2.0)).unwrap()) < 1e-15);
        assert!(shifted.contains(&BoundaryPoint::Finite(p)));
        assert!(ellipsoid_point(&Chain::standard_vertical(), &Quat::one()).is_err());
        assert!(ellipsoid_point(&c, &Quat::real(2.0)).is_err());
    }

    #[test]
    fn ellipsoid_points_lie_on_chain_and_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let c = rand_finite(&mut rng);
            let BoundaryPoint::Finite(center) = c.center() else { unreachable!() };
            for _ in 0..100 {
                let p = ellipsoid_point(&c, &unit_quaternion(&mut rng)).unwrap();
                assert!(c.membership_residual(&p) <= 1e-12 * (1.0 + center.coords_f64().iter().map(|x| x * x).sum::<f64>()));
                assert!(c.contains(&BoundaryPoint::Finite(p.clone())));
                let off = (&vertical_projection(&p) - &center.zeta).norm() - c.radius_sq().unwrap();
                assert!(off.abs() < 1e-12 * c.radius_sq().unwrap().max(1.0));
            }
        }
    }

    #[test]
    fn chain_through_examples() {
        let o = BoundaryPoint::Finite(HeisPoint::<Rational>::identity());
        let c = chain_through(&BoundaryPoint::Infinity, &o).unwrap();
        assert!(c.polar().same_point(&polar(QuatQ::zero(), QuatQ::one(), QuatQ::zero())));
        let x = BoundaryPoint::Finite(HeisPoint::horizontal(QuatQ::one()));
        let y = BoundaryPoint::Finite(HeisPoint::horizontal(-QuatQ::one()));
        let c = chain_through(&x, &y).unwrap();
        assert!(c.polar().same_point(unit_chain().polar()));
        assert!(chain_through(&x, &x).is_err());
        let (xf, yf) = (BoundaryPoint::Finite(HeisPoint::horizontal(Quat::one())), BoundaryPoint::Finite(HeisPoint::horizontal(-Quat::one())));
        assert!(chain_through(&xf, &yf).unwrap().polar().same_point(unit_chain().to_f64().polar()));
    }

    #[test]
    fn chain_through_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..1000 {
            let (x, y) = (BoundaryPoint::Finite(rand_point(&mut rng)), BoundaryPoint::Finite(rand_point(&mut rng)));
            let c = chain_through(&x, &y).unwrap();
            assert!(c.contains(&x) && c.contains(&y));
        }
        let x = BoundaryPoint::Finite(HeisPoint::horizontal(Quat::one()));
        let y = BoundaryPoint::Finite(HeisPoint::horizontal(Quat::new(1.0 + 1e-13, 0.0, 0.0, 0.0)));
        assert!(matches!(chain_through(&x, &y), Err(Error::IllConditioned(_)) | Err(Error::Domain(_))));
    }

    #[test]
    fn svd_and_elimination_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..200 {
            let (x, y) = (BoundaryPoint::Finite(rand_point(&mut rng)), BoundaryPoint::Finite(rand_point(&mut rng)));
            let (a, b) = (isotropic_rows(&x), isotropic_rows(&y));
            let p1 = ProjectivePoint::new(null_by_svd(&a, &b).unwrap()).unwrap();
            let p2 = ProjectivePoint::new(null_by_elimination(&a, &b).unwrap()).unwrap();
            assert!(p1.same_point(&p2));
        }
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(unit_chain().diameter_cygan(), 2.0);
        assert_eq!(Chain::<f64>::standard_vertical().diameter_cygan(), f64::INFINITY);
        let c = unit_chain().to_f64();
        let s = Quat::new(0.5, -0.5, 0.5, 0.5);
        let (a, b) = (ellipsoid_point(&c, &s).unwrap(), ellipsoid_point(&c, &-&s).unwrap());
        assert!((cygan_dist(&a, &b) - 2.0).abs() < 1e-15);
        assert!((mod_cygan_dist(&a, &b) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reflexion_examples() {
        let r = reflexion(&unit_chain());
        let z = QuatQ::zero;
        let expected = Mat3::from_rows([
            [z(), z(), QuatQ::real(rat(1, 2))],
            [z(), QuatQ::one(), z()],
            [QuatQ::real(rat(2, 1)), z(), z()],
        ]);
        assert!(r.matrix().eq_projective(&expected));
        let rv = reflexion(&Chain::<Rational>::standard_vertical());
        assert_eq!(rv.matrix(), &Mat3::diag(QuatQ::one(), -QuatQ::one(), QuatQ::one()));
    }

    #[test]
    fn reflexions_fix_sampled_chain_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let c = rand_finite(&mut rng);
            let r = reflexion(&c);
            for _ in 0..100 {
                let p = ellipsoid_point(&c, &unit_quaternion(&mut rng)).unwrap().to_projective();
                assert!(act(&r, &p).same_point(&p));
            }
        }
    }

    #[test]
    fn orthogonality_examples() {
        let v = Chain::<Rational>::standard_vertical();
        assert!(orthogonal(&v, &unit_chain()).unwrap());
        let lifted = Chain::finite(&HeisPoint::vertical(qi([0, 2, -1, 0])).unwrap(), rat(4, 1)).unwrap();
        assert!(orthogonal(&v, &lifted).unwrap());
        let off = Chain::finite(&HeisPoint::horizontal(QuatQ::one()), rat(1, 1)).unwrap();
        assert!(!orthogonal(&v, &off).unwrap());
        assert!(!orthogonal(&off, &v).unwrap());
        assert!(orthogonal(&v, &v).is_err());
        assert!(orthogonal(&v.to_f64(), &unit_chain().to_f64()).unwrap());
    }

    #[test]
    fn omega_at_origin_is_du() {
        let o = HeisPoint::identity();
        let du = Quat::imag(1.0, 2.0, 3.0);
        assert_eq!(omega(&o, &Quat::new(4.0, 5.0, 6.0, 7.0), &du).0, du);
    }

    #[test]
    fn unit_chain_measure_is_rotation_invariant() {
        let c = unit_chain().to_f64();
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        let d0 = ellipsoid_density(&c, &Quat::one()).unwrap();
        assert!((d0 - 8.0).abs() < 1e-6);
        for _ in 0..100 {
            let d = ellipsoid_density(&c, &unit_quaternion(&mut rng)).unwrap();
            assert!((d - d0).abs() < 1e-6 * d0);
        }
    }

    #[test]
    fn barycenter_of_unit_chain() {
        let b = mu_barycenter(&unit_chain().to_f64(), 200_000, 7).unwrap();
        let err: f64 = b.mean.coords_f64().iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!(err <= 3.0 * b.combined_std_error(), "{err} vs {}", b.combined_std_error());
        assert!(mu_barycenter(&unit_chain().to_f64(), 10, 7).is_err());
        let again = mu_barycenter(&unit_chain().to_f64(), 200_000, 7).unwrap();
        assert_eq!(again.mean, b.mean);
    }

    #[test]
    fn chart_standard_position() {
        let c = unit_chain().to_f64();
        let base = HeisPoint::horizontal(Quat::real(-1.0));
        assert!(chart_tau(&c, &base, &Quat::zero()).unwrap().max_abs_diff(&HeisPoint::horizontal(Quat::one())) < 1e-15);
        assert!(chart_tau(&c, &base, &Quat::imag(7.0, 0.0, 0.0)).is_err());
        assert!(chart_tau(&c, &HeisPoint::identity(), &Quat::zero()).is_err());
    }

    #[test]
    fn chart_tends_to_basepoint_on_the_boundary_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..10 {
            let c = rand_finite(&mut rng);
            let base = ellipsoid_point(&c, &unit_quaternion(&mut rng)).unwrap();
            let dir = unit_quaternion(&mut rng).im();
            let dir = dir.scale(&(1.0 / dir.abs_f64()));
            let edge = 2.0 * std::f64::consts::PI * c.radius_sq().unwrap();
            let end = chart_tau(&c, &base, &dir.scale(&edge)).unwrap();
            assert!(end.max_abs_diff(&base) < 1e-9);
            let near = chart_tau(&c, &base, &dir.scale(&(edge * (1.0 - 1e-6)))).unwrap();
            assert!(near.max_abs_diff(&base) < 1e-4);
            assert!(c.contains(&BoundaryPoint::Finite(chart_tau(&c, &base, &dir.scale(&(0.3 * edge))).unwrap())));
        }
    }

    #[test]
    fn chart_pullback_at_center_and_radially() {
        // At v = 0, and along the ray through v, the pullback of ω is dv.
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for r2 in [0.25, 1.0, 4.0] {
            let c = Chain::finite(&rand_point(&mut rng), r2).unwrap();
            let base = ellipsoid_point(&c, &unit_quaternion(&mut rng)).unwrap();
            let m = pullback_omega(|v| chart_tau(&c, &base, v).unwrap(), &Quat::zero(), 1e-4);
            for a in 0..3 {
                for b in 0..3 {
                    assert!((m[a][b] - f64::from(a == b)).abs() < 1e-6);
                }
            }
            let v = Quat::imag(0.7 * r2, 0.0, 0.0);
            let m = pullback_omega(|v| chart_tau(&c, &base, v).unwrap(), &v, 1e-4);
            assert!((m[0][0] - 1.0).abs() < 1e-6 && m[0][1].abs() < 1e-6 && m[0][2].abs() < 1e-6);
        }
    }

    #[test]
    fn vertical_chart_pullback() {
        let c = Chain::vertical(&Quat::new(1.0, -2.0, 0.5, 0.0));
        let m = pullback_omega(|v| vertical_chart(&c, v).unwrap(), &Quat::imag(0.3, -1.0, 2.0), 1e-4);
        for a in 0..3 {
            for b in 0..3 {
                assert!((m[a][b] - f64::from(a == b)).abs() < 1e-9);
            }
        }
        assert!(vertical_chart(&unit_chain().to_f64(), &Quat::zero()).is_err());
    }

    #[test]
    fn record_round_trip() {
        let c = Chain::finite(&HeisPoint::from_coords([0.1, 0.2, -0.3, 1.0, 2.0, 0.0, -1.0]), 2.5).unwrap();
        let json = serde_json::to_string(&c.to_record()).unwrap();
        let back = Chain::from_record(&serde_json::from_str(&json).unwrap()).unwrap();
        assert!(back.polar().same_point(c.polar()));
        let mut bad = c.to_record();
        bad.version = 9;
        assert!(Chain::from_record(&bad).is_err());
    }

    proptest! {
        #[test]
        fn reflexion_is_an_exact_involution(c in rational_chain()) {
            let r = reflexion(&c);
            let sq = r.compose(&r);
            prop_assert!(sq.matrix().eq_projective(&Mat3::identity()));
            prop_assert!(reflexion_by_normal_form(&c).eq_projective(&r));
            prop_assert_eq!(center_by_reflexion(&c).unwrap(), c.center());
        }

        #[test]
        fn center_radius_round_trip(c in rational_chain()) {
            let BoundaryPoint::Finite(center) = c.center() else { unreachable!() };
            let again = Chain::finite(&center, c.radius_sq().unwrap().clone()).unwrap();
            prop_assert!(again.polar().same_point(c.polar()));
        }

        #[test]
        fn center_equivariance_under_translations(c in rational_chain(), z in rational_quat(), u in rational_quat()) {
            let t = HeisPoint::new(z, u.im()).unwrap();
            let moved = c.transform(&HeisMap::translation(t.clone()).matrix()).unwrap();
            let BoundaryPoint::Finite(center) = c.center() else { unreachable!() };
            prop_assert_eq!(moved.center(), BoundaryPoint::Finite(heis_mul(&t, &center)));
            prop_assert_eq!(moved.radius_sq(), c.radius_sq());
        }

        #[test]
        fn dilation_scales_radius(c in rational_chain(), n in 1i64..5, d in 1i64..5) {
            let l = rat(n, d);
            let moved = c.transform(&HeisMap::dilation(l.clone()).unwrap().matrix()).unwrap();
            prop_assert_eq!(moved.radius_sq().unwrap(), &(c.radius_sq().unwrap() * &l * &l));
        }

        #[test]
        fn vertical_reflexions_agree(z in rational_quat()) {
            let c = Chain::vertical(&z);
            prop_assert!(reflexion_by_normal_form(&c).eq_projective(&reflexion(&c)));
            prop_assert_eq!(center_by_reflexion(&c).unwrap(), BoundaryPoint::Infinity);
        }

        #[test]
        fn orthogonality_is_symmetric(a in rational_chain(), b in rational_chain()) {
            prop_assume!(!a.polar().same_point(b.polar()));
            prop_assert_eq!(orthogonal(&a, &b).unwrap(), orthogonal(&b, &a).unwrap());
        }
    }
}
