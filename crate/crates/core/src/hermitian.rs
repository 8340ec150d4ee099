//! The Hermitian form `q` of Witt signature (1, 2) on the right `H`-vector
//! space `H³`, its sesquilinear form `Φ`, right-projective points and the
//! unitary group `U_q = { g : g* J g = J }`.

use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{contract, domain, Result};
use crate::quat::{Quat, Quaternion, Scalar, Sign};

/// Absolute tolerance on unitarity residual entries in the float regime.
pub const FLOAT_UNITARY_TOL: f64 = 1e-10;

/// A vector `(z0, z1, z2)` of the right vector space `H³`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HVector<T> {
    pub z: [Quaternion<T>; 3],
}

impl<T: Scalar> HVector<T> {
    pub fn new(z0: Quaternion<T>, z1: Quaternion<T>, z2: Quaternion<T>) -> Self {
        HVector { z: [z0, z1, z2] }
    }

    /// The isotropic vector `(1, 0, 0)` representing the point at infinity.
    pub fn infinity() -> Self {
        Self::new(Quaternion::one(), Quaternion::zero(), Quaternion::zero())
    }

    /// `(w0, w, 1)`: the projective lift of a point of the Siegel model or its boundary.
    pub fn from_siegel(w0: Quaternion<T>, w: Quaternion<T>) -> Self {
        Self::new(w0, w, Quaternion::one())
    }

    pub fn is_zero(&self) -> bool {
        self.z.iter().all(Quaternion::is_zero)
    }

    /// Right scalar multiplication `v λ`.
    pub fn right_scale(&self, lambda: &Quaternion<T>) -> Self {
        Self::new(&self.z[0] * lambda, &self.z[1] * lambda, &self.z[2] * lambda)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(&self.z[0] - &o.z[0], &self.z[1] - &o.z[1], &self.z[2] - &o.z[2])
    }

    /// Sum of coordinate norms, as a float magnitude for tolerances.
    pub fn norm_sq_f64(&self) -> f64 {
        self.z.iter().map(|c| c.norm().to_f64_lossy()).sum()
    }

    pub fn to_f64(&self) -> HVector<f64> {
        HVector::new(self.z[0].to_f64(), self.z[1].to_f64(), self.z[2].to_f64())
    }

    /// Right-normalizes so that the last nonzero coordinate equals 1.
    pub fn normalized(&self) -> Result<Self> {
        let scale = self.norm_sq_f64();
        let last = self
            .z
            .iter()
            .rev()
            .find(|c| !c.norm().is_negligible(scale))
            .ok_or_else(|| domain("zero vector has no projective class"))?;
        Ok(self.right_scale(&last.inverse()?))
    }
}

/// `q(z0, z1, z2) = -tr(conj(z0) z2) + n(z1)`.
pub fn q_form<T: Scalar>(v: &HVector<T>) -> T {
    -(&v.z[0].conj() * &v.z[2]).trace() + v.z[1].norm()
}

/// `Φ(v, w) = -conj(v0) w2 - conj(v2) w0 + conj(v1) w1`.
pub fn phi_form<T: Scalar>(v: &HVector<T>, w: &HVector<T>) -> Quaternion<T> {
    let a = &v.z[0].conj() * &w.z[2];
    let b = &v.z[2].conj() * &w.z[0];
    let c = &v.z[1].conj() * &w.z[1];
    &(&c - &a) - &b
}

/// Position of a projective point relative to the cone of `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointClass {
    /// Interior point of the hyperbolic plane.
    Negative,
    /// Boundary point.
    Isotropic,
    /// Polar point of a chain.
    Positive,
}

/// A point of the right projective plane `P²_r(H)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectivePoint<T> {
    rep: HVector<T>,
    class: PointClass,
}

impl<T: Scalar> ProjectivePoint<T> {
    pub fn new(rep: HVector<T>) -> Result<Self> {
        let class = classify_vector(&rep)?;
        Ok(ProjectivePoint { rep, class })
    }

    pub fn infinity() -> Self {
        Self::new(HVector::infinity()).expect("infinity is nonzero")
    }

    /// Boundary or interior point `[w0 : w : 1]`.
    pub fn from_siegel(w0: Quaternion<T>, w: Quaternion<T>) -> Self {
        Self::new(HVector::from_siegel(w0, w)).expect("last coordinate is 1")
    }

    pub fn rep(&self) -> &HVector<T> {
        &self.rep
    }

    pub fn class(&self) -> PointClass {
        self.class
    }

    pub fn is_infinity(&self) -> bool {
        let scale = self.rep.norm_sq_f64();
        self.rep.z[1].norm().is_negligible(scale) && self.rep.z[2].norm().is_negligible(scale)
    }

    /// Representative with last nonzero coordinate 1.
    pub fn normalized(&self) -> HVector<T> {
        self.rep.normalized().expect("projective point has nonzero representative")
    }

    /// Equality of projective classes (exact, or to `1e-10` relative in floats).
    pub fn same_point(&self, other: &Self) -> bool {
        let a = self.normalized();
        let b = other.normalized();
        if T::EXACT {
            return a == b;
        }
        let scale = a.norm_sq_f64().max(b.norm_sq_f64()).sqrt().max(1.0);
        a.z.iter()
            .zip(&b.z)
            .all(|(x, y)| x.to_f64().max_abs_diff(&y.to_f64()) <= 1e-10 * scale)
    }

    /// `(w0, w)` for a point off infinity.
    pub fn siegel_coords(&self) -> Result<(Quaternion<T>, Quaternion<T>)> {
        let scale = self.rep.norm_sq_f64();
        if self.rep.z[2].norm().is_negligible(scale) {
            return Err(domain("point lies on the hyperplane z2 = 0"));
        }
        let inv = self.rep.z[2].inverse()?;
        Ok((&self.rep.z[0] * &inv, &self.rep.z[1] * &inv))
    }
}

fn classify_vector<T: Scalar>(v: &HVector<T>) -> Result<PointClass> {
    let scale = v.norm_sq_f64();
    if v.is_zero() || scale == 0.0 {
        return Err(domain("the zero vector has no projective class"));
    }
    Ok(match q_form(v).sign_tol(scale) {
        Sign::Negative => PointClass::Negative,
        Sign::Zero => PointClass::Isotropic,
        Sign::Positive => PointClass::Positive,
    })
}

/// Sign of `q` on any representative of `p`.
pub fn classify<T: Scalar>(p: &ProjectivePoint<T>) -> PointClass {
    p.class
}

/// A 3×3 quaternion matrix acting on column vectors from the left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat3<T> {
    pub m: [[Quaternion<T>; 3]; 3],
}

impl<T: Scalar> Mat3<T> {
    pub fn from_rows(m: [[Quaternion<T>; 3]; 3]) -> Self {
        Mat3 { m }
    }

    pub fn identity() -> Self {
        Self::diag(Quaternion::one(), Quaternion::one(), Quaternion::one())
    }

    pub fn diag(a: Quaternion<T>, b: Quaternion<T>, c: Quaternion<T>) -> Self {
        let z = Quaternion::zero;
        Mat3 { m: [[a, z(), z()], [z(), b, z()], [z(), z(), c]] }
    }

    /// The Gram matrix `J` of `q`.
    pub fn gram_j() -> Self {
        let z = Quaternion::zero;
        let m1 = -Quaternion::one();
        Mat3 { m: [[z(), z(), m1.clone()], [z(), Quaternion::one(), z()], [m1, z(), z()]] }
    }

    /// Row-swap involution `(z0, z1, z2) ↦ (z2, z1, z0)`.
    pub fn sigma() -> Self {
        let z = Quaternion::zero;
        let o = Quaternion::one;
        Mat3 { m: [[z(), z(), o()], [z(), o(), z()], [o(), z(), z()]] }
    }

    pub fn conj_transpose(&self) -> Self {
        let m = &self.m;
        Mat3 {
            m: std::array::from_fn(|r| std::array::from_fn(|c| m[c][r].conj())),
        }
    }

    pub fn neg(&self) -> Self {
        Mat3 { m: self.m.clone().map(|row| row.map(|x| -x)) }
    }

    pub fn apply(&self, v: &HVector<T>) -> HVector<T> {
        let row = |r: usize| {
            let mut acc = &self.m[r][0] * &v.z[0];
            acc += &(&self.m[r][1] * &v.z[1]);
            acc += &(&self.m[r][2] * &v.z[2]);
            acc
        };
        HVector::new(row(0), row(1), row(2))
    }

    pub fn to_f64(&self) -> Mat3<f64> {
        Mat3 { m: std::array::from_fn(|r| std::array::from_fn(|c| self.m[r][c].to_f64())) }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut d: f64 = 0.0;
        for r in 0..3 {
            for c in 0..3 {
                d = d.max(self.m[r][c].to_f64().max_abs_diff(&other.m[r][c].to_f64()));
            }
        }
        d
    }

    /// Row-major flattening: 9 quaternions.
    pub fn entries(&self) -> Vec<Quaternion<T>> {
        self.m.iter().flat_map(|r| r.iter().cloned()).collect()
    }

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        if T::EXACT {
            self == other
        } else {
            self.max_abs_diff(other) <= tol
        }
    }

    /// Equality in `PU_q`, i.e. up to the sign `±`.
    pub fn eq_projective(&self, other: &Self) -> bool {
        self.close_to(other, FLOAT_UNITARY_TOL) || self.close_to(&other.neg(), FLOAT_UNITARY_TOL)
    }

    /// Representative of `±g` whose first nonzero entry has nonnegative
    /// leading coordinate.
    pub fn sign_normalized(&self) -> Self {
        for e in self.m.iter().flatten() {
            for c in e.coords() {
                if !c.is_zero() {
                    return if c.is_negative() { self.neg() } else { self.clone() };
                }
            }
        }
        self.clone()
    }
}

impl<'a, T: Scalar> Mul<&'a Mat3<T>> for &'a Mat3<T> {
    type Output = Mat3<T>;
    fn mul(self, o: &'a Mat3<T>) -> Mat3<T> {
        Mat3 {
            m: std::array::from_fn(|r| {
                std::array::from_fn(|c| {
                    let mut acc = &self.m[r][0] * &o.m[0][c];
                    acc += &(&self.m[r][1] * &o.m[1][c]);
                    acc += &(&self.m[r][2] * &o.m[2][c]);
                    acc
                })
            }),
        }
    }
}

/// The six defining relations of `U_q`, written for the block form
/// `[[a, γ*, b], [α, A, β], [c, δ*, d]]`, as left-hand side minus right-hand side.
pub fn residuals<T: Scalar>(g: &Mat3<T>) -> [Quaternion<T>; 6] {
    let m = &g.m;
    let (a, b, c, d) = (&m[0][0], &m[0][2], &m[2][0], &m[2][2]);
    let (alpha, beta, big_a) = (&m[1][0], &m[1][2], &m[1][1]);
    let gamma = m[0][1].conj();
    let delta = m[2][1].conj();
    let one = Quaternion::<T>::one();
    [
        &(&c.conj() * a) - &(&alpha.conj() * alpha) + &a.conj() * c,
        &(&d.conj() * b) - &(&beta.conj() * beta) + &b.conj() * d,
        &(&(&big_a.conj() * big_a) - &(&delta * &gamma.conj())) - &(&(&gamma * &delta.conj()) + &one),
        &(&(&d.conj() * a) - &(&beta.conj() * alpha)) + &(&(&b.conj() * c) - &one),
        &(&(&delta * a) - &(&big_a.conj() * alpha)) + &gamma * c,
        &(&(&delta * b) - &(&big_a.conj() * beta)) + &gamma * d,
    ]
}

/// Membership in `U_q`: exact in the rational regime, to
/// [`FLOAT_UNITARY_TOL`] per residual coordinate in floats.
pub fn is_unitary<T: Scalar>(g: &Mat3<T>) -> bool {
    residuals(g).iter().all(|r| {
        if T::EXACT {
            r.is_zero()
        } else {
            r.to_f64().max_abs_diff(&Quat::zero()) <= FLOAT_UNITARY_TOL
        }
    })
}

/// Float unitarity with residuals measured against the squared entry size,
/// since rounding in `g* J g` grows with the entries.
fn unitary_up_to_scale(g: &Mat3<f64>) -> bool {
    let scale = g.entries().iter().map(|e| e.abs_f64()).fold(1.0, f64::max);
    residuals(g).iter().all(|r| r.abs_f64() <= FLOAT_UNITARY_TOL * scale * scale)
}

/// An element of `U_q`, considered modulo `±` when acting projectively.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryElement<T> {
    mat: Mat3<T>,
}

impl<T: Scalar> UnitaryElement<T> {
    pub fn new(mat: Mat3<T>) -> Result<Self> {
        if !is_unitary(&mat) {
            return Err(contract("matrix does not satisfy g* J g = J"));
        }
        Ok(UnitaryElement { mat })
    }

    /// Wraps a matrix known to be unitary by construction.
    pub(crate) fn trusted(mat: Mat3<T>) -> Self {
        debug_assert!(unitary_up_to_scale(&mat.to_f64()), "trusted matrix is not unitary");
        UnitaryElement { mat }
    }

    pub fn identity() -> Self {
        UnitaryElement { mat: Mat3::identity() }
    }

    pub fn sigma() -> Self {
        UnitaryElement { mat: Mat3::sigma() }
    }

    pub fn matrix(&self) -> &Mat3<T> {
        &self.mat
    }

    /// `g⁻¹ = J g* J`.
    pub fn inverse(&self) -> Self {
        let j = Mat3::gram_j();
        UnitaryElement { mat: &(&j * &self.mat.conj_transpose()) * &j }
    }

    pub fn compose(&self, other: &Self) -> Self {
        UnitaryElement { mat: &self.mat * &other.mat }
    }

    pub fn eq_projective(&self, other: &Self) -> bool {
        self.mat.eq_projective(&other.mat)
    }

    pub fn to_f64(&self) -> UnitaryElement<f64> {
        UnitaryElement { mat: self.mat.to_f64() }
    }
}

/// Projective action by left matrix multiplication on a representative.
pub fn act<T: Scalar>(g: &UnitaryElement<T>, p: &ProjectivePoint<T>) -> ProjectivePoint<T> {
    let rep = g.mat.apply(&p.rep);
    // Unitary matrices are invertible and preserve q, hence the class.
    ProjectivePoint { rep, class: p.class }
}

/// Element of the block upper triangular group `B_q` (the stabiliser of
/// infinity), parametrised by a horizontal translation part `zeta`, a
/// vertical part `u`, a rotation `(big_u, mu)` and a dilation ratio `r`.
pub fn bq_element<T: Scalar>(
    zeta: &Quaternion<T>,
    u: &Quaternion<T>,
    big_u: &Quaternion<T>,
    mu: &Quaternion<T>,
    r: &T,
) -> Result<UnitaryElement<T>> {
    let unit_scale = 1.0;
    if !(big_u.norm() - T::one()).is_negligible(unit_scale) || !(mu.norm() - T::one()).is_negligible(unit_scale) {
        return Err(contract("rotation parameters must be unit quaternions"));
    }
    if !u.trace().is_negligible(u.abs_f64().max(1.0)) {
        return Err(contract("vertical parameter must be purely imaginary"));
    }
    if !r.is_positive() {
        return Err(contract("dilation ratio must be positive"));
    }
    let inv_r = T::one() / r.clone();
    let half_inv_r = inv_r.clone() * T::half();
    let w0 = &Quaternion::real(zeta.norm()) + u;
    let z = Quaternion::zero;
    let m = [
        [mu.scale(r), zeta.conj(), (&w0 * mu).scale(&half_inv_r)],
        [z(), big_u.clone(), (&(big_u * zeta) * mu).scale(&inv_r)],
        [z(), z(), mu.scale(&inv_r)],
    ];
    Ok(UnitaryElement::trusted(Mat3::from_rows(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quat::{rat, QuatQ, Rational};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type V = HVector<Rational>;

    fn qi(a: [i64; 4]) -> QuatQ {
        QuatQ::from_ints(a)
    }

    fn small_quat() -> impl Strategy<Value = QuatQ> {
        prop::array::uniform4((-6i64..6, 1i64..4)).prop_map(QuatQ::from_ratios)
    }

    fn small_vec() -> impl Strategy<Value = V> {
        (small_quat(), small_quat(), small_quat()).prop_map(|(a, b, c)| HVector::new(a, b, c))
    }

    fn rand_quat(rng: &mut ChaCha8Rng) -> Quat {
        Quat::from_array(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
    }

    fn rand_unit(rng: &mut ChaCha8Rng) -> Quat {
        let q = rand_quat(rng);
        q.scale(&(1.0 / q.abs_f64()))
    }

    #[test]
    fn q_form_examples() {
        assert_eq!(q_form(&V::infinity()), rat(0, 1));
        assert_eq!(q_form(&HVector::new(QuatQ::zero(), QuatQ::one(), QuatQ::zero())), rat(1, 1));
        let p0 = HVector::new(QuatQ::real(rat(-1, 2)), QuatQ::zero(), QuatQ::one());
        assert_eq!(q_form(&p0), rat(1, 1));
    }

    #[test]
    fn phi_against_basis_vectors() {
        let w = HVector::new(qi([1, 2, 0, -1]), qi([0, 3, 1, 1]), qi([5, 0, 0, 2]));
        let e1 = HVector::new(QuatQ::zero(), QuatQ::one(), QuatQ::zero());
        assert_eq!(phi_form(&e1, &w), w.z[1]);
        assert_eq!(phi_form(&V::infinity(), &w), -&w.z[2]);
    }

    #[test]
    fn classify_examples() {
        let p = |a: i64, b: i64, c: i64| {
            ProjectivePoint::new(HVector::new(QuatQ::real(rat(a, 1)), QuatQ::real(rat(b, 1)), QuatQ::real(rat(c, 1)))).unwrap()
        };
        assert_eq!(classify(&p(1, 0, 0)), PointClass::Isotropic);
        assert_eq!(classify(&p(1, 0, 1)), PointClass::Negative);
        assert_eq!(q_form(p(1, 0, 1).rep()), rat(-2, 1));
        assert_eq!(classify(&p(0, 1, 0)), PointClass::Positive);
        assert!(ProjectivePoint::new(V::new(QuatQ::zero(), QuatQ::zero(), QuatQ::zero())).is_err());
    }

    #[test]
    fn identity_and_sigma_are_unitary() {
        assert!(is_unitary(&Mat3::<Rational>::identity()));
        assert!(is_unitary(&Mat3::<Rational>::sigma()));
        let s = Mat3::<Rational>::sigma();
        let j = Mat3::<Rational>::gram_j();
        assert_eq!(&(&s.conj_transpose() * &j) * &s, j);
        let mut bad = Mat3::<Rational>::identity();
        bad.m[0][0] = QuatQ::real(rat(2, 1));
        assert!(!is_unitary(&bad));
        assert!(UnitaryElement::new(bad).is_err());
    }

    #[test]
    fn residuals_match_gram_identity() {
        // The six relations are entries of g* J g - J.
        let g = bq_element(&qi([1, 1, 0, 0]), &qi([0, 2, 0, 0]), &QuatQ::one(), &QuatQ::one(), &rat(1, 1)).unwrap();
        let j = Mat3::gram_j();
        let gjg = &(&g.matrix().conj_transpose() * &j) * g.matrix();
        assert_eq!(gjg, j);
        assert!(residuals(g.matrix()).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn sigma_inverts_boundary_chart() {
        let w = qi([1, 1, 0, 0]);
        let w0 = &QuatQ::real(rat(1, 1)) + &qi([0, 0, 3, 0]);
        let p = ProjectivePoint::from_siegel(w0.clone(), w.clone());
        let image = act(&UnitaryElement::sigma(), &p);
        assert_eq!(image.rep(), &HVector::new(QuatQ::one(), w.clone(), w0.clone()));
        let inv = w0.inverse().unwrap();
        let (a, b) = image.siegel_coords().unwrap();
        assert_eq!(a, inv);
        assert_eq!(b, &w * &inv);
    }

    #[test]
    fn bq_identity_and_translation() {
        let one = QuatQ::one();
        let g = bq_element(&QuatQ::zero(), &QuatQ::zero(), &one, &one, &rat(1, 1)).unwrap();
        assert_eq!(g.matrix(), &Mat3::identity());
        let zeta = qi([1, -1, 2, 0]);
        let u = qi([0, 1, 0, 3]);
        let t = bq_element(&zeta, &u, &one, &one, &rat(1, 1)).unwrap();
        let w0 = (&QuatQ::real(zeta.norm()) + &u).scale(&rat(1, 2));
        let expected = Mat3::from_rows([
            [one.clone(), zeta.conj(), w0],
            [QuatQ::zero(), one.clone(), zeta.clone()],
            [QuatQ::zero(), QuatQ::zero(), one.clone()],
        ]);
        assert_eq!(t.matrix(), &expected);
        assert!(act(&t, &ProjectivePoint::infinity()).same_point(&ProjectivePoint::infinity()));
    }

    #[test]
    fn bq_parameter_checks() {
        let one = QuatQ::one();
        let two = qi([2, 0, 0, 0]);
        assert!(bq_element(&QuatQ::zero(), &QuatQ::zero(), &two, &one, &rat(1, 1)).is_err());
        assert!(bq_element(&QuatQ::zero(), &one, &one, &one, &rat(1, 1)).is_err());
        assert!(bq_element(&QuatQ::zero(), &QuatQ::zero(), &one, &one, &rat(-1, 1)).is_err());
    }

    #[test]
    fn bq_rotation_dilation_float() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let (uu, mu) = (rand_unit(&mut rng), rand_unit(&mut rng));
            for r in [0.5, 2.0] {
                let g = bq_element(&rand_quat(&mut rng), &rand_quat(&mut rng).im(), &uu, &mu, &r).unwrap();
                assert!(is_unitary(g.matrix()));
                let fixed = act(&g, &ProjectivePoint::infinity());
                assert!(fixed.same_point(&ProjectivePoint::infinity()));
            }
        }
    }

    #[test]
    fn rational_rotations_are_exactly_unitary() {
        // (3/5 + 4/5 i) and (1/2)(1 + i + j + k) are exact unit quaternions.
        let uu = QuatQ::from_ratios([(3, 5), (4, 5), (0, 1), (0, 1)]);
        let mu = QuatQ::from_ratios([(1, 2); 4]);
        for r in [rat(1, 2), rat(2, 1)] {
            let g = bq_element(&qi([1, 0, 2, 0]), &qi([0, 0, 1, 1]), &uu, &mu, &r).unwrap();
            assert!(residuals(g.matrix()).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn act_preserves_class_and_composes() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let g = bq_element(&rand_quat(&mut rng), &rand_quat(&mut rng).im(), &rand_unit(&mut rng), &rand_unit(&mut rng), &rng.gen_range(0.5..2.0))
                .unwrap()
                .compose(&UnitaryElement::sigma());
            let v = HVector::new(rand_quat(&mut rng), rand_quat(&mut rng), rand_quat(&mut rng));
            let p = ProjectivePoint::new(v.clone()).unwrap();
            let image = act(&g, &p);
            let recomputed = ProjectivePoint::new(image.rep().clone()).unwrap();
            assert_eq!(recomputed.class(), p.class());
            let h = UnitaryElement::sigma();
            assert!(act(&g, &act(&h, &p)).same_point(&act(&g.compose(&h), &p)));
            assert!(act(&UnitaryElement::identity(), &p).same_point(&p));
        }
    }

    proptest! {
        #[test]
        fn phi_is_hermitian(v in small_vec(), w in small_vec()) {
            prop_assert_eq!(phi_form(&v, &v), QuatQ::real(q_form(&v)));
            prop_assert_eq!(phi_form(&v, &w), phi_form(&w, &v).conj());
        }

        #[test]
        fn classification_invariant_under_right_scaling(v in small_vec(), l in small_quat()) {
            prop_assume!(!v.is_zero() && !l.is_zero());
            let p = ProjectivePoint::new(v.clone()).unwrap();
            let pl = ProjectivePoint::new(v.right_scale(&l)).unwrap();
            prop_assert_eq!(p.class(), pl.class());
            prop_assert_eq!(q_form(&v.right_scale(&l)), l.norm() * q_form(&v));
            prop_assert!(p.same_point(&pl));
        }

        #[test]
        fn unitary_group_closure_and_phi_equivariance(
            z1 in small_quat(), u1 in small_quat(), z2 in small_quat(), v in small_vec(), w in small_vec()
        ) {
            let one = QuatQ::one();
            let a = bq_element(&z1, &u1.im(), &one, &one, &rat(1, 1)).unwrap();
            let b = bq_element(&z2, &QuatQ::zero(), &one, &one, &rat(2, 1)).unwrap().compose(&UnitaryElement::sigma());
            let g = a.compose(&b);
            prop_assert!(is_unitary(g.matrix()));
            let gi = g.inverse();
            prop_assert!(is_unitary(gi.matrix()));
            let gg = g.compose(&gi);
            prop_assert_eq!(gg.matrix(), &Mat3::identity());
            prop_assert_eq!(phi_form(&g.matrix().apply(&v), &g.matrix().apply(&w)), phi_form(&v, &w));
        }
    }
}
