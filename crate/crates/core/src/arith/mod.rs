//! The arithmetic orbit of the standard vertical chain under `PU_q(O)` for
//! the Hurwitz order `O`.

pub mod bfs;
pub mod class;
pub mod count;
pub mod enumerate;
pub mod equidist;

use crate::heis::{HeisLattice, HeisMap};
use crate::hermitian::UnitaryElement;
use crate::quat::{hurwitz_units, HurwitzElement, Rational};

pub use bfs::{bfs_orbit, nmax_for_diameter, Orbit, OrbitNode, OrbitOptions, Step};
pub use count::{
    counting_constant, covol_c0, example_constant, exponent_fit, psi_count, CountEstimate, CountingInputs,
};
pub use equidist::{equidistribution_stats, EquidistStats};
pub use enumerate::enumerate_integral_polars;
pub use class::{canonical_class, canonical_key, rotations, ClassKey, IntPolar, IntRotation};

/// The maximal order of the definite quaternion algebra of discriminant 2.
#[derive(Clone, Debug)]
pub struct OrderSpec {
    pub discriminant: i64,
    pub basis: [HurwitzElement; 4],
    pub units: Vec<HurwitzElement>,
    pub m_a: i64,
}

impl OrderSpec {
    pub fn hurwitz() -> Self {
        let d = 2;
        OrderSpec {
            discriminant: d,
            basis: [HurwitzElement::ONE, HurwitzElement::I, HurwitzElement::J, HurwitzElement::OMEGA],
            units: hurwitz_units(),
            m_a: if d % 2 == 0 { 72 } else { 1 },
        }
    }

    /// Primes dividing the discriminant.
    pub fn ramified_primes(&self) -> Vec<i64> {
        let mut out = Vec::new();
        let mut n = self.discriminant;
        let mut p = 2;
        while n > 1 {
            if n % p == 0 {
                out.push(p);
                while n % p == 0 {
                    n /= p;
                }
            }
            p += 1;
        }
        out
    }

    /// Products of basis elements are integral combinations of the basis.
    pub fn basis_closed(&self) -> bool {
        self.basis.iter().all(|a| {
            self.basis.iter().all(|b| {
                let p = (*a * *b).to_quat::<Rational>();
                crate::quat::is_in_order(&p)
            })
        })
    }
}

/// Translations by the lattice generators and their inverses, all integral
/// rotations `(U, μ)`, and the inversion `σ`.
pub fn generators() -> Vec<UnitaryElement<Rational>> {
    let mut out = Vec::new();
    for t in HeisLattice::hurwitz().generators() {
        let m = HeisMap::translation(t.clone()).matrix();
        out.push(m.inverse());
        out.push(m);
    }
    let units = hurwitz_units();
    for u in &units {
        for m in &units {
            out.push(HeisMap::rotation(u.to_quat(), m.to_quat()).expect("units").matrix());
        }
    }
    out.push(UnitaryElement::sigma());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::is_unitary;
    use crate::quat::is_in_order;

    #[test]
    fn order_spec_is_consistent() {
        let o = OrderSpec::hurwitz();
        assert_eq!(o.units.len(), 24);
        assert_eq!(o.m_a, 72);
        assert_eq!(o.ramified_primes(), vec![2]);
        assert!(o.basis_closed());
    }

    #[test]
    fn generators_are_exact_integral_and_symmetric() {
        let gens = generators();
        assert_eq!(gens.len(), 14 + 576 + 1);
        for g in &gens {
            assert!(is_unitary(g.matrix()));
            assert!(g.matrix().entries().iter().all(is_in_order));
            let inv = g.inverse();
            assert!(gens.iter().any(|h| h.eq_projective(&inv)));
        }
    }
}
