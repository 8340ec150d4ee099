//! Chains: polar vectors, centers, radii, reflexions, diameters and the
//! finite-chain ellipsoid parametrisation.
//!
//! Run with `cargo run --example chain_geometry`.

use quatchains::chain::{center_by_reflexion, chain_through, ellipsoid_point, orthogonal, reflexion, Chain};
use quatchains::heis::{cygan_dist, HeisPoint};
use quatchains::hermitian::{act, ProjectivePoint};
use quatchains::quat::{rat, Quat, QuatQ};
use quatchains::siegel::BoundaryPoint;

fn main() {
    let center = HeisPoint::new(QuatQ::from_ints([1, 0, 0, 1]), QuatQ::from_ints([0, 2, 0, 0])).unwrap();
    let c = Chain::finite(&center, rat(9, 4)).unwrap();
    println!("chain with center {:?}", center.coords_f64());
    println!("radius² {}, Cygan diameter {:.6}, modified diameter {:.6}", c.radius_sq().unwrap(), c.diameter_cygan(), c.diameter_mod_cygan());

    let r = reflexion(&c);
    println!("reflexion² = ±1: {}", r.compose(&r).eq_projective(&quatchains::hermitian::UnitaryElement::identity()));
    println!("reflexion maps ∞ to the center: {}", center_by_reflexion(&c).unwrap() == c.center());
    let (w0, w) = act(&r, &ProjectivePoint::infinity()).siegel_coords().unwrap();
    println!("image of ∞ in Siegel coordinates: w0 = {w0}, w = {w}");

    let cf = c.to_f64();
    let s = Quat::from_array([0.5, 0.5, -0.5, 0.5]);
    let (x, y) = (ellipsoid_point(&cf, &s).unwrap(), ellipsoid_point(&cf, &-&s).unwrap());
    println!("antipodal points at distance {:.6}, both on the chain: {}", cygan_dist(&x, &y), cf.contains(&BoundaryPoint::Finite(x.clone())) && cf.contains(&BoundaryPoint::Finite(y)));

    let through = chain_through(&BoundaryPoint::Finite(center.clone()), &BoundaryPoint::Infinity).unwrap();
    println!("the chain through the center and ∞ is vertical: {}", through.is_vertical());
    println!("it is orthogonal to the original chain: {}", orthogonal(&c, &through).unwrap());
}
