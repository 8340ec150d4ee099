//! The quaternionic Heisenberg group with its Cygan and modified Cygan
//! distances.
//!
//! Run with `cargo run --example heisenberg_metrics`.

use quatchains::heis::{cygan_dist, heis_inv, heis_mul, lattice_covolume, mod_cygan_dist, HeisLattice, HeisMap, HeisPoint};
use quatchains::quat::{rat, QuatQ};

fn main() {
    let a = HeisPoint::new(QuatQ::from_ints([1, 0, 2, 0]), QuatQ::from_ints([0, 1, 0, -3])).unwrap();
    let b = HeisPoint::new(QuatQ::from_ints([0, 1, 1, 0]), QuatQ::from_ints([0, 0, 2, 0])).unwrap();
    let ab = heis_mul(&a, &b);
    println!("(ζ, u)·(ζ', u') = ({}, {})", ab.zeta, ab.u);
    println!("noncommutative: ab = ba is {}", ab == heis_mul(&b, &a));
    println!("a·a⁻¹ is the identity: {}", heis_mul(&a, &heis_inv(&a)) == HeisPoint::identity());

    let d = cygan_dist(&a, &b);
    let dd = mod_cygan_dist(&a, &b);
    println!("d(a, b) = {d:.6}, d''(a, b) = {dd:.6}, d/√2 ≤ d'' ≤ d: {}", d / 2f64.sqrt() <= dd && dd <= d);

    let g = HeisPoint::new(QuatQ::from_ints([5, -1, 0, 2]), QuatQ::from_ints([0, 7, 1, 1])).unwrap();
    println!("left-invariance: d(ga, gb) = {:.6}", cygan_dist(&heis_mul(&g, &a), &heis_mul(&g, &b)));
    let m = HeisMap::dilation(rat(3, 1)).unwrap();
    println!("dilation by 3: d = {:.6}", cygan_dist(&m.apply(&a), &m.apply(&b)));

    let lattice = HeisLattice::hurwitz();
    println!("Hurwitz lattice: {} generators, covolume {} (closed form {})", lattice.generators().len(), lattice.covolume().unwrap(), lattice_covolume());
}
