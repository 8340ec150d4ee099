//! Exact rational quaternions and the Hurwitz order.
//!
//! Run with `cargo run --example quaternion_algebra`.

use quatchains::quat::{hurwitz_units, is_in_order, rat, HurwitzElement, QuatQ};

fn main() {
    let a = QuatQ::new(rat(1, 2), rat(1, 2), rat(1, 2), rat(1, 2));
    let b = QuatQ::new(rat(3, 1), rat(0, 1), rat(-1, 1), rat(2, 1));
    let ab = &a * &b;
    println!("a = {a}, b = {b}");
    println!("ab = {ab}, ba = {}", &b * &a);
    println!("n(ab) = {} = n(a) n(b) = {}", ab.norm(), a.norm() * b.norm());
    println!("conj(ab) = conj(b) conj(a): {}", ab.conj() == &b.conj() * &a.conj());
    println!("a⁻¹ = {}", a.inverse().unwrap());

    let units = hurwitz_units();
    let list: Vec<String> = units.iter().map(|u| u.to_string()).collect();
    println!("{} Hurwitz units: {}", units.len(), list.join(", "));
    let h = HurwitzElement::from_doubled([1, 3, -1, 5]).unwrap();
    println!("h = {h} has norm {} and trace {}", h.norm(), h.trace());
    let third = QuatQ::new(rat(1, 3), rat(0, 1), rat(0, 1), rat(0, 1));
    println!("1/3 in the order: {}, a in the order: {}", is_in_order(&third), is_in_order(&a));
    println!("ab as floats: {:?}", ab.to_f64().to_array());
}
