//! Distance from the horoball `H₁` to geodesic lines, in closed form and
//! from the maximal height along the line.
//!
//! Run with `cargo run --example horoball_distance`.

use quatchains::chain::Chain;
use quatchains::heis::HeisPoint;
use quatchains::siegel::{dist_horoball_to_geodesic, dist_horoball_to_geodesic_by_height, max_height, perpendicular_length_from_diameter, BoundaryPoint};

fn main() {
    let x = HeisPoint::from_coords([0.3, -0.1, 0.0, 0.2, 0.05, -0.02, 0.1]);
    let y = HeisPoint::from_coords([-0.2, 0.1, 0.1, 0.0, 0.0, 0.04, -0.03]);
    let gap = dist_horoball_to_geodesic(&BoundaryPoint::Finite(x.clone()), &BoundaryPoint::Finite(y.clone())).unwrap();
    println!("closed form: {:.12} (line meets H₁: {})", gap.value, gap.intersects);
    println!("by height:   {:.12}", dist_horoball_to_geodesic_by_height(&x, &y).unwrap());
    let (t, s) = max_height(&x).unwrap();
    println!("line from x to the origin peaks at height {s:.6} for t = {t:.6}");

    for r in [0.25, 0.5, 0.9] {
        let c = Chain::finite(&HeisPoint::identity(), r * r).unwrap();
        println!(
            "chain of radius {r}: common perpendicular to H₁ has length {:.6}",
            perpendicular_length_from_diameter(c.diameter_cygan()).unwrap()
        );
    }
}
