//! Breadth-first orbit of the standard vertical chain under the Hurwitz
//! modular group, and the diameter count `ψ(ε)` with its log-log slope.
//!
//! Run with `cargo run --release --example orbit_counting`.

use quatchains::arith::count::geometric_grid;
use quatchains::arith::{bfs_orbit, enumerate_integral_polars, exponent_fit, nmax_for_diameter, CountEstimate, IntPolar, OrbitOptions};

fn main() {
    let grid = geometric_grid(0.8, 0.4, 0.9).unwrap();
    let diam_min = *grid.last().unwrap();
    let opts = OrbitOptions { max_depth: 10, diam_min, workers: None, max_classes: 1_000_000 };
    let orbit = bfs_orbit(&IntPolar::seed(), &opts).unwrap();
    println!("{} classes with diameter ≥ {diam_min:.4} (n(z₂) ≤ {}), new per depth {:?}", orbit.len(), orbit.nmax, orbit.new_per_depth);

    let est = CountEstimate::from_orbit(&orbit, &grid, 2).unwrap();
    for i in 0..grid.len() {
        println!("ε = {:.4}  ψ = {:>6}  saturated {}  ψ ε¹⁰ = {:.4}", est.epsilons[i], est.psi[i], est.saturated[i], est.prefactor[i]);
    }
    println!("slope {:.3} (asymptotically 10), constant {:.4}", exponent_fit(&est).unwrap(), est.predicted_constant);

    let deepest = orbit.len() - 1;
    println!("word of the last class found: {:?}", orbit.word(deepest).matrix().to_f64());
    let all = enumerate_integral_polars(nmax_for_diameter(diam_min).unwrap()).unwrap();
    println!("direct enumeration finds {} classes", all.len());
}
