//! Equidistribution of chain centers in the unit cube of the Hurwitz
//! lattice as the diameter cutoff shrinks.
//!
//! Run with `cargo run --release --example equidistribution`.

use quatchains::arith::{bfs_orbit, equidistribution_stats, IntPolar, OrbitOptions};

fn main() {
    let opts = OrbitOptions { max_depth: 10, diam_min: 0.4, workers: None, max_classes: 1_000_000 };
    let orbit = bfs_orbit(&IntPolar::seed(), &opts).unwrap();
    println!("{:>8} {:>8} {:>8} {:>10} {:>12}", "epsilon", "classes", "centers", "chi2/df", "discrepancy");
    for eps in [0.8, 0.65, 0.55, 0.47, 0.4] {
        let keys = orbit.nodes.iter().map(|n| &n.key);
        let s = equidistribution_stats(keys, eps, 3).unwrap();
        println!("{eps:>8.3} {:>8} {:>8} {:>10.4} {:>12.4}", s.classes, s.chains, s.chi_square / s.df as f64, s.discrepancy);
    }
}
