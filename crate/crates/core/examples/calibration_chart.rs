//! The calibration form `ω` pulled back through the exponential chart of a
//! chain. The pullback is the Maurer-Cartan form of `SU(2)` scaled by
//! `R²`: it equals `dv` at the basepoint and in the radial direction, but
//! it is not closed, so no chart of the chain turns it into `dv`.
//!
//! Run with `cargo run --example calibration_chart`.

use quatchains::chain::{chart_tau, mu_barycenter, pullback_omega, Chain};
use quatchains::heis::HeisPoint;
use quatchains::quat::Quat;

fn main() {
    let r = 1.0;
    let c = Chain::finite(&HeisPoint::identity(), r * r).unwrap();
    let base = HeisPoint::horizontal(Quat::real(-r));
    for v in [Quat::imag(0.0, 0.0, 0.0), Quat::imag(0.5, 0.0, 0.0), Quat::imag(0.5, 0.5, 0.0), Quat::imag(2.0, -1.0, 1.5)] {
        let m = pullback_omega(|x| chart_tau(&c, &base, x).unwrap(), &v, 1e-5);
        let dev = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| (m[a][b] - f64::from(a == b)).abs()).fold(0.0, f64::max);
        let n = v.abs_f64().max(f64::MIN_POSITIVE);
        let dir = [v.x1 / n, v.x2 / n, v.x3 / n];
        let radial = (0..3).map(|b| ((0..3).map(|a| dir[a] * m[a][b]).sum::<f64>() - dir[b]).abs()).fold(0.0, f64::max);
        println!("v = {:?}: max |τ*ω - dv| = {dev:.3e}, radial defect {radial:.1e}", v.to_array());
    }

    let b = mu_barycenter(&c, 200_000, 7).unwrap();
    println!("barycenter of the chain measure {:?} ± {:.1e}", b.mean.coords_f64(), b.combined_std_error());
}
