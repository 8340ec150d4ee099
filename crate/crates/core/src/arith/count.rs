//! Orbit counts `ψ(ε)`, the log-log exponent fit, and the closed-form
//! asymptotic constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::bfs::Orbit;
use super::class::ClassKey;
use super::OrderSpec;
use crate::error::{contract, Error, Result};

/// Whether a class of squared radius `num/den` has Cygan diameter `≥ eps`,
/// with the same relative slack as the search bound.
pub fn diameter_at_least(radius_sq: (i64, i64), eps: f64) -> bool {
    4.0 * radius_sq.0 as f64 * (1.0 + 1e-12) >= eps * eps * radius_sq.1 as f64
}

/// `ψ(ε)` over an arbitrary set of classes.
pub fn psi_count<'a>(classes: impl IntoIterator<Item = &'a ClassKey>, eps: f64) -> Result<usize> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(contract("diameter bound must be positive"));
    }
    Ok(classes.into_iter().filter(|k| diameter_at_least(k.radius_sq, eps)).count())
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::Insufficient("at least two points are needed".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Insufficient("abscissae are all equal".into()));
    }
    Ok(sxy / sxx)
}

/// Geometric grid `eps_max, eps_max·ratio, …` down to `eps_min` inclusive.
pub fn geometric_grid(eps_max: f64, eps_min: f64, ratio: f64) -> Result<Vec<f64>> {
    if !(eps_min > 0.0 && eps_max >= eps_min && ratio > 0.0 && ratio < 1.0) {
        return Err(contract("grid needs 0 < eps_min ≤ eps_max and a ratio in (0, 1)"));
    }
    let mut out = Vec::new();
    let mut e = eps_max;
    while e >= eps_min * (1.0 - 1e-12) {
        out.push(e);
        e *= ratio;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountEstimate {
    pub epsilons: Vec<f64>,
    pub psi: Vec<usize>,
    pub saturated: Vec<bool>,
    /// Slope over the saturated points up to and including each grid point.
    pub slope_so_far: Vec<Option<f64>>,
    /// `ψ(ε) ε¹⁰`.
    pub prefactor: Vec<f64>,
    pub predicted_constant: f64,
}

impl CountEstimate {
    pub fn from_orbit(orbit: &Orbit, grid: &[f64], d_a: i64) -> Result<Self> {
        if grid.windows(2).any(|w| w[1] >= w[0]) || grid.iter().any(|&e| e <= 0.0) {
            return Err(contract("epsilon grid must be positive and strictly decreasing"));
        }
        let mut est = CountEstimate {
            epsilons: grid.to_vec(),
            psi: Vec::new(),
            saturated: Vec::new(),
            slope_so_far: Vec::new(),
            prefactor: Vec::new(),
            predicted_constant: example_constant(d_a)?,
        };
        for &e in grid {
            let psi = orbit.psi(e)?;
            est.psi.push(psi);
            est.saturated.push(orbit.saturated(e)?);
            est.prefactor.push(psi as f64 * e.powi(10));
            est.slope_so_far.push(fit_points(&est.epsilons[..est.psi.len()], &est.psi, &est.saturated).ok());
        }
        Ok(est)
    }
}

fn fit_points(eps: &[f64], psi: &[usize], sat: &[bool]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = eps
        .iter()
        .zip(psi)
        .zip(sat)
        .filter(|((_, &p), &s)| s && p > 0)
        .map(|((&e, &p), _)| ((1.0 / e).ln(), (p as f64).ln()))
        .collect();
    if pts.len() < 3 {
        return Err(Error::Insufficient(format!("{} saturated grid points; at least 3 are needed", pts.len())));
    }
    least_squares_slope(&pts)
}

/// Slope of `ln ψ` against `ln(1/ε)` over the saturated grid points.
pub fn exponent_fit(est: &CountEstimate) -> Result<f64> {
    fit_points(&est.epsilons, &est.psi, &est.saturated)
}

fn prod_over_primes(order: &OrderSpec, f: impl Fn(f64) -> f64) -> f64 {
    order.ramified_primes().into_iter().map(|p| f(p as f64)).product()
}

fn order_for(d_a: i64) -> Result<OrderSpec> {
    if d_a != 2 {
        return Err(contract("only the Hurwitz order (discriminant 2) is available"));
    }
    Ok(OrderSpec::hurwitz())
}

/// Inputs of the general asymptotic counting constant.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingInputs {
    pub d_a: i64,
    /// Covolume of the stabiliser of the seed chain's geodesic line.
    pub covol: f64,
    /// Order of the pointwise stabiliser of that line.
    pub m_c0: f64,
    pub m_a: f64,
    pub units: f64,
    /// `[PU_q(O)_∞ : G_∞]`.
    pub cusp_index: f64,
    /// `[PU_q(O) : G]`.
    pub index: f64,
    /// Primes dividing `d_a`.
    pub primes: Vec<i64>,
}

impl CountingInputs {
    /// The full group `PU_q(O)` with the standard vertical seed.
    pub fn full_group(d_a: i64) -> Result<Self> {
        let o = order_for(d_a)?;
        Ok(CountingInputs {
            d_a,
            covol: covol_c0(d_a)?,
            m_c0: o.units.len() as f64,
            m_a: o.m_a as f64,
            units: o.units.len() as f64,
            cusp_index: 1.0,
            index: 1.0,
            primes: o.ramified_primes(),
        })
    }

    fn prime_product(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.primes.iter().map(|&p| f(p as f64)).product()
    }
}

/// Asymptotic constant `c` in `ψ(ε) ~ c ε⁻¹⁰` for a finite index subgroup.
pub fn counting_constant(x: &CountingInputs) -> f64 {
    let d2 = (x.d_a * x.d_a) as f64;
    let num = 25515.0 * 2f64.powi(23) * d2 * x.covol * x.cusp_index;
    let den = PI.powi(6)
        * x.m_c0
        * x.m_a
        * x.units.powi(2)
        * x.prime_product(|p| (p - 1.0) * (p * p + 1.0) * (p.powi(3) - 1.0))
        * x.index;
    num / den
}

/// The specialisation to `PU_q(O)` and the standard vertical chain:
/// `189·2²⁰·D² / (π⁴ m_A |O×|³ ∏(p³ − 1))`.
pub fn example_constant(d_a: i64) -> Result<f64> {
    let o = order_for(d_a)?;
    let u = o.units.len() as f64;
    let d2 = (d_a * d_a) as f64;
    Ok(189.0 * 2f64.powi(20) * d2 / (PI.powi(4) * o.m_a as f64 * u.powi(3) * prod_over_primes(&o, |p| p.powi(3) - 1.0)))
}

/// Covolume of the stabiliser of the geodesic line of the standard vertical
/// chain: `π²/1080 ∏(p − 1)(p² + 1)`.
pub fn covol_c0(d_a: i64) -> Result<f64> {
    let o = order_for(d_a)?;
    Ok(PI * PI / 1080.0 * prod_over_primes(&o, |p| (p - 1.0) * (p * p + 1.0)))
}

/// Factor turning the weighted count of chain centers into Haar measure:
/// `π⁴ m_A |O×| ∏(p³ − 1) / (189·2²¹)`.
pub fn equidistribution_normalisation(d_a: i64) -> Result<f64> {
    let o = order_for(d_a)?;
    Ok(PI.powi(4) * o.m_a as f64 * o.units.len() as f64 * prod_over_primes(&o, |p| p.powi(3) - 1.0) / (189.0 * 2f64.powi(21)))
}

/// `Vol(PU_q(O) \ H²_H) = π⁴ m_A / (42525·2¹³) ∏(p−1)(p²+1)(p³−1)`.
pub fn lattice_volume(d_a: i64) -> Result<f64> {
    let o = order_for(d_a)?;
    Ok(PI.powi(4) * o.m_a as f64 / (42525.0 * 2f64.powi(13))
        * prod_over_primes(&o, |p| (p - 1.0) * (p * p + 1.0) * (p.powi(3) - 1.0)))
}

/// Volume of the cusp neighbourhood quotient: `D² [PU_q(O)_∞ : G_∞] / (160 |O×|²)`.
pub fn cusp_volume(d_a: i64, cusp_index: f64) -> Result<f64> {
    let o = order_for(d_a)?;
    Ok((d_a * d_a) as f64 * cusp_index / (160.0 * (o.units.len() as f64).powi(2)))
}

/// Volume of the quotient of the seed's geodesic line, of curvature `−4`.
pub fn geodesic_line_volume(covol: f64) -> f64 {
    16.0 * covol
}

/// The constant `c(D⁻, D⁺)` of the common perpendicular count from the cusp
/// horoball to the orbit of the seed's geodesic line, assembled from the
/// ingredient volumes: `2(n−1)(2n−1)/(π² m⁺) · Vol(D⁻) Vol(D⁺) / Vol(Γ\H)`
/// with `n = 2`.
pub fn perpendicular_constant(x: &CountingInputs) -> Result<f64> {
    let n = 2.0;
    let vol_minus = cusp_volume(x.d_a, x.cusp_index)?;
    let vol_plus = geodesic_line_volume(x.covol);
    let vol = x.index * lattice_volume(x.d_a)?;
    Ok(2.0 * (n - 1.0) * (2.0 * n - 1.0) / (PI * PI * x.m_c0) * vol_minus * vol_plus / vol)
}
