//! Equidistribution statistics of reduced chain centers in a fundamental
//! domain of the Hurwitz Heisenberg lattice.
//!
//! The domain is the unit cube in the coordinates `(a, b, c, d, u/2)` with
//! `ζ = a + b i + c j + d ω`; Haar measure is Lebesgue measure there. Each
//! class carries mass 1, spread evenly over the distinct centers of the
//! chains it contains modulo translations (its rotated reduced centers).

use serde::{Deserialize, Serialize};

use super::class::ClassKey;
use super::count::{diameter_at_least, equidistribution_normalisation};
use crate::error::{contract, Error, Result};

pub const DIM: usize = 7;

/// Weighted points of `[0,1)⁷`.
pub type WeightedPoints = Vec<([f64; DIM], f64)>;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquidistStats {
    pub eps: f64,
    pub classes: usize,
    /// Distinct centers of the chains counted, modulo translations.
    pub chains: usize,
    pub bins_per_axis: usize,
    pub chi_square: f64,
    pub df: usize,
    /// Expected mass per cell is below 5.
    pub low_count: bool,
    pub discrepancy: f64,
    /// Normalised center mass; tends to the Haar measure (1) of the domain.
    pub haar_mass: f64,
    /// Mass per cell, row-major with the first axis slowest.
    pub histogram: Vec<f64>,
}

fn cell_index(x: &[f64; DIM], g: usize) -> usize {
    x.iter().fold(0, |acc, &v| acc * g + ((v * g as f64).floor() as usize).min(g - 1))
}

/// Mass of weighted points in the `g⁷` equal cells of `[0,1)⁷`.
#[derive(Clone, Debug, PartialEq)]
pub struct CellHistogram {
    g: usize,
    mass: Vec<f64>,
}

impl CellHistogram {
    pub fn new(g: usize) -> Result<Self> {
        if g < 1 {
            return Err(contract("grid resolution must be positive"));
        }
        Ok(CellHistogram { g, mass: vec![0.0; g.pow(DIM as u32)] })
    }

    pub fn add(&mut self, x: &[f64; DIM], w: f64) {
        self.mass[cell_index(x, self.g)] += w;
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn cells(&self) -> &[f64] {
        &self.mass
    }

    /// Pearson chi-square against equal expected mass per cell.
    pub fn chi_square(&self) -> Result<f64> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::Insufficient("no mass to histogram".into()));
        }
        let e = total / self.mass.len() as f64;
        Ok(self.mass.iter().map(|o| (o - e).powi(2) / e).sum())
    }

    /// Star discrepancy over boxes `[0, b)` with corners on the grid
    /// `{1/g, …, 1}⁷`: `max |mass(box)/total − vol(box)|`.
    pub fn star_discrepancy(&self) -> Result<f64> {
        let total = self.total();
        if total <= 0.0 {
            return Err(Error::Insufficient("no mass to measure".into()));
        }
        let g = self.g;
        let mut c = self.mass.clone();
        // Prefix sums along each axis turn cell masses into box masses.
        for axis in 0..DIM {
            let stride = g.pow((DIM - 1 - axis) as u32);
            for idx in 0..c.len() {
                if !(idx / stride).is_multiple_of(g) {
                    c[idx] += c[idx - stride];
                }
            }
        }
        let mut worst: f64 = 0.0;
        for (idx, m) in c.iter().enumerate() {
            let mut vol = 1.0;
            let mut rest = idx;
            for _ in 0..DIM {
                vol *= ((rest % g) + 1) as f64 / g as f64;
                rest /= g;
            }
            worst = worst.max((m / total - vol).abs());
        }
        Ok(worst)
    }
}

fn check_bins(g: usize) -> Result<()> {
    if !(2..=6).contains(&g) {
        return Err(contract("bins per axis must lie in [2, 6]"));
    }
    Ok(())
}

/// Pearson chi-square of weighted points against the uniform distribution
/// on `g⁷` equal cells; returns `(statistic, histogram)`.
pub fn chi_square_uniform(points: &[([f64; DIM], f64)], g: usize) -> Result<(f64, Vec<f64>)> {
    check_bins(g)?;
    let mut h = CellHistogram::new(g)?;
    points.iter().for_each(|(x, w)| h.add(x, *w));
    Ok((h.chi_square()?, h.mass))
}

/// Grid star discrepancy of weighted points at resolution `g`.
pub fn grid_star_discrepancy(points: &[([f64; DIM], f64)], g: usize) -> Result<f64> {
    let mut h = CellHistogram::new(g)?;
    points.iter().for_each(|(x, w)| h.add(x, *w));
    h.star_discrepancy()
}

/// Feeds the rotated reduced centers of the classes with diameter `≥ eps`
/// to `sink`, each class with total weight 1; returns `(classes, chains)`.
pub fn for_each_weighted_center<'a>(
    classes: impl IntoIterator<Item = &'a ClassKey>,
    eps: f64,
    mut sink: impl FnMut(&[f64; DIM], f64),
) -> (usize, usize) {
    let mut n_classes = 0;
    let mut chains = 0;
    for k in classes.into_iter().filter(|k| diameter_at_least(k.radius_sq, eps)) {
        let centers = k.rotated_unit_cube_coords();
        let w = 1.0 / centers.len() as f64;
        n_classes += 1;
        chains += centers.len();
        centers.iter().for_each(|x| sink(x, w));
    }
    (n_classes, chains)
}

/// Grid resolution of the star discrepancy.
pub const DISCREPANCY_GRID: usize = 4;

/// Chi-square and grid star discrepancy of the class centers with
/// diameter `≥ eps`.
pub fn equidistribution_stats<'a>(
    classes: impl IntoIterator<Item = &'a ClassKey>,
    eps: f64,
    bins_per_axis: usize,
) -> Result<EquidistStats> {
    check_bins(bins_per_axis)?;
    let mut bins = CellHistogram::new(bins_per_axis)?;
    let mut grid = CellHistogram::new(DISCREPANCY_GRID)?;
    let (n, chains) = for_each_weighted_center(classes, eps, |x, w| {
        bins.add(x, w);
        grid.add(x, w);
    });
    if n == 0 {
        return Err(Error::Insufficient(format!("no classes with diameter at least {eps}")));
    }
    let cells = bins.cells().len();
    Ok(EquidistStats {
        eps,
        classes: n,
        chains,
        bins_per_axis,
        chi_square: bins.chi_square()?,
        df: cells - 1,
        low_count: (n as f64) / (cells as f64) < 5.0,
        discrepancy: grid.star_discrepancy()?,
        haar_mass: equidistribution_normalisation(2)? * eps.powi(10) * chains as f64,
        histogram: bins.mass,
    })
}
