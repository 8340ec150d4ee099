//! Enumeration of all primitive integral polar points with `q = 1` up to a
//! norm bound, modulo the stabiliser of `∞`: a superset of the orbit.

use std::collections::BTreeMap;

use num_integer::Integer;

use super::class::{canonical_key, ClassKey, IntPolar};
use crate::error::{contract, Result};
use crate::quat::{hurwitz_units, HurwitzElement};

/// Coordinates in the basis `1, i, j, ω`.
pub fn to_basis(h: &HurwitzElement) -> [i64; 4] {
    let m = h.doubled();
    [(m[0] - m[3]) / 2, (m[1] - m[3]) / 2, (m[2] - m[3]) / 2, m[3]]
}

pub fn from_basis(x: &[i64; 4]) -> HurwitzElement {
    let d = x[3];
    HurwitzElement::from_doubled([2 * x[0] + d, 2 * x[1] + d, 2 * x[2] + d, d]).expect("basis coordinates are integral")
}

/// Upper triangular Hermite basis (positive diagonal) of the full-rank
/// lattice spanned by `rows` in `Zⁿ`.
pub(crate) fn hermite_basis(mut rows: Vec<Vec<i64>>, n: usize) -> Result<Vec<Vec<i64>>> {
    let mut out = Vec::with_capacity(n);
    for c in 0..n {
        loop {
            rows.retain(|r| r.iter().any(|&x| x != 0));
            let Some(pivot) = (0..rows.len()).filter(|&i| rows[i][c] != 0).min_by_key(|&i| rows[i][c].abs()) else {
                return Err(contract("lattice is not of full rank"));
            };
            let p = rows[pivot].clone();
            let mut done = true;
            for (i, r) in rows.iter_mut().enumerate() {
                if i != pivot && r[c] != 0 {
                    let q = Integer::div_floor(&r[c], &p[c]);
                    for k in c..n {
                        r[k] -= q * p[k];
                    }
                    done &= r[c] == 0;
                }
            }
            if done {
                let mut p = rows.swap_remove(pivot);
                if p[c] < 0 {
                    p.iter_mut().for_each(|x| *x = -*x);
                }
                out.push(p);
                break;
            }
        }
    }
    Ok(out)
}

/// All `x` with `0 ≤ x_k < H_kk`: coset representatives of `Zⁿ / H`.
fn box_reps(h: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut reps = vec![vec![]];
    for row in h.iter() {
        let d = row[out_index(row)];
        reps = reps
            .into_iter()
            .flat_map(|r| (0..d).map(move |v| [r.clone(), vec![v]].concat()))
            .collect();
    }
    reps
}

fn out_index(row: &[i64]) -> usize {
    row.iter().position(|&x| x != 0).expect("nonzero row")
}

/// Column reduction of a primitive-or-not integer form `f` on `Z⁴`:
/// returns `(g, U, U⁻¹)` with `f·U = (g, 0, 0, 0)`, `U` unimodular.
fn reduce_form(f: [i64; 4]) -> (i64, [[i64; 4]; 4], [[i64; 4]; 4]) {
    let mut f = f;
    let mut u = [[0i64; 4]; 4];
    let mut ui = [[0i64; 4]; 4];
    for k in 0..4 {
        u[k][k] = 1;
        ui[k][k] = 1;
    }
    while let Some(p) = (0..4).filter(|&k| f[k] != 0).min_by_key(|&k| f[k].abs()) {
        let mut done = true;
        for k in 0..4 {
            if k != p && f[k] != 0 {
                // Column k -= q·column p; the inverse adds q·row k to row p.
                let q = Integer::div_floor(&f[k], &f[p]);
                f[k] -= q * f[p];
                for r in 0..4 {
                    u[r][k] -= q * u[r][p];
                }
                for c in 0..4 {
                    ui[p][c] += q * ui[k][c];
                }
                done &= f[k] == 0;
            }
        }
        if done {
            // Move the pivot to column 0.
            f.swap(0, p);
            for r in 0..4 {
                u[r].swap(0, p);
            }
            ui.swap(0, p);
            if f[0] < 0 {
                f[0] = -f[0];
                for r in 0..4 {
                    u[r][0] = -u[r][0];
                }
                ui[0].iter_mut().for_each(|x| *x = -*x);
            }
            break;
        }
    }
    (f[0], u, ui)
}

fn mat_vec(m: &[[i64; 4]; 4], v: &[i64; 4]) -> [i64; 4] {
    std::array::from_fn(|r| (0..4).map(|c| m[r][c] * v[c]).sum())
}

/// `z₂` with `1 ≤ n(z₂) ≤ bound`, one per orbit of `z₂ ↦ μ z₂ ε` over unit pairs.
fn z2_representatives(bound: i64) -> Vec<HurwitzElement> {
    let r = num_integer::Roots::sqrt(&(4 * bound));
    let all_units = hurwitz_units();
    let mut out = Vec::new();
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                for d in -r..=r {
                    let Ok(z) = HurwitzElement::from_doubled([a, b, c, d]) else { continue };
                    let n = z.norm();
                    if n < 1 || n > bound {
                        continue;
                    }
                    let minimal = all_units.iter().all(|m| all_units.iter().all(|e| *m * z * *e >= z));
                    if minimal {
                        out.push(z);
                    }
                }
            }
        }
    }
    out
}

/// Classes of all primitive integral polars `(z₀, z, z₂)` with `q = 1` and
/// `1 ≤ n(z₂) ≤ norm_bound`, with a witness polar for each.
///
/// Representatives: `z₂` up to two-sided units, `z` over `O / O z₂`, and
/// `z₀` over the solutions of `tr(conj(z₀) z₂) = n(z) − 1` modulo
/// `(Zi + Zj + Zk) z₂`. Vertical integral chains are all equivalent to the
/// standard one and are not listed.
pub fn enumerate_integral_polars(norm_bound: i64) -> Result<BTreeMap<ClassKey, IntPolar>> {
    if norm_bound < 1 {
        return Err(contract("norm bound must be at least 1"));
    }
    let basis = [HurwitzElement::ONE, HurwitzElement::I, HurwitzElement::J, HurwitzElement::OMEGA];
    let imaginary = [HurwitzElement::I, HurwitzElement::J, HurwitzElement::K];
    let mut out = BTreeMap::new();
    for z2 in z2_representatives(norm_bound) {
        let ideal: Vec<Vec<i64>> = basis.iter().map(|e| to_basis(&(*e * z2)).to_vec()).collect();
        let z_reps = box_reps(&hermite_basis(ideal, 4)?);
        let f: [i64; 4] = std::array::from_fn(|k| (basis[k].conj() * z2).trace());
        let (g, u, ui) = reduce_form(f);
        // Translations fixing z shift z₀ by (Zi + Zj + Zk) z₂, inside ker f.
        let shifts: Vec<Vec<i64>> = imaginary
            .iter()
            .map(|v| {
                let y = mat_vec(&ui, &to_basis(&(*v * z2)));
                debug_assert_eq!(y[0], 0);
                y[1..].to_vec()
            })
            .collect();
        let z0_reps = box_reps(&hermite_basis(shifts, 3)?);
        for zr in &z_reps {
            let z = from_basis(&[zr[0], zr[1], zr[2], zr[3]]);
            let m = z.norm() - 1;
            if m % g != 0 {
                continue;
            }
            for y in &z0_reps {
                let coeffs = [m / g, y[0], y[1], y[2]];
                let x = mat_vec(&u, &coeffs);
                let z0 = from_basis(&x);
                let p = IntPolar::new(z0, z, z2);
                debug_assert_eq!(p.q(), 1);
                out.entry(canonical_key(&p)?).or_insert(p);
            }
        }
    }
    Ok(out)
}
