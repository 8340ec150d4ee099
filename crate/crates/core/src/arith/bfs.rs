//! Breadth-first enumeration of the orbit of a chain modulo the stabiliser
//! of `∞`.
//!
//! Classes are expanded through words in `σ` and integral translations
//! (rotations commute with `σ` and fix the seed, so they never produce new
//! classes). Only classes with diameter at least the bound are kept and
//! expanded; since for every finite integral chain some translate followed
//! by `σ` strictly lowers `n(z₂)`, each admissible class is reachable through
//! admissible classes and the saturated closure is unaffected by the pruning.

use std::collections::{HashMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering};

use num_integer::Roots;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::class::{canonical_key, ClassKey, IntPolar};
use crate::error::{contract, Error, Result};
use crate::hermitian::{Mat3, UnitaryElement};
use crate::quat::{HurwitzElement, Rational};

/// One syllable `σ T` of a word, with `T` the translation by `(ζ, u)` and
/// `w0 = (n(ζ) + u) / 2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub zeta: HurwitzElement,
    pub w0: HurwitzElement,
}

impl Step {
    /// `σ T = [[0, 0, 1], [0, 1, ζ], [1, conj ζ, w0]]`.
    pub fn matrix(&self) -> UnitaryElement<Rational> {
        let z = || HurwitzElement::ZERO.to_quat();
        let o = || HurwitzElement::ONE.to_quat();
        let m = Mat3::from_rows([
            [z(), z(), o()],
            [z(), o(), self.zeta.to_quat()],
            [o(), self.zeta.conj().to_quat(), self.w0.to_quat()],
        ]);
        UnitaryElement::new(m).expect("integral translation steps are unitary")
    }

    fn apply(&self, p: &IntPolar) -> IntPolar {
        let [z0, z, z2] = p.z;
        IntPolar::new(z2, z + self.zeta * z2, z0 + self.zeta.conj() * z + self.w0 * z2)
    }
}

/// A class discovered by the search.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitNode {
    pub key: ClassKey,
    /// Witness polar point with `q = 1`.
    pub polar: IntPolar,
    /// Number of `σ T` syllables at first discovery.
    pub depth: u32,
    pub parent: Option<u32>,
    pub step: Option<Step>,
}

impl OrbitNode {
    pub fn norm_z2(&self) -> i64 {
        self.polar.norm_z2()
    }
}

#[derive(Clone, Debug)]
pub struct OrbitOptions {
    pub max_depth: u32,
    /// Smallest diameter kept.
    pub diam_min: f64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
    /// Abort once this many classes are stored.
    pub max_classes: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        OrbitOptions { max_depth: 12, diam_min: 0.5, workers: None, max_classes: 5_000_000 }
    }
}

/// Largest `n(z₂)` of a `q = 1` polar whose chain has diameter `≥ eps`:
/// the diameter is `2 / n(z₂)^{1/2}`. A relative slack of `1e-12` keeps
/// `eps = 2 / √N` itself admissible.
pub fn nmax_for_diameter(eps: f64) -> Result<i64> {
    if !(eps.is_finite() && eps > 0.0) {
        return Err(contract("diameter bound must be positive"));
    }
    Ok((4.0 / (eps * eps) * (1.0 + 1e-12)).floor() as i64)
}

/// Result of an orbit search.
#[derive(Clone, Debug)]
pub struct Orbit {
    pub root: IntPolar,
    pub nmax: i64,
    pub nodes: Vec<OrbitNode>,
    /// New classes per depth; index 0 is the root (0 when it is vertical).
    pub new_per_depth: Vec<usize>,
    /// The frontier emptied before the depth bound: the closure is complete.
    pub exhausted: bool,
    /// The class budget was exceeded; the result is partial.
    pub aborted: bool,
    index: HashMap<ClassKey, u32>,
}

impl Orbit {
    /// Rebuilds a search result from stored nodes, recomputing and checking
    /// every class key, parent link and per-depth count.
    pub fn from_parts(
        root: IntPolar,
        nmax: i64,
        nodes: Vec<OrbitNode>,
        new_per_depth: Vec<usize>,
        exhausted: bool,
        aborted: bool,
    ) -> Result<Orbit> {
        let keys: Vec<ClassKey> = nodes.par_iter().map(|n| canonical_key(&n.polar)).collect::<Result<_>>()?;
        let mut index = HashMap::with_capacity(nodes.len());
        let mut per_depth = vec![0usize; new_per_depth.len()];
        for (i, (node, key)) in nodes.iter().zip(&keys).enumerate() {
            if node.key != *key || node.polar.q() != 1 {
                return Err(contract(format!("stored node {i} does not match its polar point")));
            }
            if node.parent.is_some_and(|p| p as usize >= i) || node.norm_z2() > nmax {
                return Err(contract(format!("stored node {i} has an invalid parent or exceeds the bound")));
            }
            if index.insert(*key, i as u32).is_some() {
                return Err(contract(format!("stored node {i} repeats a class")));
            }
            *per_depth.get_mut(node.depth as usize).ok_or_else(|| contract("node deeper than the recorded levels"))? += 1;
        }
        if per_depth != new_per_depth {
            return Err(contract("per-depth counts do not match the stored nodes"));
        }
        Ok(Orbit { root, nmax, nodes, new_per_depth, exhausted, aborted, index })
    }

    pub fn root_is_vertical(&self) -> bool {
        self.root.norm_z2() == 0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, key: &ClassKey) -> Option<&OrbitNode> {
        self.index.get(key).map(|&i| &self.nodes[i as usize])
    }

    pub fn contains(&self, key: &ClassKey) -> bool {
        self.index.contains_key(key)
    }

    /// Deepest completed level.
    pub fn depth_reached(&self) -> u32 {
        self.new_per_depth.len().saturating_sub(1) as u32
    }

    /// `ψ(ε)`: classes with diameter `≥ eps`.
    pub fn psi(&self, eps: f64) -> Result<usize> {
        self.psi_up_to_depth(eps, u32::MAX)
    }

    pub fn psi_up_to_depth(&self, eps: f64, depth: u32) -> Result<usize> {
        let n = nmax_for_diameter(eps)?;
        Ok(self.nodes.iter().filter(|c| c.depth <= depth && c.norm_z2() <= n).count())
    }

    /// Whether the count at `eps` is final: the closure is exhausted, or the
    /// last completed level added nothing at this diameter. Counts below the
    /// search bound are never saturated.
    pub fn saturated(&self, eps: f64) -> Result<bool> {
        if self.aborted || nmax_for_diameter(eps)? > self.nmax {
            return Ok(false);
        }
        if self.exhausted {
            return Ok(true);
        }
        let d = self.depth_reached();
        if d == 0 {
            return Ok(false);
        }
        Ok(self.psi_up_to_depth(eps, d - 1)? == self.psi(eps)?)
    }

    /// The word `σT_d ⋯ σT_1` that carries the root polar to the witness of
    /// node `idx`.
    pub fn word(&self, idx: usize) -> UnitaryElement<Rational> {
        let mut steps = Vec::new();
        let mut cur = Some(idx as u32);
        while let Some(i) = cur {
            let n = &self.nodes[i as usize];
            if let Some(s) = n.step {
                steps.push(s);
            }
            cur = n.parent;
        }
        steps.iter().fold(UnitaryElement::identity(), |acc, s| acc.compose(&s.matrix()))
    }
}

/// Integers `t ≡ parity (mod 2)` with `|n t + c| ≤ r`.
fn parity_range(c: i64, n: i64, r: i64, parity: i64) -> impl Iterator<Item = i64> {
    let lo = num_integer::Integer::div_ceil(&(-r - c), &n);
    let hi = num_integer::Integer::div_floor(&(r - c), &n);
    let lo = if (lo - parity).rem_euclid(2) == 0 { lo } else { lo + 1 };
    (lo..=hi).step_by(2)
}

/// Children `σ T p` of a finite `q = 1` polar with `1 ≤ n(z₂') ≤ nmax`.
///
/// With `N = n(z₂)`, center `c` and `s = t·c`, the child has
/// `n(z₂') = N·n(w₀(s) − 1/(2N))`, so in center numerators `Z' = 2N ζ(s)`,
/// `U' = N u(s)` the condition reads
/// `(|Z'|² − 4N)² + 16N²|U'|² ≤ 64 N³ nmax`.
fn finite_children(p: &IntPolar, nmax: i64) -> Vec<(IntPolar, Step)> {
    let n = p.norm_z2();
    let (zn, un) = p.center_numerators();
    let n128 = n as i128;
    let budget = 64 * n128 * n128 * n128 * nmax as i128;
    let s_max = 4 * n128 + budget.sqrt();
    let r0 = s_max.sqrt() as i64;
    let mut out = Vec::new();
    for par in 0..2 {
        for t0 in parity_range(zn[0], n, r0, par) {
            let a0 = (n * t0 + zn[0]) as i128;
            let s0 = a0 * a0;
            for t1 in parity_range(zn[1], n, (s_max - s0).sqrt() as i64, par) {
                let a1 = (n * t1 + zn[1]) as i128;
                let s1 = s0 + a1 * a1;
                for t2 in parity_range(zn[2], n, (s_max - s1).sqrt() as i64, par) {
                    let a2 = (n * t2 + zn[2]) as i128;
                    let s2 = s1 + a2 * a2;
                    for t3 in parity_range(zn[3], n, (s_max - s2).sqrt() as i64, par) {
                        let a3 = (n * t3 + zn[3]) as i128;
                        let s = s2 + a3 * a3;
                        let dev = s - 4 * n128;
                        if dev * dev > budget {
                            continue;
                        }
                        let t = [t0, t1, t2, t3];
                        push_vertical_choices(p, &t, &un, &zn, n, budget - dev * dev, nmax, &mut out);
                    }
                }
            }
        }
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn push_vertical_choices(
    p: &IntPolar,
    t: &[i64; 4],
    un: &[i64; 3],
    zn: &[i64; 4],
    n: i64,
    rem: i128,
    nmax: i64,
    out: &mut Vec<(IntPolar, Step)>,
) {
    let n128 = n as i128;
    let u_max = rem / (16 * n128 * n128);
    let h = crate::quat::hurwitz_hamilton(&[t[0], -t[1], -t[2], -t[3]], zn);
    let base = [un[0] + h[1] / 2, un[1] + h[2] / 2, un[2] + h[3] / 2];
    let norm_t = t.iter().map(|x| x * x).sum::<i64>() / 4;
    let par = norm_t.rem_euclid(2);
    let zeta = HurwitzElement::from_doubled(*t).expect("parity checked");
    for u0 in parity_range(base[0], n, u_max.sqrt() as i64, par) {
        let b0 = (n * u0 + base[0]) as i128;
        let r1 = u_max - b0 * b0;
        for u1 in parity_range(base[1], n, r1.sqrt() as i64, par) {
            let b1 = (n * u1 + base[1]) as i128;
            let r2 = r1 - b1 * b1;
            for u2 in parity_range(base[2], n, r2.sqrt() as i64, par) {
                let w0 = HurwitzElement::from_doubled([norm_t, u0, u1, u2]).expect("parity checked");
                let step = Step { zeta, w0 };
                let child = step.apply(p);
                let m = child.norm_z2();
                if (1..=nmax).contains(&m) {
                    out.push((child, step));
                }
            }
        }
    }
}

/// Children of the vertical polar `[0 : v : 0]` with `v` a unit: `σ T`
/// gives `[0 : v : conj(ζ) v]`, whose vertical part is irrelevant.
fn vertical_children(p: &IntPolar, nmax: i64) -> Vec<(IntPolar, Step)> {
    let r = (4 * nmax).sqrt();
    let mut out = Vec::new();
    for par in 0..2 {
        for t0 in parity_range(0, 1, r, par) {
            for t1 in parity_range(0, 1, (4 * nmax - t0 * t0).sqrt(), par) {
                let s1 = t0 * t0 + t1 * t1;
                for t2 in parity_range(0, 1, (4 * nmax - s1).sqrt(), par) {
                    let s2 = s1 + t2 * t2;
                    for t3 in parity_range(0, 1, (4 * nmax - s2).sqrt(), par) {
                        let t = [t0, t1, t2, t3];
                        if t == [0; 4] {
                            continue;
                        }
                        let zeta = HurwitzElement::from_doubled(t).expect("parity checked");
                        let norm = zeta.norm();
                        let w0 = HurwitzElement::from_doubled([norm, norm % 2, norm % 2, norm % 2]).expect("parity");
                        let step = Step { zeta, w0 };
                        out.push((step.apply(p), step));
                    }
                }
            }
        }
    }
    out
}

fn children(p: &IntPolar, nmax: i64) -> Vec<(IntPolar, Step)> {
    if p.norm_z2() == 0 {
        vertical_children(p, nmax)
    } else {
        finite_children(p, nmax)
    }
}

/// Breadth-first closure of the orbit of `root` under words in `σ` and the
/// integral translations, up to `max_depth` syllables, keeping classes of
/// diameter `≥ diam_min`. The result does not depend on the worker count.
pub fn bfs_orbit(root: &IntPolar, opts: &OrbitOptions) -> Result<Orbit> {
    if root.q() != 1 {
        return Err(contract("the root polar must satisfy q = 1"));
    }
    if root.norm_z2() == 0 && !(root.z[0].is_zero() && root.z[1].is_unit()) {
        return Err(contract("a vertical root must be [0 : unit : 0]"));
    }
    if opts.max_depth < 1 {
        return Err(contract("word length bound must be at least 1"));
    }
    let nmax = nmax_for_diameter(opts.diam_min)?;
    let run = || search(root, nmax, opts);
    match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Contract(e.to_string()))?
            .install(run),
        None => run(),
    }
}

fn search(root: &IntPolar, nmax: i64, opts: &OrbitOptions) -> Result<Orbit> {
    let mut orbit = Orbit {
        root: *root,
        nmax,
        nodes: Vec::new(),
        new_per_depth: vec![0],
        exhausted: false,
        aborted: false,
        index: HashMap::new(),
    };
    let mut frontier: Vec<Option<u32>> = vec![None];
    if root.norm_z2() != 0 {
        if root.norm_z2() > nmax {
            orbit.exhausted = true;
            return Ok(orbit);
        }
        let key = canonical_key(root)?;
        orbit.index.insert(key, 0);
        orbit.nodes.push(OrbitNode { key, polar: *root, depth: 0, parent: None, step: None });
        orbit.new_per_depth[0] = 1;
        frontier = vec![Some(0)];
    }
    let abort = AtomicBool::new(false);
    for depth in 1..=opts.max_depth {
        let index = &orbit.index;
        let nodes = &orbit.nodes;
        let found: Vec<Vec<(ClassKey, IntPolar, Step)>> = frontier
            .par_iter()
            .map(|parent| {
                if abort.load(Ordering::Relaxed) {
                    return Vec::new();
                }
                let polar = parent.map_or(*root, |i| nodes[i as usize].polar);
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for (child, step) in children(&polar, nmax) {
                    let key = canonical_key(&child).expect("finite q = 1 child");
                    if !index.contains_key(&key) && seen.insert(key) {
                        out.push((key, child, step));
                    }
                }
                if out.len() > opts.max_classes {
                    abort.store(true, Ordering::Relaxed);
                }
                out
            })
            .collect();
        let mut next = Vec::new();
        let mut added = 0;
        for (parent, list) in frontier.iter().zip(found) {
            for (key, polar, step) in list {
                if orbit.index.contains_key(&key) {
                    continue;
                }
                let id = orbit.nodes.len() as u32;
                orbit.index.insert(key, id);
                orbit.nodes.push(OrbitNode { key, polar, depth, parent: *parent, step: Some(step) });
                next.push(Some(id));
                added += 1;
            }
        }
        orbit.new_per_depth.push(added);
        if abort.load(Ordering::Relaxed) || orbit.nodes.len() > opts.max_classes {
            orbit.aborted = true;
            return Ok(orbit);
        }
        if next.is_empty() {
            orbit.exhausted = true;
            break;
        }
        frontier = next;
    }
    Ok(orbit)
}
