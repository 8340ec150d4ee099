//! The invariant suite behind `verify`: named groups of checks across all
//! modules, each reporting a witness on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::arith::{
    bfs_orbit, canonical_class, canonical_key, count, covol_c0, counting_constant, enumerate_integral_polars,
    example_constant, generators, rotations, CountingInputs, IntPolar, OrbitOptions,
};
use crate::chain::{
    center_by_reflexion, chain_from_polar, ellipsoid_point, orthogonal, reflexion, reflexion_by_normal_form, Chain,
};
use crate::heis::{
    cygan_dist, heis_inv, heis_mul, lattice_covolume, mod_cygan_dist, HeisMap, HeisPoint,
};
use crate::hermitian::{act, classify, is_unitary, phi_form, HVector, Mat3, ProjectivePoint, UnitaryElement};
use crate::quat::{hurwitz_units, is_in_order, rat, HurwitzElement, Quat, QuatQ, Rational};
use crate::siegel::{dist_horoball_to_geodesic, dist_horoball_to_geodesic_by_height, max_height, BoundaryPoint};

/// A group law on `Heis₇`, injectable so that the suite can be run against
/// a deliberately broken law.
pub type GroupLaw = fn(&HeisPoint<f64>, &HeisPoint<f64>) -> HeisPoint<f64>;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Trials of each sampled float check.
    pub samples: usize,
    /// Law used to translate points in the left-invariance group.
    pub law: GroupLaw,
}

impl VerifyOptions {
    pub fn new(seed: u64, samples: usize) -> Self {
        VerifyOptions { seed, samples, law: heis_mul::<f64> }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupOutcome {
    pub module: String,
    pub name: String,
    pub passed: bool,
    /// Individual checks performed.
    pub checks: usize,
    /// Witness of the first failure.
    pub witness: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub passed: usize,
    pub failed: usize,
    pub groups: Vec<GroupOutcome>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    pub fn group(&self, name: &str) -> Option<&GroupOutcome> {
        self.groups.iter().find(|g| g.name == name)
    }
}

type Check = std::result::Result<usize, String>;

fn ensure(cond: bool, witness: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(witness())
    }
}

fn rand_point(rng: &mut ChaCha8Rng) -> HeisPoint<f64> {
    HeisPoint::from_coords(std::array::from_fn(|_| rng.gen_range(-2.0..2.0)))
}

fn rand_unit(rng: &mut ChaCha8Rng) -> Quat {
    loop {
        let q = Quat::from_array(std::array::from_fn(|_| StandardNormal.sample(rng)));
        let n = q.abs_f64();
        if n > 1e-6 {
            return q.scale(&(1.0 / n));
        }
    }
}

fn rand_rational(rng: &mut ChaCha8Rng) -> QuatQ {
    QuatQ::from_ratios(std::array::from_fn(|_| (rng.gen_range(-6..=6), rng.gen_range(1..=4))))
}

fn rand_hurwitz(rng: &mut ChaCha8Rng, r: i64) -> HurwitzElement {
    let p = rng.gen_range(0..2);
    HurwitzElement::from_doubled(std::array::from_fn(|_| 2 * rng.gen_range(-r..=r) + p)).expect("equal parity")
}

fn rand_rational_chain(rng: &mut ChaCha8Rng) -> Chain<Rational> {
    let center = HeisPoint::new(rand_rational(rng), rand_rational(rng).im()).expect("imaginary u");
    Chain::finite(&center, rat(rng.gen_range(1..9), rng.gen_range(1..5))).expect("positive radius")
}

fn rand_vec(rng: &mut ChaCha8Rng) -> HVector<Rational> {
    HVector::new(rand_rational(rng), rand_rational(rng), rand_rational(rng))
}

fn quaternion_groups(s: &mut Suite) {
    s.run("quat-core", "hurwitz_units_24", |_| {
        let units = hurwitz_units();
        ensure(units.len() == 24, || format!("{} units", units.len()))?;
        for a in &units {
            ensure(a.norm() == 1, || format!("{a} has norm {}", a.norm()))?;
            let inv = a.unit_inverse().ok_or_else(|| format!("{a} has no inverse"))?;
            ensure(units.contains(&inv) && *a * inv == HurwitzElement::ONE, || format!("inverse of {a}"))?;
            for b in &units {
                ensure(units.contains(&(*a * *b)), || format!("{a}·{b} is not a unit"))?;
            }
        }
        Ok(24 * 25)
    });
    s.run("quat-core", "norm_multiplicative_exact", |rng| {
        for _ in 0..200 {
            let (a, b) = (rand_rational(rng), rand_rational(rng));
            ensure((&a * &b).norm() == a.norm() * b.norm(), || format!("a = {a}, b = {b}"))?;
        }
        Ok(200)
    });
    s.run("quat-core", "conjugation_anti_automorphism", |rng| {
        for _ in 0..200 {
            let (a, b) = (rand_rational(rng), rand_rational(rng));
            ensure((&a * &b).conj() == &b.conj() * &a.conj(), || format!("a = {a}, b = {b}"))?;
        }
        Ok(200)
    });
    s.run("quat-core", "float_matches_exact", |rng| {
        for _ in 0..200 {
            let (a, b) = (rand_rational(rng), rand_rational(rng));
            let err = (&a * &b).to_f64().max_abs_diff(&(&a.to_f64() * &b.to_f64()));
            ensure(err < 1e-12, || format!("a = {a}, b = {b}, error {err:e}"))?;
        }
        Ok(200)
    });
    s.run("quat-core", "hurwitz_order_closed", |rng| {
        for _ in 0..500 {
            let (a, b) = (rand_hurwitz(rng, 4), rand_hurwitz(rng, 4));
            let p = a.to_quat::<Rational>() * b.to_quat();
            ensure(is_in_order(&p) && (a * b).to_quat::<Rational>() == p, || format!("a = {a}, b = {b}"))?;
        }
        Ok(500)
    });
}

fn hermitian_groups(s: &mut Suite) {
    s.run("hermitian-projective", "phi_hermitian", |rng| {
        for _ in 0..200 {
            let (v, w) = (rand_vec(rng), rand_vec(rng));
            ensure(phi_form(&v, &w) == phi_form(&w, &v).conj(), || format!("v = {v:?}, w = {w:?}"))?;
        }
        Ok(200)
    });
    s.run("hermitian-projective", "generators_preserve_j_exactly", |_| {
        let gens = generators();
        for (i, g) in gens.iter().enumerate() {
            ensure(is_unitary(g.matrix()), || format!("generator {i}: {:?}", g.matrix()))?;
        }
        Ok(gens.len())
    });
    s.run("hermitian-projective", "phi_invariant_under_generator_words", |rng| {
        let gens = generators();
        for _ in 0..100 {
            let len = rng.gen_range(1..=6);
            let word = (0..len).fold(UnitaryElement::identity(), |acc, _| acc.compose(&gens[rng.gen_range(0..gens.len())]));
            let (v, w) = (rand_vec(rng), rand_vec(rng));
            let (gv, gw) = (word.matrix().apply(&v), word.matrix().apply(&w));
            ensure(phi_form(&gv, &gw) == phi_form(&v, &w), || format!("word of length {len}, v = {v:?}"))?;
        }
        Ok(100)
    });
    s.run("hermitian-projective", "classification_invariant_under_scaling", |rng| {
        for _ in 0..200 {
            let v = rand_vec(rng);
            let l = rand_rational(rng);
            if v.is_zero() || l.is_zero() {
                continue;
            }
            let (p, q) = (ProjectivePoint::new(v.clone()), ProjectivePoint::new(v.right_scale(&l)));
            let (p, q) = (p.map_err(|e| e.to_string())?, q.map_err(|e| e.to_string())?);
            ensure(classify(&p) == classify(&q) && p.same_point(&q), || format!("v = {v:?}, λ = {l}"))?;
        }
        Ok(200)
    });
    s.run("hermitian-projective", "sigma_is_an_involution", |_| {
        let sigma = UnitaryElement::<Rational>::sigma();
        ensure(sigma.compose(&sigma).matrix() == &Mat3::identity(), || "σ² ≠ 1".into())?;
        Ok(1)
    });
}

fn heis_groups(s: &mut Suite, law: GroupLaw) {
    s.run("heis-metric", "group_axioms_exact", |rng| {
        for _ in 0..200 {
            let p = |rng: &mut ChaCha8Rng| HeisPoint::new(rand_rational(rng), rand_rational(rng).im()).expect("imaginary");
            let (a, b, c) = (p(rng), p(rng), p(rng));
            ensure(heis_mul(&heis_mul(&a, &b), &c) == heis_mul(&a, &heis_mul(&b, &c)), || format!("a = {a:?}"))?;
            ensure(heis_mul(&a, &heis_inv(&a)) == HeisPoint::identity(), || format!("a = {a:?}"))?;
        }
        Ok(400)
    });
    s.run("heis-metric", "left_invariance", |rng| {
        let mut checks = 0;
        for _ in 0..1000 {
            let (a, b, g) = (rand_point(rng), rand_point(rng), rand_point(rng));
            let drift = (cygan_dist(&law(&g, &a), &law(&g, &b)) - cygan_dist(&a, &b)).abs();
            let drift_mod = (mod_cygan_dist(&law(&g, &a), &law(&g, &b)) - mod_cygan_dist(&a, &b)).abs();
            ensure(drift <= 1e-12 && drift_mod <= 1e-12, || {
                format!("g = {:?}, a = {:?}, b = {:?}, drift {drift:e}", g.coords_f64(), a.coords_f64(), b.coords_f64())
            })?;
            checks += 2;
        }
        Ok(checks)
    });
    s.run_sampled("heis-metric", "metric_sandwich", |rng, n| {
        let s2 = 0.5f64.sqrt();
        for _ in 0..n {
            let (a, b) = (rand_point(rng), rand_point(rng));
            let (d, dd) = (cygan_dist(&a, &b), mod_cygan_dist(&a, &b));
            ensure(s2 * d <= dd + 1e-12 && dd <= d + 1e-12, || format!("a = {:?}, d = {d}, d'' = {dd}", a.coords_f64()))?;
        }
        Ok(n)
    });
    s.run_sampled("heis-metric", "triangle_inequality", |rng, n| {
        for _ in 0..n {
            let (a, b, c) = (rand_point(rng), rand_point(rng), rand_point(rng));
            let slack = cygan_dist(&a, &b) + cygan_dist(&b, &c) - cygan_dist(&a, &c);
            ensure(slack >= -1e-12, || format!("a = {:?}, excess {:e}", a.coords_f64(), -slack))?;
        }
        Ok(n)
    });
    s.run("heis-metric", "rotations_and_dilations", |rng| {
        for _ in 0..1000 {
            let (a, b) = (rand_point(rng), rand_point(rng));
            let d = cygan_dist(&a, &b);
            let lambda = rng.gen_range(0.1..5.0);
            let maps = [
                HeisMap::rotation(rand_unit(rng), rand_unit(rng)).map_err(|e| e.to_string())?,
                HeisMap::dilation(lambda).map_err(|e| e.to_string())?,
            ];
            for m in &maps {
                let ratio = cygan_dist(&m.apply(&a), &m.apply(&b)) / d;
                ensure((ratio - m.ratio()).abs() <= 1e-12 * m.ratio().max(1.0), || format!("{m:?}: ratio {ratio}"))?;
            }
        }
        Ok(2000)
    });
    s.run("heis-metric", "translation_matrices_match_group_law", |rng| {
        for _ in 0..100 {
            let p = |rng: &mut ChaCha8Rng| HeisPoint::new(rand_rational(rng), rand_rational(rng).im()).expect("imaginary");
            let (t, x) = (p(rng), p(rng));
            let image = act(&HeisMap::translation(t.clone()).matrix(), &x.to_projective());
            ensure(image.same_point(&heis_mul(&t, &x).to_projective()), || format!("t = {t:?}, x = {x:?}"))?;
        }
        Ok(100)
    });
    s.run("heis-metric", "hurwitz_lattice_covolume", |_| {
        let c = lattice_covolume();
        ensure(c == rat(4, 1), || format!("covolume {c}"))?;
        Ok(1)
    });
}

fn siegel_groups(s: &mut Suite) {
    s.run_sampled("siegel-geometry", "height_maximum_is_half_mod_cygan_square", |rng, n| {
        let n = n.min(2000);
        for _ in 0..n {
            let (x, y) = (rand_point(rng), rand_point(rng));
            let dd = mod_cygan_dist(&x, &y);
            let (_, s_max) = max_height(&heis_mul(&heis_inv(&y), &x)).map_err(|e| e.to_string())?;
            ensure((s_max - dd * dd / 2.0).abs() < 1e-9, || format!("x = {:?}, s_max {s_max}, d'' {dd}", x.coords_f64()))?;
        }
        Ok(n)
    });
    s.run_sampled("siegel-geometry", "horoball_distance_two_routes", |rng, n| {
        let n = n.min(2000);
        for _ in 0..n {
            let (x, y) = (rand_point(rng), rand_point(rng));
            let closed = dist_horoball_to_geodesic(&BoundaryPoint::Finite(x.clone()), &BoundaryPoint::Finite(y.clone()))
                .map_err(|e| e.to_string())?;
            let by_height = dist_horoball_to_geodesic_by_height(&x, &y).map_err(|e| e.to_string())?;
            ensure((closed.value - by_height).abs() < 1e-9, || format!("x = {:?}: {} vs {by_height}", x.coords_f64(), closed.value))?;
        }
        Ok(n)
    });
}

fn chain_groups(s: &mut Suite) {
    s.run("chain-geometry", "reflexion_exact_involution", |rng| {
        for _ in 0..100 {
            let c = rand_rational_chain(rng);
            let r = reflexion(&c);
            ensure(r.compose(&r).matrix().eq_projective(&Mat3::identity()), || format!("chain {:?}", c.polar()))?;
        }
        Ok(100)
    });
    s.run("chain-geometry", "reflexion_two_routes", |rng| {
        for _ in 0..100 {
            let c = rand_rational_chain(rng);
            ensure(reflexion(&c).eq_projective(&reflexion_by_normal_form(&c)), || format!("chain {:?}", c.polar()))?;
        }
        Ok(100)
    });
    s.run("chain-geometry", "center_is_reflexion_of_infinity", |rng| {
        for _ in 0..100 {
            let c = rand_rational_chain(rng);
            let via = center_by_reflexion(&c).map_err(|e| e.to_string())?;
            ensure(via == c.center(), || format!("chain {:?}", c.polar()))?;
        }
        Ok(100)
    });
    s.run("chain-geometry", "center_translation_equivariance", |rng| {
        for _ in 0..100 {
            let c = rand_rational_chain(rng);
            let t = HeisPoint::new(rand_rational(rng), rand_rational(rng).im()).expect("imaginary");
            let moved = c.transform(&HeisMap::translation(t.clone()).matrix()).map_err(|e| e.to_string())?;
            let BoundaryPoint::Finite(center) = c.center() else { return Err("finite chain without center".into()) };
            ensure(moved.center() == BoundaryPoint::Finite(heis_mul(&t, &center)), || format!("t = {t:?}"))?;
        }
        Ok(100)
    });
    s.run("chain-geometry", "ellipsoid_points_lie_on_the_chain", |rng| {
        let mut checks = 0;
        for _ in 0..20 {
            let c = rand_rational_chain(rng).to_f64();
            for _ in 0..50 {
                let p = ellipsoid_point(&c, &rand_unit(rng)).map_err(|e| e.to_string())?;
                let res = c.membership_residual(&p);
                ensure(res < 1e-9, || format!("chain {:?}, residual {res:e}", c.polar()))?;
                checks += 1;
            }
        }
        Ok(checks)
    });
    s.run("chain-geometry", "diameter_bounds_sampled_pairs", |rng| {
        let mut checks = 0;
        for _ in 0..20 {
            let c = rand_rational_chain(rng).to_f64();
            let diam = c.diameter_cygan();
            let r = c.radius().ok_or("finite chain without radius")?;
            ensure((diam - 2.0 * r).abs() < 1e-12, || format!("diameter {diam}, radius {r}"))?;
            ensure((diam - 2f64.sqrt() * c.diameter_mod_cygan()).abs() < 1e-12, || format!("diameter {diam}"))?;
            for _ in 0..200 {
                let s = rand_unit(rng);
                let (a, b) = (ellipsoid_point(&c, &s).map_err(|e| e.to_string())?, ellipsoid_point(&c, &rand_unit(rng)).map_err(|e| e.to_string())?);
                ensure(cygan_dist(&a, &b) <= diam + 1e-9, || format!("pair at distance {} > {diam}", cygan_dist(&a, &b)))?;
                let antipode = ellipsoid_point(&c, &-&s).map_err(|e| e.to_string())?;
                ensure((cygan_dist(&a, &antipode) - diam).abs() < 1e-9, || format!("antipodal distance {}", cygan_dist(&a, &antipode)))?;
                checks += 2;
            }
        }
        Ok(checks)
    });
    s.run("chain-geometry", "orthogonality_symmetric", |rng| {
        let mut checks = 0;
        for _ in 0..100 {
            let (a, b) = (rand_rational_chain(rng), rand_rational_chain(rng));
            if a.polar().same_point(b.polar()) {
                continue;
            }
            let (ab, ba) = (orthogonal(&a, &b).map_err(|e| e.to_string())?, orthogonal(&b, &a).map_err(|e| e.to_string())?);
            ensure(ab == ba, || format!("a = {:?}, b = {:?}", a.polar(), b.polar()))?;
            checks += 1;
        }
        let v = Chain::<Rational>::standard_vertical();
        let unit = chain_from_polar(&ProjectivePoint::new(HVector::new(QuatQ::real(rat(-1, 2)), QuatQ::zero(), QuatQ::one())).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        ensure(orthogonal(&v, &unit).map_err(|e| e.to_string())?, || "vertical chain and unit sphere".into())?;
        Ok(checks + 1)
    });
}

fn arith_groups(s: &mut Suite) {
    s.run("arithmetic-orbit", "class_key_invariance", |rng| {
        let rots = rotations();
        let lattice = crate::heis::HeisLattice::hurwitz();
        for _ in 0..20 {
            let c = rand_rational_chain(rng);
            let key = canonical_class(&c).map_err(|e| e.to_string())?;
            let gens = lattice.generators();
            let t = &gens[rng.gen_range(0..gens.len())];
            let r = &rots[rng.gen_range(0..rots.len())];
            let g = HeisMap::translation(t.clone())
                .matrix()
                .compose(&HeisMap::rotation(r.big_u.to_quat(), r.mu.to_quat()).map_err(|e| e.to_string())?.matrix());
            let moved = c.transform(&g).map_err(|e| e.to_string())?;
            ensure(canonical_class(&moved).map_err(|e| e.to_string())? == key, || format!("chain {:?}", c.polar()))?;
        }
        Ok(20)
    });
    s.run("arithmetic-orbit", "orbit_words_reproduce_witnesses", |_| {
        let seed = IntPolar::seed();
        let opts = OrbitOptions { max_depth: 4, diam_min: 0.7, workers: Some(1), max_classes: 100_000 };
        let orbit = bfs_orbit(&seed, &opts).map_err(|e| e.to_string())?;
        ensure(orbit.len() > 10, || format!("only {} classes", orbit.len()))?;
        for (i, node) in orbit.nodes.iter().enumerate() {
            let g = orbit.word(i);
            ensure(is_unitary(g.matrix()), || format!("word {i} is not unitary"))?;
            ensure(act(&g, &seed.to_projective()).same_point(&node.polar.to_projective()), || format!("node {i}"))?;
            ensure(canonical_key(&node.polar).map_err(|e| e.to_string())? == node.key, || format!("node {i} key"))?;
        }
        Ok(orbit.len())
    });
    s.run("arithmetic-orbit", "enumeration_contains_orbit", |_| {
        let opts = OrbitOptions { max_depth: 8, diam_min: 1.0, workers: Some(1), max_classes: 100_000 };
        let orbit = bfs_orbit(&IntPolar::seed(), &opts).map_err(|e| e.to_string())?;
        let all = enumerate_integral_polars(orbit.nmax).map_err(|e| e.to_string())?;
        for n in &orbit.nodes {
            ensure(all.contains_key(&n.key), || format!("class {:?} missing", n.key))?;
        }
        Ok(orbit.len())
    });
    s.run("arithmetic-orbit", "constant_plumbing", |_| {
        let general = counting_constant(&CountingInputs::full_group(2).map_err(|e| e.to_string())?);
        let example = example_constant(2).map_err(|e| e.to_string())?;
        ensure(((general - example) / example).abs() < 1e-12, || format!("{general} vs {example}"))?;
        let covol = covol_c0(2).map_err(|e| e.to_string())?;
        let expected = std::f64::consts::PI.powi(2) / 216.0;
        ensure(((covol - expected) / expected).abs() < 1e-12, || format!("covol {covol}"))?;
        let perp = count::perpendicular_constant(&CountingInputs::full_group(2).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        ensure(((1024.0 * perp - example) / example).abs() < 1e-12, || format!("2¹⁰ c = {}", 1024.0 * perp))?;
        Ok(3)
    });
    s.run("arithmetic-orbit", "unit_chain_is_radius_one_class", |_| {
        let c = chain_from_polar(
            &ProjectivePoint::new(HVector::new(QuatQ::real(rat(-1, 2)), QuatQ::zero(), QuatQ::one())).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
        let key = canonical_class(&c).map_err(|e| e.to_string())?;
        ensure(key.radius_sq == (1, 1) && key.zeta == [0; 4] && key.u == [0; 3], || format!("{key:?}"))?;
        ensure(key.diameter() == 2.0, || format!("diameter {}", key.diameter()))?;
        Ok(2)
    });
}

struct Suite {
    seed: u64,
    samples: usize,
    groups: Vec<GroupOutcome>,
}

impl Suite {
    fn run(&mut self, module: &str, name: &str, f: impl FnOnce(&mut ChaCha8Rng) -> Check) {
        self.run_sampled(module, name, move |rng, _| f(rng));
    }

    fn run_sampled(&mut self, module: &str, name: &str, f: impl FnOnce(&mut ChaCha8Rng, usize) -> Check) {
        // Each group draws from its own stream so adding groups leaves the
        // others unchanged.
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.groups.len() as u64);
        let samples = self.samples;
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&mut rng, samples)))
            .unwrap_or_else(|p| Err(format!("panic: {}", panic_message(&p))));
        let (passed, checks, witness) = match outcome {
            Ok(n) => (true, n, None),
            Err(w) => (false, 0, Some(w)),
        };
        self.groups.push(GroupOutcome { module: module.into(), name: name.into(), passed, checks, witness });
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>().map(|s| s.to_string()).or_else(|| p.downcast_ref::<String>().cloned()).unwrap_or_default()
}

/// Runs every invariant group.
pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let mut s = Suite { seed: opts.seed, samples: opts.samples, groups: Vec::new() };
    quaternion_groups(&mut s);
    hermitian_groups(&mut s);
    heis_groups(&mut s, opts.law);
    siegel_groups(&mut s);
    chain_groups(&mut s);
    arith_groups(&mut s);
    let passed = s.groups.iter().filter(|g| g.passed).count();
    VerifyReport { seed: opts.seed, samples: opts.samples, passed, failed: s.groups.len() - passed, groups: s.groups }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The group law with the sign of the cocycle flipped.
    fn flipped_law(a: &HeisPoint<f64>, b: &HeisPoint<f64>) -> HeisPoint<f64> {
        let t = (&a.zeta.conj() * &b.zeta).im();
        HeisPoint { zeta: &a.zeta + &b.zeta, u: &(&a.u + &b.u) - &(&t + &t) }
    }

    #[test]
    fn fresh_build_passes_every_group() {
        let report = run_verify(&VerifyOptions::new(7, 2000));
        let failed: Vec<_> = report.groups.iter().filter(|g| !g.passed).collect();
        assert!(failed.is_empty(), "{failed:?}");
        assert!(report.passed >= 25);
        assert!(report.group("hurwitz_units_24").unwrap().passed);
        let again = run_verify(&VerifyOptions::new(7, 2000));
        assert_eq!(again, report);
    }

    #[test]
    fn injected_sign_error_breaks_left_invariance() {
        let report = run_verify(&VerifyOptions { law: flipped_law, ..VerifyOptions::new(7, 2000) });
        let g = report.group("left_invariance").unwrap();
        assert!(!g.passed);
        assert!(g.witness.as_ref().unwrap().contains("drift"));
        assert_eq!(report.failed, 1);
    }
}
