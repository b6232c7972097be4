//! Seeded randomized self-checks of the core invariants.

use cuspidal::ford::ceiling;
use cuspidal::group::GroupSpec;
use cuspidal::moebius::MoebiusMap;
use cuspidal::{QuadInt, RingSpec};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: usize,
}

fn quad(ring: RingSpec, rng: &mut ChaCha8Rng, r: i64) -> QuadInt {
    let y = if ring.is_modular() { 0 } else { rng.gen_range(-r..=r) };
    QuadInt::new(ring, rng.gen_range(-r..=r), y)
}

fn word(g: &GroupSpec, rng: &mut ChaCha8Rng) -> MoebiusMap {
    let gens = g.generators();
    let mut m = MoebiusMap::identity(g.ring());
    for _ in 0..rng.gen_range(0..=10) {
        let s = &gens[rng.gen_range(0..gens.len())];
        m = if rng.gen() { m.compose(s) } else { m.compose(&s.inverse()) };
    }
    m
}

fn run(name: &'static str, cases: usize, mut case: impl FnMut() -> bool) -> CheckResult {
    let failures = (0..cases).filter(|_| !case()).count();
    CheckResult { name, cases, failures }
}

/// Each battery draws `cases` samples spread over all rings.
pub fn batteries(cases: usize, seed: u64) -> Vec<CheckResult> {
    let rings: Vec<RingSpec> = RingSpec::all().collect();
    let groups: Vec<GroupSpec> = rings.iter().map(|&r| GroupSpec::new(r).expect("supported")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    out.push(run("norm_is_multiplicative", cases, || {
        let ring = rings[rng.gen_range(0..rings.len())];
        let (a, b) = (quad(ring, &mut rng, 1 << 20), quad(ring, &mut rng, 1 << 20));
        (&a * &b).norm() == a.norm() * b.norm()
    }));
    out.push(run("division_shrinks_norm", cases, || {
        let ring = rings[rng.gen_range(0..rings.len())];
        let (n, m) = (quad(ring, &mut rng, 1 << 20), quad(ring, &mut rng, 1 << 10));
        match n.euclid_divmod(&m) {
            Ok((q, r)) => &(&q * &m) + &r == n && r.norm() < m.norm(),
            Err(_) => m.is_zero(),
        }
    }));
    out.push(run("bezout_identity", cases, || {
        let ring = rings[rng.gen_range(0..rings.len())];
        let (a, b) = (quad(ring, &mut rng, 1 << 16), quad(ring, &mut rng, 1 << 16));
        match QuadInt::gcd_bezout(&a, &b) {
            Ok((g, s, t)) => &(&s * &a) + &(&t * &b) == g,
            Err(_) => a.is_zero() && b.is_zero(),
        }
    }));
    out.push(run("moebius_group_laws", cases, || {
        let g = &groups[rng.gen_range(0..groups.len())];
        let (x, y, z) = (word(g, &mut rng), word(g, &mut rng), word(g, &mut rng));
        x.compose(&y).compose(&z) == x.compose(&y.compose(&z))
            && x.compose(&x.inverse()) == MoebiusMap::identity(g.ring())
            && x.det().is_one()
    }));
    out.push(run("ceiling_translation_invariance", cases, || {
        let g = &groups[rng.gen_range(0..groups.len())];
        let ring = g.ring();
        let im = if ring.is_modular() { 0.0 } else { rng.gen_range(-1.5..1.5) };
        let z = Complex64::new(rng.gen_range(-1.5..1.5), im);
        let lam = quad(ring, &mut rng, 4).to_complex();
        match (ceiling(g, z, 2.0), ceiling(g, z + lam, 2.0)) {
            (Ok(p), Ok(q)) => (p.height - q.height).abs() < 1e-12,
            _ => false,
        }
    }));
    out
}
