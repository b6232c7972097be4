use cuspidal::group::{conjugate_search, enumerate_by_c, GroupSpec};
use cuspidal::moebius::MoebiusMap;
use cuspidal::{Exec, QuadInt, RingSpec};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn group(d: u32) -> GroupSpec {
    GroupSpec::new(RingSpec::new(d).unwrap()).unwrap()
}

/// `(a, c) ~ (a', c')` under left and right multiplication by the cusp
/// stabilizer: `c' = u⁻¹ c v` and `a' ≡ u a v (mod c)` for units `u, v`.
fn same_double_coset(p: &(QuadInt, QuadInt), q: &(QuadInt, QuadInt)) -> bool {
    let units = p.1.ring().units();
    for u in &units {
        let ui = u.unit_inverse().unwrap();
        for v in &units {
            if &(&ui * &p.1) * v != q.1 {
                continue;
            }
            let diff = &q.0 - &(&(u * &p.0) * v);
            if diff.exact_div(&p.1).is_some() {
                return true;
            }
        }
    }
    false
}

/// Every coprime pair `(a, c)` with `N(c) ≤ bound`, `a` over a full residue box.
fn all_pairs(ring: RingSpec, bound: i64) -> Vec<(QuadInt, QuadInt)> {
    let mut out = Vec::new();
    let r = (bound as f64).sqrt().ceil() as i64 + 2;
    let ys = if ring.is_modular() { 0..=0 } else { -r..=r };
    for cy in ys.clone() {
        for cx in -r..=r {
            let c = QuadInt::new(ring, cx, cy);
            let n = c.norm().to_i64().unwrap();
            if n == 0 || n > bound {
                continue;
            }
            let ay = if ring.is_modular() { 0..1 } else { 0..n };
            for y in ay {
                for x in 0..n {
                    let a = QuadInt::new(ring, x, y);
                    if QuadInt::gcd_bezout(&a, &c).unwrap().0.is_unit() {
                        out.push((a, c.clone()));
                    }
                }
            }
        }
    }
    out
}

#[test]
fn enumeration_matches_brute_force_classes() {
    for d in [0, 1, 2, 3, 7, 11] {
        let g = group(d);
        let reps = enumerate_by_c(&g, 3.0, Exec::Parallel);
        let rep_pairs: Vec<(QuadInt, QuadInt)> = reps
            .iter()
            .map(|r| (r.gamma.a().clone(), r.gamma.c().clone()))
            .collect();
        for (i, p) in rep_pairs.iter().enumerate() {
            for q in &rep_pairs[i + 1..] {
                assert!(!same_double_coset(p, q), "d={d}: duplicate {p:?} {q:?}");
            }
        }
        let mut classes: Vec<(QuadInt, QuadInt)> = Vec::new();
        for p in all_pairs(g.ring(), 9) {
            let hits = rep_pairs.iter().filter(|r| same_double_coset(r, &p)).count();
            assert_eq!(hits, 1, "d={d}: {p:?} covered {hits} times");
            if !classes.iter().any(|c| same_double_coset(c, &p)) {
                classes.push(p);
            }
        }
        assert_eq!(classes.len(), reps.len(), "d={d}");
    }
}

#[test]
fn both_modes_enumerate_identically() {
    for d in [1, 3, 11] {
        let g = group(d);
        assert_eq!(
            enumerate_by_c(&g, 5.0, Exec::Sequential),
            enumerate_by_c(&g, 5.0, Exec::Parallel)
        );
    }
}

#[test]
fn gaussian_single_rep_at_c_one() {
    let reps = enumerate_by_c(&group(1), 1.0, Exec::Sequential);
    assert_eq!(reps.len(), 1);
    assert_eq!(reps[0].depth(), 0.0);
}

fn loxodromic(d: u32) -> impl Strategy<Value = MoebiusMap> {
    let ring = RingSpec::new(d).unwrap();
    let gens: Vec<MoebiusMap> = group(d)
        .generators()
        .iter()
        .flat_map(|g| [g.clone(), g.inverse()])
        .collect();
    prop::collection::vec(0..gens.len(), 2..=8)
        .prop_map(move |ix| ix.iter().fold(MoebiusMap::identity(ring), |m, &i| &m * &gens[i]))
        .prop_filter("loxodromic with c ≠ 0", |m| m.is_loxodromic() && !m.c().is_zero())
}

proptest! {
    #![proptest_config(Config {
        cases: 200,
        rng_seed: RngSeed::Fixed(0xc0de),
        failure_persistence: None,
        max_global_rejects: 100_000,
        ..Config::default()
    })]

    #[test]
    fn conjugate_search_is_monotone_in_word_len(
        m in prop::sample::select(vec![0u32, 1, 3]).prop_flat_map(loxodromic)
    ) {
        let g = group(m.ring().d());
        let cap = 2.0 * m.c().abs().max(3.0);
        let mut last = f64::INFINITY;
        for len in 0..5 {
            let r = conjugate_search(&g, &m, len, cap, Exec::Sequential).unwrap();
            prop_assert!(r.min_c <= last);
            prop_assert!(r.min_c <= m.c().abs() + 1e-12);
            let t0 = m.trace();
            let t1 = r.witness.trace();
            prop_assert!(t0 == t1 || t0 == -&t1);
            last = r.min_c;
        }
    }
}
