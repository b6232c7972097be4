use cuspidal::{QuadInt, QuadRat, RingSpec};
use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config() -> Config {
    Config {
        cases: 10_000,
        rng_seed: RngSeed::Fixed(0x5eed),
        failure_persistence: None,
        max_global_rejects: 1_000_000,
        ..Config::default()
    }
}

fn ring() -> impl Strategy<Value = RingSpec> {
    prop::sample::select(vec![0u32, 1, 2, 3, 7, 11]).prop_map(|d| RingSpec::new(d).unwrap())
}

fn elt(ring: RingSpec, bound: i64) -> impl Strategy<Value = QuadInt> {
    let ys = if ring.is_modular() { 0..=0 } else { -bound..=bound };
    (-bound..=bound, ys).prop_map(move |(x, y)| QuadInt::new(ring, x, y))
}

fn pair() -> impl Strategy<Value = (QuadInt, QuadInt)> {
    ring().prop_flat_map(|r| (elt(r, 1_000_000), elt(r, 1_000)))
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn divmod_reconstructs_and_shrinks((a, m) in pair()) {
        prop_assume!(!m.is_zero());
        let (q, r) = a.euclid_divmod(&m).unwrap();
        prop_assert_eq!(&(&q * &m) + &r, a);
        prop_assert!(r.norm() < m.norm());
    }

    #[test]
    fn bezout_identity((a, b) in pair()) {
        prop_assume!(!(a.is_zero() && b.is_zero()));
        let (g, s, t) = QuadInt::gcd_bezout(&a, &b).unwrap();
        prop_assert_eq!(&(&s * &a) + &(&t * &b), g.clone());
        prop_assert!(a.exact_div(&g).is_some() && b.exact_div(&g).is_some());
        // canonical: invariant under unit multiples of the inputs
        for u in a.ring().units() {
            let (g2, _, _) = QuadInt::gcd_bezout(&(&u * &a), &b).unwrap();
            prop_assert_eq!(&g2, &g);
        }
    }

    #[test]
    fn norm_is_multiplicative((a, b) in pair()) {
        prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        prop_assert_eq!(&a * &a.conj(), QuadInt::new(a.ring(), a.norm(), BigInt::zero()));
    }

    #[test]
    fn ring_axioms((a, b) in pair(), k in -50i64..50) {
        let c = if a.ring().is_modular() { a.ring().int(k) } else { QuadInt::new(a.ring(), k, 1 - k % 2) };
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a - &b) + &b, a);
    }

    #[test]
    fn display_parse_round_trip((a, _b) in pair()) {
        prop_assert_eq!(QuadInt::parse(a.ring(), &a.to_string()).unwrap(), a);
    }

    #[test]
    fn rational_inverse((a, b) in pair()) {
        prop_assume!(!a.is_zero() && !b.is_zero());
        let z = QuadRat::from_fraction(&a, &b).unwrap();
        let one = &z * &z.inv().unwrap();
        prop_assert!(one.is_integral());
        prop_assert!(one.to_quad_int().unwrap().is_one());
        prop_assert_eq!(z.norm() * QuadRat::from(&b).norm(), QuadRat::from(&a).norm());
    }
}

#[test]
fn unit_groups() {
    let sizes: Vec<usize> = RingSpec::all().map(|r| r.units().len()).collect();
    assert_eq!(sizes, vec![2, 4, 2, 6, 2, 2]);
}
