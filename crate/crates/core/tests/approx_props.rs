use cuspidal::approx::{continued_sequence, good_sequence, reconstruct, ApproxRun, RunStatus, Xi};
use cuspidal::group::GroupSpec;
use cuspidal::moebius::{penetration_at, MoebiusMap, UpperPoint};
use cuspidal::{Exec, QuadInt, QuadRat, RingSpec};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn group(d: u32) -> GroupSpec {
    GroupSpec::new(RingSpec::new(d).unwrap()).unwrap()
}

fn random_xi(ring: RingSpec, rng: &mut ChaCha8Rng, bits: usize) -> Xi {
    let den = BigInt::one() << bits;
    let coord = |rng: &mut ChaCha8Rng| {
        let limbs: Vec<u32> = (0..bits / 32).map(|_| rng.gen()).collect();
        let num = BigInt::from_slice(num_bigint::Sign::Plus, &limbs) - (&den >> 1);
        BigRational::new(num, den.clone())
    };
    let x = coord(rng);
    let y = if ring.is_modular() { BigRational::zero() } else { coord(rng) };
    Xi::exact(QuadRat::new(ring, x, y))
}

/// Classical convergents `p_k/q_k` of a rational, `q_k > 0`.
fn convergents(x: &BigRational) -> Vec<(BigInt, BigInt)> {
    let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
    let (mut p1, mut q1) = (x.floor().to_integer(), BigInt::one());
    let mut out = vec![(p1.clone(), q1.clone())];
    let mut r = x - x.floor();
    while !r.is_zero() {
        let inv = r.recip();
        let b = inv.floor().to_integer();
        r = &inv - inv.floor();
        let (p2, q2) = (&b * &p1 + &p0, &b * &q1 + &q0);
        (p0, q0, p1, q1) = (p1, q1, p2.clone(), q2.clone());
        out.push((p2, q2));
    }
    out
}

fn as_fraction(step_gamma: &MoebiusMap) -> (BigInt, BigInt) {
    let (a, c) = (step_gamma.a().x().clone(), step_gamma.c().x().clone());
    if c.is_negative() {
        (-a, -c)
    } else {
        (a, c)
    }
}

/// On ℤ the descent crosses the basin of every convergent whose Ford circle
/// the vertical line enters, and of no other fraction.
#[test]
fn real_points_step_through_convergents() {
    let g = group(0);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let xi = random_xi(g.ring(), &mut rng, 64);
        let x = xi.center().x().clone();
        let conv = convergents(&x);
        let run = good_sequence(&g, &xi, 80).unwrap();
        assert_eq!(run.status, RunStatus::Terminal);
        let got: Vec<(BigInt, BigInt)> = run.steps.iter().map(|s| as_fraction(&s.gamma)).collect();
        assert!(got.iter().all(|f| conv.contains(f)), "{x}: {got:?}");
        assert!(got.windows(2).all(|w| w[0].1 < w[1].1));
        assert_eq!(got.last(), conv.last());
        for (p, q) in &conv {
            let gap = (&x - BigRational::new(p.clone(), q.clone())).abs();
            if gap * BigRational::from_integer(q * q * 2) < BigRational::one() {
                assert!(got.contains(&(p.clone(), q.clone())), "{x}: missing {p}/{q}");
            }
        }
    }
}

/// Deepest horoball among `p/q`, `|q| ≤ q_max`, at the point `(ξ, t)`.
fn deepest_rival(ring: RingSpec, xi: Complex64, t: f64, q_max: i64, floor: f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    let ys = if ring.is_modular() { 0..=0 } else { -q_max..=q_max };
    for qy in ys {
        for qx in -q_max..=q_max {
            let q = QuadInt::new(ring, qx, qy);
            let n = q.norm().to_f64().unwrap();
            if n == 0.0 || n > (q_max * q_max) as f64 {
                continue;
            }
            let s = 1.0 / n;
            // only centres within this distance can beat `floor`
            let reach2 = s * t * (-floor).exp() - t * t;
            if reach2 <= 0.0 {
                continue;
            }
            let radius = n.sqrt() * reach2.sqrt() + 1e-9;
            for p in ring.lattice_points_in_disk(q.to_complex() * xi, radius) {
                let c = p.to_complex() / q.to_complex();
                best = best.max(penetration_at(c, s, &UpperPoint::new(xi, t)));
            }
        }
    }
    best
}

fn check_dominance(ring: RingSpec, xi: &Xi, run: &ApproxRun) {
    let z = xi.to_complex();
    let steps = &run.steps;
    for n in 0..steps.len().saturating_sub(1) {
        if steps[n].gamma.c().abs() > 1e4 {
            break;
        }
        let t = (steps[n].crossing_t * steps[n + 1].crossing_t).sqrt();
        let x = UpperPoint::new(z, t);
        let own = steps[n].gamma.horoball_image(1.0).penetration(&x);
        assert!(own > t.ln(), "step {n}: the cusp at infinity is deeper");
        let rival = deepest_rival(ring, z, t, 20, own + 1e-9);
        assert!(rival <= own + 1e-9, "step {n}: rival {rival} beats {own}");
    }
}

#[test]
fn steps_are_the_deepest_horoballs_along_the_descent() {
    for d in [0, 1, 3] {
        let g = group(d);
        let mut rng = ChaCha8Rng::seed_from_u64(23 + d as u64);
        for _ in 0..20 {
            let xi = random_xi(g.ring(), &mut rng, 128);
            let run = good_sequence(&g, &xi, 14).unwrap();
            check_dominance(g.ring(), &xi, &run);
        }
    }
}

#[test]
fn continued_sequence_and_reconstruction_agree_with_the_run() {
    for d in [0, 1, 2, 3, 7, 11] {
        let g = group(d);
        let mut rng = ChaCha8Rng::seed_from_u64(31 + d as u64);
        for _ in 0..10 {
            let xi = random_xi(g.ring(), &mut rng, 200);
            let run = good_sequence(&g, &xi, 25).unwrap();
            let gammas: Vec<MoebiusMap> = run.steps.iter().map(|s| s.gamma.clone()).collect();
            assert_eq!(continued_sequence(&gammas).unwrap(), run.a(), "d={d}");
            let z0 = gammas[0].endpoint().unwrap();
            let zs = reconstruct(&run.a(), &run.q(), &z0).unwrap();
            let expect: Vec<QuadRat> = gammas.iter().map(|g| g.endpoint().unwrap()).collect();
            assert_eq!(zs, expect, "d={d}");
        }
    }
}

#[test]
fn batches_agree_across_execution_modes() {
    let g = group(1);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pts: Vec<Xi> = (0..16).map(|_| random_xi(g.ring(), &mut rng, 128)).collect();
    let run = |e| cuspidal::par::map(e, &pts, |xi| good_sequence(&g, xi, 10).unwrap());
    assert_eq!(run(Exec::Sequential), run(Exec::Parallel));
}
