use std::f64::consts::PI;

use cuspidal::torus::{
    ell_max, ell_min, fn_reduce, grid, grid_rows, h2, monotonicity, pentagon, tangent_circle_radii,
    tangent_residuals, theta_min, torus_oracle, FnPoint,
};
use cuspidal::{Error, Exec};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

fn config() -> Config {
    Config {
        cases: 10_000,
        rng_seed: RngSeed::Fixed(0x7021),
        failure_persistence: None,
        ..Config::default()
    }
}

fn wedge() -> impl Strategy<Value = FnPoint> {
    wedge_from(0.0)
}

/// Wedge points with `ℓ ≥ ell_lo`.
fn wedge_from(ell_lo: f64) -> impl Strategy<Value = FnPoint> {
    (1e-3..=1.0f64, 0.0..=1.0f64).prop_map(move |(u, v)| {
        let ell = ell_lo + (ell_max() - ell_lo) * u;
        let lo = theta_min(ell).min(PI);
        FnPoint::new(ell, lo + (PI - lo) * v)
    })
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn tangent_radii_solve_their_quadratics(
        s in 1e-3..1.0f64, extra in 0.0..1.0f64, gap in 1e-3..5.0f64,
    ) {
        let r = s + extra;
        let t = r + s + gap;
        let (big_r, big_s) = tangent_circle_radii(r, s, t).unwrap();
        prop_assert!(big_r > 0.0 && big_s > 0.0);
        prop_assert!(big_r >= big_s);
        let (e1, e2) = tangent_residuals(r, s, t, big_r, big_s);
        let scale = t * t * (1.0 + big_r * big_r + big_r);
        prop_assert!(e1.abs() <= 1e-12 * scale && e2.abs() <= 1e-12 * scale, "{} {}", e1, e2);
    }

    #[test]
    fn tangent_radii_reject_overlap(r in 0.01..1.0f64, s in 0.01..1.0f64, k in 0.0..1.0f64) {
        let (r, s) = if r >= s { (r, s) } else { (s, r) };
        prop_assert_eq!(tangent_circle_radii(r, s, (r + s) * k), Err(Error::OutOfLemmaDomain));
    }

    #[test]
    fn reduction_lands_in_the_wedge_and_is_idempotent(p in wedge(), turns in -3i32..3, flip in any::<bool>()) {
        let theta = if flip { 2.0 * PI - p.theta } else { p.theta } + 2.0 * PI * turns as f64;
        let q = fn_reduce(FnPoint::new(p.ell, theta)).unwrap();
        prop_assert!((q.theta - p.theta).abs() < 1e-9, "{:?} vs {:?}", q, p);
        prop_assert_eq!(fn_reduce(q).unwrap(), q);
    }

    #[test]
    fn no_escape_bound_holds_on_the_wedge(p in wedge()) {
        let floor = pentagon(FnPoint::modular()).f;
        prop_assert!(pentagon(p).f >= floor - 1e-12);
        prop_assert!(floor > 2.0);
        prop_assert!(monotonicity(p, 1e-6).f_decreasing_in_ell);
    }

    #[test]
    fn tangent_lemma_applies_past_ell_min(p in wedge_from(ell_min())) {
        let pd = pentagon(p);
        prop_assert!(pd.t > 0.0);
        // t decreases in θ, so the binding case is θ = π
        prop_assert!(pd.t >= pentagon(FnPoint::new(p.ell, PI)).t - 1e-12);
        prop_assert!(pd.r <= pd.r_c + 1e-12);
    }
}

#[test]
fn h2_is_increasing_and_twist_free() {
    let rows = grid_rows(50, Exec::Parallel);
    for w in rows.windows(2) {
        if w[0].ell == w[1].ell {
            assert_eq!(w[0].h2, w[1].h2);
        } else {
            assert!(w[1].h2 > w[0].h2);
        }
    }
}

#[test]
fn f_is_symmetric_about_half_twist() {
    // r and r' swap under a ↦ ℓ/2 − a, that is θ ↦ 2π − θ
    for &p in &grid(20, Exec::Sequential) {
        let q = FnPoint::new(p.ell, 2.0 * PI - p.theta);
        assert!((pentagon(p).f - pentagon(q).f).abs() < 1e-12);
    }
}

#[test]
fn oracle_tracks_closed_form() {
    for p in [FnPoint::new(0.4, 2.0), FnPoint::new(1.2, 0.0), FnPoint::new(1.9, 3.1)] {
        let o = torus_oracle(p, 7, Exec::Parallel).unwrap();
        assert!((o.log_min_height - h2(p)).abs() < 1e-4, "{p:?}: {o:?}");
    }
}

#[test]
fn oracle_is_twist_independent() {
    let a = torus_oracle(FnPoint::new(1.5, 0.3), 7, Exec::Parallel).unwrap();
    let b = torus_oracle(FnPoint::new(1.5, 2.9), 7, Exec::Parallel).unwrap();
    assert!((a.min_height - b.min_height).abs() < 1e-4);
}
