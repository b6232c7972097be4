use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use cuspidal::approx::{good_sequence_prefix, Xi};
use cuspidal::ford::build_complex;
use cuspidal::group::{enumerate_by_c, GroupSpec};
use cuspidal::hurwitz::hurwitz_estimate;
use cuspidal::torus::{grid, torus_oracle};
use cuspidal::{Exec, QuadRat, RingSpec};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn group(d: u32) -> GroupSpec {
    GroupSpec::new(RingSpec::new(d).unwrap()).unwrap()
}

fn random_points(ring: RingSpec, n: usize) -> Vec<Xi> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let den: BigInt = BigInt::from(1u8) << 64;
    let mut coord = |on: bool| {
        let v: u64 = if on { rng.gen() } else { 0 };
        BigRational::new(v.into(), den.clone())
    };
    (0..n)
        .map(|_| {
            let x = coord(true);
            Xi::exact(QuadRat::new(ring, x, coord(ring.d() != 0)))
        })
        .collect()
}

fn benches(c: &mut Criterion) {
    let g1 = group(1);
    let g0 = group(0);
    let pts = random_points(g1.ring(), 64);
    for (name, exec) in MODES {
        let mut b = c.benchmark_group(name);
        b.sample_size(10);
        b.bench_function("enumerate d=1 c<=12", |bn| {
            bn.iter(|| black_box(enumerate_by_c(&g1, 12.0, exec)))
        });
        b.bench_function("ford complex d=3 c<=4", |bn| {
            bn.iter(|| black_box(build_complex(&group(3), 4.0, exec).unwrap()))
        });
        b.bench_function("hurwitz d=0", |bn| {
            bn.iter(|| black_box(hurwitz_estimate(&g0, 4.0, 10.0, 6, exec).unwrap()))
        });
        b.bench_function("torus oracle word_len 7", |bn| {
            bn.iter(|| black_box(torus_oracle(grid(1, exec)[0], 7, exec).unwrap()))
        });
        b.bench_function("approx batch 64 x 12 steps", |bn| {
            bn.iter(|| {
                black_box(cuspidal::par::map(exec, &pts, |xi| {
                    good_sequence_prefix(&g1, xi, 12).unwrap()
                }))
            })
        });
        b.finish();
    }
}

criterion_group!(parallel_vs_sequential, benches);
criterion_main!(parallel_vs_sequential);
