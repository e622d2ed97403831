//! Compares the data-parallel batch paths against plain sequential loops.
//! With the default `parallel` feature the batch helpers go through rayon;
//! build with `--no-default-features` to bench the sequential fallback on
//! both sides.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torelli_core::cyclecomplex::{sampling::random_h0prime, supersets_in_h};
use torelli_core::descent::{descent_context, verify_sigma_descent_in};
use torelli_core::par_map;

fn lattice_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let instances: Vec<_> = (0..12)
        .map(|_| {
            let twists = rng.gen_range(0..3);
            random_h0prime(&mut rng, 16, twists)
        })
        .collect();
    let mut group = c.benchmark_group("superset-lattices");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter_batched(
            || instances.clone(),
            |batch| {
                batch
                    .iter()
                    .map(|i| supersets_in_h(&i.a, &i.x).unwrap().len())
                    .sum::<usize>()
            },
            BatchSize::SmallInput,
        )
    });
    group.bench_function("par", |b| {
        b.iter_batched(
            || instances.clone(),
            |batch| {
                par_map(&batch, |i| supersets_in_h(&i.a, &i.x).unwrap().len())
                    .iter()
                    .sum::<usize>()
            },
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

fn descent_batch(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let instances: Vec<_> = (0..6)
        .map(|_| {
            let twists = rng.gen_range(0..2);
            random_h0prime(&mut rng, 20, twists)
        })
        .collect();
    let mut group = c.benchmark_group("sigma-descent");
    group.sample_size(10);
    group.bench_function("seq", |b| {
        b.iter(|| {
            instances
                .iter()
                .filter(|i| {
                    let ctx = descent_context(&i.a, &i.x).unwrap();
                    verify_sigma_descent_in(&i.a, &i.x, &ctx).unwrap().ok
                })
                .count()
        })
    });
    group.bench_function("par", |b| {
        b.iter(|| {
            par_map(&instances, |i| {
                let ctx = descent_context(&i.a, &i.x).unwrap();
                verify_sigma_descent_in(&i.a, &i.x, &ctx).unwrap().ok
            })
            .iter()
            .filter(|ok| **ok)
            .count()
        })
    });
    group.finish();
}

criterion_group!(benches, lattice_batch, descent_batch);
criterion_main!(benches);
