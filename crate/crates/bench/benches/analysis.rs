use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;
use unfun_bench::{ratings, rng};
use unfun_core::analysis::{bootstrap_mean_ci, curve_from_observations};

fn bootstrap(c: &mut Criterion) {
    let values = ratings(&mut rng(11), 200);
    c.bench_function("bootstrap_mean_ci/200x1000", |bench| {
        bench.iter(|| {
            let mut r = ChaCha8Rng::seed_from_u64(5);
            bootstrap_mean_ci(black_box(&values), 1000, &mut r).unwrap()
        })
    });

    let observations: Vec<(usize, f64)> = ratings(&mut rng(12), 2000)
        .into_iter()
        .enumerate()
        .map(|(i, r)| (1 + i % 6, r))
        .collect();
    c.bench_function("tradeoff_curve/2000_pairs", |bench| {
        bench.iter(|| curve_from_observations(black_box(&observations), 1000, 5).unwrap())
    });
}

criterion_group!(benches, bootstrap);
criterion_main!(benches);
