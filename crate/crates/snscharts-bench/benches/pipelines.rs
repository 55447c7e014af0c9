//! Criterion benchmarks: rank-pool scaling and the main scoring pipelines.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use snscharts::charts::{ChartConfig, FreezePolicy, Scheme, StatSelector};
use snscharts::multivariate::variation3_centered_square;
use snscharts::{run_chart, RankPool, RankState};

fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    // Box-Muller keeps the dependency surface minimal here.
    (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>().max(1e-12);
            let v: f64 = rng.random();
            (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
        })
        .collect()
}

fn bench_pool(c: &mut Criterion) {
    let mut group = c.benchmark_group("rank-pool");
    for n in [1_000usize, 10_000, 100_000] {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let vals = normals(&mut rng, n);
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("insert-and-rank", n), &vals, |b, vals| {
            b.iter(|| {
                let mut pool = RankPool::new();
                let mut acc = 0.0;
                for &v in vals {
                    acc += pool.sequential_rank(v);
                    pool.insert(v);
                }
                acc
            })
        });
    }
    group.finish();
}

fn bench_location_chart(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let batches: Vec<Vec<f64>> = (0..2_000).map(|_| normals(&mut rng, 5)).collect();
    let config = ChartConfig::new(Scheme::Cusum { k: 0.5 }, 370).unwrap();
    c.bench_function("location-cusum-2000x5", |b| {
        b.iter(|| {
            run_chart(
                &mut RankState::new(),
                &batches,
                StatSelector::Z,
                &config,
                FreezePolicy::Never,
                0,
            )
            .unwrap()
        })
    });
}

fn bench_variation3(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let row = |rng: &mut ChaCha8Rng| normals(rng, 3);
    let reference: Vec<Vec<f64>> = (0..50).map(|_| row(&mut rng)).collect();
    let phase2: Vec<Vec<f64>> = (0..500).map(|_| row(&mut rng)).collect();
    c.bench_function("centered-square-trivariate-550", |b| {
        b.iter(|| variation3_centered_square(&reference, &phase2, &[0.0; 3], 200, 0.1).unwrap())
    });
}

criterion_group!(benches, bench_pool, bench_location_chart, bench_variation3);
criterion_main!(benches);
