use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use treedist::batch::{pairwise_matrix, pairwise_matrix_seq};
use treedist::geodesic::geodesic_distance;
use treedist::random::random_binary_tree;
use treedist::Tree;

fn dist(a: &Tree, b: &Tree) -> treedist::Result<f64> {
    geodesic_distance(a, b).map(|r| r.distance)
}

fn pairwise(c: &mut Criterion) {
    let mut group = c.benchmark_group("pairwise_geodesic");
    group.sample_size(10);
    for &(count, n) in &[(16usize, 30usize), (32, 60)] {
        let mut rng = ChaCha8Rng::seed_from_u64(count as u64);
        let trees: Vec<Tree> = (0..count).map(|_| random_binary_tree(n, &mut rng)).collect();
        let id = format!("{count}x{n}");
        group.bench_with_input(BenchmarkId::new("sequential", &id), &trees, |b, ts| {
            b.iter(|| pairwise_matrix_seq(ts, dist).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", &id), &trees, |b, ts| {
            b.iter(|| pairwise_matrix(ts, dist).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pairwise);
criterion_main!(benches);
