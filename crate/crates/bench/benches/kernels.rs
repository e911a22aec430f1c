use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use trimis::counting::{count_maximal, MaximalRanker};
use trimis::delaunay::{feasible_triangles, triangulate, Radius};
use trimis_bench::torus_fixture;

fn transfer(c: &mut Criterion) {
    let mut g = c.benchmark_group("count_maximal");
    for (n, m) in [(6, 40), (8, 40), (10, 20)] {
        g.bench_function(format!("{n}x{m}"), |b| b.iter(|| count_maximal(black_box(n), black_box(m)).unwrap()));
    }
    g.finish();
}

fn ranking(c: &mut Criterion) {
    let ranker = MaximalRanker::new(6, 30).unwrap();
    let k = ranker.count() / 3u32;
    let omega = ranker.unrank(&k).unwrap();
    c.bench_function("unrank 6x30", |b| b.iter(|| ranker.unrank(black_box(&k)).unwrap()));
    c.bench_function("rank 6x30", |b| b.iter(|| ranker.rank(black_box(&omega)).unwrap()));
}

fn geometry(c: &mut Criterion) {
    c.bench_function("feasible_triangles", |b| b.iter(|| feasible_triangles(black_box(Radius::rho()))));
    let mut g = c.benchmark_group("triangulate");
    for side in [14, 28] {
        let omega = torus_fixture(side, 1);
        g.bench_function(format!("torus {side}"), |b| b.iter(|| triangulate(black_box(&omega)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, transfer, ranking, geometry);
criterion_main!(benches);
