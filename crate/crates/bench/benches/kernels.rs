use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use szlab_core::polycount::{twisted_root_count, BiPoly};
use szlab_core::rng;
use szlab_core::spectral::{second_eigenvalue, CayleyGraph};
use szlab_core::walks::{ExactWalker, GeneratorPair};
use szlab_core::{Field, GroupIndex, Suzuki};

fn field_mul(c: &mut Criterion) {
    let mut g = c.benchmark_group("field_mul");
    // log tables up to m = 16, carry-less multiply above
    for m in [9u32, 17, 31] {
        let f = Field::new(m).unwrap();
        let mut r = rng::stream(0, "bench", m as u64);
        let xs: Vec<_> = (0..1024).map(|_| f.random(&mut r)).collect();
        g.bench_with_input(BenchmarkId::from_parameter(m), &xs, |b, xs| {
            b.iter(|| {
                xs.windows(2)
                    .fold(xs[0], |acc, w| f.add(acc, f.mul(w[0], w[1])))
            })
        });
    }
    g.finish();
}

fn group_ops(c: &mut Criterion) {
    let g = Suzuki::with_degree(9).unwrap();
    let mut r = rng::stream(0, "bench", 100);
    let x = g.random_element(&mut r);
    let y = g.random_element(&mut r);
    let m = x.matrix().mul(g.field(), y.matrix());
    c.bench_function("sz512_multiply", |b| {
        b.iter(|| g.multiply(black_box(&x), black_box(&y)))
    });
    c.bench_function("sz512_factorize", |b| b.iter(|| g.factorize(black_box(&m))));
}

fn walk_step(c: &mut Criterion) {
    let index = GroupIndex::enumerate(&Field::new(3).unwrap()).unwrap();
    let pair = GeneratorPair::random_generating(index.group(), 1).unwrap();
    let walker = ExactWalker::new(&index, &pair).unwrap();
    let v = walker.distribution(10);
    c.bench_function("sz8_exact_walk_step", |b| {
        b.iter(|| walker.step(black_box(&v)))
    });

    let graph = CayleyGraph::from_index(&index, &pair).unwrap();
    let mut g = c.benchmark_group("lanczos");
    g.sample_size(10);
    g.bench_function("sz8_second_eigenvalue", |b| {
        b.iter(|| second_eigenvalue(&graph, 1e-9, 400, 0).unwrap().lambda2)
    });
    g.finish();
}

fn root_count(c: &mut Criterion) {
    let f = Field::new(9).unwrap();
    let mut r = rng::stream(0, "bench", 200);
    let p = BiPoly::random(&f, 4, &mut r);
    c.bench_function("twisted_root_count_q512_d4", |b| {
        b.iter(|| twisted_root_count(&f, black_box(&p)))
    });
}

criterion_group!(benches, field_mul, group_ops, walk_step, root_count);
criterion_main!(benches);
