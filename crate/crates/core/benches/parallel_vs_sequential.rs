use std::sync::Arc;

use coring::algmod::Algebra;
use coring::catalog::catalog_matrix;
use coring::cdga::check_cdga_degreewise;
use coring::equiv::t_based;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

// Degreewise CDGA checks of T(C, x) for the N = 3 matrix coring. The sequential
// case runs the same code inside a one-thread pool.
fn bench(c: &mut Criterion) {
    let b = catalog_matrix(3, &Arc::new(Algebra::ground())).unwrap().based;
    let mut g = c.benchmark_group("parallel_vs_sequential");
    g.sample_size(10);
    for d in [2, 3] {
        let t = t_based(&b, d).unwrap().cdga;
        g.bench_with_input(BenchmarkId::new("parallel", d), &t, |bench, t| bench.iter(|| check_cdga_degreewise(t)));
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        g.bench_with_input(BenchmarkId::new("sequential", d), &t, |bench, t| bench.iter(|| one.install(|| check_cdga_degreewise(t))));
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
