use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use num_rational::BigRational;
use rod_flat::{bezout_arrays, bezout_cosh, expand, NumericMode};
use rod_flat_bench::{doubling_sizes, pair_for_size};

fn arrays(c: &mut Criterion) {
    let mut g = c.benchmark_group("arrays");
    for size in doubling_sizes(1 << 10, 1 << 18) {
        let (a, b) = pair_for_size(size);
        g.throughput(Throughput::Elements(a + b));
        g.bench_with_input(
            BenchmarkId::from_parameter(a + b),
            &(a, b),
            |bench, &(a, b)| bench.iter(|| bezout_arrays(a, b).unwrap()),
        );
    }
    g.finish();
}

fn with_series(c: &mut Criterion) {
    let mut g = c.benchmark_group("with_series_j10");
    g.sample_size(10);
    for size in doubling_sizes(1 << 8, 1 << 14) {
        let (a, b) = pair_for_size(size);
        let s = BigRational::new(1.into(), a.into());
        g.throughput(Throughput::Elements(a + b));
        g.bench_with_input(
            BenchmarkId::from_parameter(a + b),
            &(a, b),
            |bench, &(a, b)| {
                bench.iter(|| {
                    let (pair, _) = bezout_cosh(a, b).unwrap();
                    (
                        expand(&pair.l1, &s, 10, NumericMode::Exact),
                        expand(&pair.l2, &s, 10, NumericMode::Exact),
                    )
                })
            },
        );
    }
    g.finish();
}

criterion_group!(benches, arrays, with_series);
criterion_main!(benches);
