use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ldp_contraction::harness::run_suite_with;
use ldp_contraction::{Execution, Suite, SuiteParams};

fn suites(c: &mut Criterion) {
    let params = SuiteParams::default();
    let mut group = c.benchmark_group("suites");
    group.sample_size(10);
    for suite in [Suite::DpiAndSdpi, Suite::IntegralRep, Suite::FdivBounds] {
        for execution in [Execution::Sequential, Execution::Parallel] {
            let id = BenchmarkId::new(suite.name(), format!("{execution:?}").to_lowercase());
            group.bench_function(id, |b| {
                b.iter(|| run_suite_with(suite, &params, 2000, 7, execution).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, suites);
criterion_main!(benches);
