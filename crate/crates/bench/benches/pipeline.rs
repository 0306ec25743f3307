use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hlc_bench::{hlc_design, synthetic_features};
use hlc_core::lti::annuity_factor;
use hlc_core::{ols_fit, run_grid, ModelSpec, SplitSpec};

fn annuity(c: &mut Criterion) {
    c.bench_function("annuity_factor", |b| b.iter(|| annuity_factor(black_box(0.0538), black_box(360))));
}

fn ols(c: &mut Criterion) {
    let design = hlc_design(&synthetic_features(0));
    c.bench_function("ols_fit", |b| b.iter(|| ols_fit(black_box(&design))));
}

fn grid(c: &mut Criterion) {
    let features = synthetic_features(0);
    let specs = ModelSpec::default_grid();
    let split = SplitSpec::default();
    c.bench_function("run_grid", |b| b.iter(|| run_grid(black_box(&features), &specs, &split)));
}

criterion_group!(benches, annuity, ols, grid);
criterion_main!(benches);
