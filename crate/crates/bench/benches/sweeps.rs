use criterion::{criterion_group, criterion_main, Criterion};
use flagdyn::curve::sample_curve;
use flagdyn::foliation::CurveIndex;
use flagdyn::representation::{build_fuchsian, check_hyperbolic, distinct_element_count};
use flagdyn_bench::{flag_grid, pure_representation};

fn sweeps(c: &mut Criterion) {
    let fuchsian = build_fuchsian(2).unwrap();
    let pure = pure_representation();
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("distinct_elements_len6", |b| {
        b.iter(|| distinct_element_count(&fuchsian, 6).unwrap())
    });
    g.bench_function("check_hyperbolic_len6", |b| b.iter(|| check_hyperbolic(&fuchsian, 6).unwrap()));
    g.bench_function("sample_curve_len6", |b| b.iter(|| sample_curve(&pure, 6).unwrap()));
    g.finish();
}

fn endpoints(c: &mut Criterion) {
    let pure = pure_representation();
    let curve = sample_curve(&pure, 7).unwrap();
    let index = CurveIndex::new(&curve).unwrap();
    let flags = flag_grid(&curve, 256);
    c.bench_function("endpoints_256_flags_len7", |b| {
        b.iter(|| flags.iter().filter(|f| index.endpoints(f).is_ok()).count())
    });
}

criterion_group!(benches, sweeps, endpoints);
criterion_main!(benches);
