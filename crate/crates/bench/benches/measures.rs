use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sysrisk::pca::{
    covariance, demean, eigen_symmetric, rolling_pca, DivisorMode, RollingPcaConfig, DEFAULT_TOLERANCE,
};
use sysrisk::xcorr::{rolling_xcorr, xcorr, xcorr_bruteforce, Direction, RollingXCorrConfig};
use sysrisk_bench::panel;

fn eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("eigen_symmetric");
    for n in [4, 8, 16, 32] {
        let p = panel(n, 4 * n, 0.4);
        let cov = covariance(&demean(&p).unwrap(), DivisorMode::SampleT1).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &cov, |b, cov| {
            b.iter(|| eigen_symmetric(black_box(cov), DEFAULT_TOLERANCE).unwrap())
        });
    }
    g.finish();
}

fn rolling(c: &mut Criterion) {
    let p = panel(4, 2520, 0.4);
    c.bench_function("rolling_pca_4x2520_w30", |b| {
        b.iter(|| rolling_pca(black_box(&p), &RollingPcaConfig::default()).unwrap())
    });
    let series = panel(2, 2520, 0.4).to_series();
    c.bench_function("rolling_xcorr_2520_w90", |b| {
        b.iter(|| rolling_xcorr(black_box(&series[0]), &series[1], &RollingXCorrConfig::default()).unwrap())
    });
}

fn xcorr_vs_bruteforce(c: &mut Criterion) {
    let mut g = c.benchmark_group("xcorr_window");
    for k in [90, 250, 1000] {
        let s = panel(2, k, 0.2);
        let (a, b) = (s.row(0).to_vec(), s.row(1).to_vec());
        g.bench_with_input(BenchmarkId::new("convolution", k), &k, |bench, _| {
            bench.iter(|| xcorr(black_box(&a), black_box(&b), Direction::ALeadsB).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("bruteforce", k), &k, |bench, _| {
            bench.iter(|| xcorr_bruteforce(black_box(&a), black_box(&b), Direction::ALeadsB).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, eigen, rolling, xcorr_vs_bruteforce);
criterion_main!(benches);
