use std::hint::black_box;

use cdma_bench::{finite_rrc, rrc_system};
use cdma_core::capacity::{capacity_constrained, CapacityOptions};
use cdma_core::large_system::{solve_efficiency_scalar, solve_efficiency_sync, solve_upsilon, PowerLaw};
use cdma_core::montecarlo::{mmse_sinr, PhiKernel};
use cdma_core::waveforms::q_eigendecomposition;
use cdma_core::{ChipWaveform, FixedPointOptions, FrequencyGrid, MatrixKind};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn large_system(c: &mut Criterion) {
    let mut g = c.benchmark_group("large_system");
    let sys = rrc_system(0.22, 1.0, 0.1, 16).unwrap();
    for points in [64, 256] {
        let grid = FrequencyGrid::new(points).unwrap();
        g.bench_with_input(BenchmarkId::new("upsilon_field", points), &grid, |b, grid| {
            b.iter(|| solve_upsilon(black_box(&sys), grid, FixedPointOptions::default()).unwrap())
        });
    }
    for points in [512, 4096] {
        g.bench_with_input(BenchmarkId::new("scalar_efficiency", points), &points, |b, &p| {
            b.iter(|| solve_efficiency_scalar(black_box(&sys), p).unwrap())
        });
    }
    let powers = PowerLaw::equiprobable(&[0.25, 1.0, 4.0]).unwrap();
    g.bench_function("sync_efficiency", |b| {
        b.iter(|| solve_efficiency_sync(black_box(2.0), &powers, 0.1).unwrap())
    });
    g.finish();
}

fn spectra(c: &mut Criterion) {
    let w = ChipWaveform::root_raised_cosine(0.5, 1.0).unwrap();
    c.bench_function("q_eigendecomposition_r3", |b| {
        b.iter(|| q_eigendecomposition(&w, 3, black_box(0.8)).unwrap())
    });
}

fn capacity(c: &mut Criterion) {
    let mut g = c.benchmark_group("capacity");
    g.sample_size(20);
    let sys = rrc_system(0.22, 1.0, 0.1, 16).unwrap();
    g.bench_function("constrained_rrc", |b| {
        b.iter(|| capacity_constrained(black_box(&sys), CapacityOptions::default()).unwrap())
    });
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("montecarlo");
    g.sample_size(20);
    for kind in [MatrixKind::BlockCirculant, MatrixKind::BlockToeplitz] {
        let cfg = finite_rrc(64, kind).unwrap();
        g.bench_function(BenchmarkId::new("kernel", kind), |b| {
            b.iter(|| PhiKernel::new(&cfg.waveform, 64, cfg.r, black_box(0.3), kind).unwrap())
        });
        let prepared = cfg.prepare().unwrap();
        g.bench_function(BenchmarkId::new("trial_n64_k32", kind), |b| {
            let mut seed = 0;
            b.iter(|| {
                seed += 1;
                let sys = prepared.draw(seed);
                (0..cfg.k()).map(|k| mmse_sinr(&sys, k).unwrap().sinr).sum::<f64>()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, large_system, spectra, capacity, monte_carlo);
criterion_main!(benches);
