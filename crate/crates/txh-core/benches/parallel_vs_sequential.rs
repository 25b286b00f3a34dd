//! Data-parallel sweeps vs their sequential shape.
//!
//! The `*_par` benches go through the public APIs, which fan out over
//! rayon under the default `parallel` feature. The `*_seq` benches run
//! the same per-item operations through a plain iterator, which is
//! exactly what the APIs compile to with `--no-default-features`. Run
//! under both feature sets to see the crossover:
//!
//! ```text
//! cargo bench -p txh-core
//! cargo bench -p txh-core --no-default-features
//! ```

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use txh_core::circuits::{EndpointLcSpec, PhysicalConstants, TransmissionLineSpec};
use txh_core::cmera::{minimize_mode, minimize_per_mode, FlowConfig, Functional};
use txh_core::holography::{curvature_at, curvature_report, log_spaced, MetricFamily};
use txh_core::scattering::{
    charge_variance_quadrature, network_s_matrix, s_matrix_sweep, JunctionSpec, QFactorRegime,
};

fn endpoint_config(modes: usize) -> FlowConfig {
    FlowConfig::log_uniform(
        1.0,
        modes,
        TransmissionLineSpec::new(1.0, 1.0).unwrap(),
        Some(EndpointLcSpec::new(2.0, 0.5).unwrap()),
        PhysicalConstants::natural(),
    )
    .unwrap()
}

fn bench_mode_minimisation(c: &mut Criterion) {
    let mut group = c.benchmark_group("per_mode_minimisation");
    for &modes in &[512usize, 4096] {
        let cfg = endpoint_config(modes);
        group.bench_with_input(BenchmarkId::new("par", modes), &cfg, |b, cfg| {
            b.iter(|| minimize_per_mode(black_box(cfg), Functional::Endpoint).unwrap());
        });
        group.bench_with_input(BenchmarkId::new("seq", modes), &cfg, |b, cfg| {
            b.iter(|| {
                // Sequential shape: the same per-mode bisection the
                // parallel path runs, one mode at a time.
                let f: Vec<f64> = cfg
                    .grid()
                    .samples()
                    .iter()
                    .map(|&k| minimize_mode(cfg, Functional::Endpoint, k).unwrap())
                    .collect();
                black_box(f)
            });
        });
    }
    group.finish();
}

fn bench_scatter_sweep(c: &mut Criterion) {
    let lines = vec![TransmissionLineSpec::new(1.0, 1.0).unwrap(); 4];
    let mut mutual = nalgebra::DMatrix::identity(4, 4);
    let mut elastance = nalgebra::DMatrix::identity(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                mutual[(i, j)] = 0.1;
                elastance[(i, j)] = 0.05;
            }
        }
    }
    let junction =
        JunctionSpec::new(lines, mutual, elastance, &PhysicalConstants::natural()).unwrap();
    let omegas = log_spaced(1e-2, 1e2, 512);

    let mut group = c.benchmark_group("scatter_sweep");
    group.bench_function("par", |b| {
        b.iter(|| s_matrix_sweep(black_box(&junction), black_box(&omegas)));
    });
    group.bench_function("seq", |b| {
        b.iter(|| {
            let samples: Vec<_> = omegas
                .iter()
                .map(|&w| network_s_matrix(w, &junction).unwrap())
                .collect();
            black_box(samples)
        });
    });
    group.finish();
}

fn bench_curvature_grid(c: &mut Criterion) {
    let fam = MetricFamily::new(0.5, 1.0).unwrap();
    let grid = log_spaced(1e-2, 1e2, 4096);
    let mut group = c.benchmark_group("curvature_grid");
    group.bench_function("par", |b| {
        b.iter(|| curvature_report(black_box(&fam), black_box(&grid)).unwrap());
    });
    group.bench_function("seq", |b| {
        b.iter(|| {
            let samples: Vec<_> = grid.iter().map(|&z| curvature_at(&fam, z).unwrap()).collect();
            black_box(samples)
        });
    });
    group.finish();
}

fn bench_variance_grid(c: &mut Criterion) {
    let qs = log_spaced(0.1, 20.0, 64);
    let mut group = c.benchmark_group("variance_grid");
    group.bench_function("par", |b| {
        b.iter(|| {
            txh_core::exec::map_slice(&qs, |&q| {
                charge_variance_quadrature(QFactorRegime::new(q).unwrap(), 1.0, 1.0).unwrap()
            })
        });
    });
    group.bench_function("seq", |b| {
        b.iter(|| {
            let v: Vec<f64> = qs
                .iter()
                .map(|&q| {
                    charge_variance_quadrature(QFactorRegime::new(q).unwrap(), 1.0, 1.0).unwrap()
                })
                .collect();
            black_box(v)
        });
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_mode_minimisation,
    bench_scatter_sweep,
    bench_curvature_grid,
    bench_variance_grid
);
criterion_main!(benches);
