//! Criterion benchmarks for the hot kernels: spectral and singular operator
//! application, the dyadic scans, and solver iteration throughput.

use criterion::{criterion_group, criterion_main, Criterion};
use fraclab_core::capacity::DyadicSet;
use fraclab_core::fracops::{self, FracOrder, OperatorMethod};
use fraclab_core::grid::{sample, subtract_mean, Grid, TestFamily};
use fraclab_core::norms;
use fraclab_core::solver::{variational_capacity, CapacityKind, CapacityProblem, SolverParams};
use std::hint::black_box;

fn bench_spectral(c: &mut Criterion) {
    let ord1 = FracOrder::new(1, 0.5).unwrap();
    let g1 = Grid::new(1, 1024, 16.0, true).unwrap();
    let u1 = sample(&TestFamily::gaussian(1.0), g1).unwrap();
    c.bench_function("frac_laplacian_spectral_1d_1024", |b| {
        b.iter(|| black_box(fracops::frac_laplacian(&u1, &ord1, OperatorMethod::Spectral).unwrap()))
    });
    let ord2 = FracOrder::new(2, 0.5).unwrap();
    let g2 = Grid::new(2, 128, 8.0, true).unwrap();
    let u2 = sample(&TestFamily::gaussian(1.0), g2).unwrap();
    c.bench_function("frac_laplacian_spectral_2d_128", |b| {
        b.iter(|| black_box(fracops::frac_laplacian(&u2, &ord2, OperatorMethod::Spectral).unwrap()))
    });
}

fn bench_singular(c: &mut Criterion) {
    let ord = FracOrder::new(1, 0.5).unwrap();
    let g = Grid::new(1, 512, 16.0, true).unwrap();
    let u = sample(&TestFamily::gaussian(1.0), g).unwrap();
    c.bench_function("frac_laplacian_singular_1d_512", |b| {
        b.iter(|| black_box(fracops::frac_laplacian(&u, &ord, OperatorMethod::Singular).unwrap()))
    });
}

fn bench_scans(c: &mut Criterion) {
    let g = Grid::new(2, 128, 8.0, true).unwrap();
    let u = sample(&TestFamily::LogAbs, g).unwrap();
    c.bench_function("bmo_norm_2d_128", |b| {
        b.iter(|| black_box(norms::bmo_norm(&u).unwrap()))
    });
    let set = DyadicSet::ball(g, &[0.0, 0.0], 1.0).unwrap();
    c.bench_function("hausdorff_content_2d_128", |b| {
        b.iter(|| black_box(fraclab_core::capacity::hausdorff_content(&set, 1.5).unwrap()))
    });
}

fn bench_solver(c: &mut Criterion) {
    let g = Grid::new(1, 128, 8.0, true).unwrap();
    let u = subtract_mean(&sample(&TestFamily::bump(1.0), g).unwrap());
    let set = DyadicSet::super_level(&u, 0.25);
    let ord = FracOrder::new(1, 0.5).unwrap();
    // fixed iteration budget so the benchmark measures throughput
    let params = SolverParams {
        max_iter: 500,
        tol_gap: 1e-30,
        ..Default::default()
    };
    c.bench_function("capacity_iterations_1d_128", |b| {
        b.iter(|| {
            black_box(
                variational_capacity(&CapacityProblem {
                    set: set.clone(),
                    kind: CapacityKind::Hs1,
                    ord,
                    params: params.clone(),
                })
                .unwrap(),
            )
        })
    });
}

criterion_group!(
    benches,
    bench_spectral,
    bench_singular,
    bench_scans,
    bench_solver
);
criterion_main!(benches);
