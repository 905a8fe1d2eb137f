use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use heatchan_core::sim::simulate_matched_filter_noise;
use heatchan_core::szego::{szego_sweep, TestFunctionSpec};
use heatchan_core::tf_plane::{capacity_integral_quad, solve_nu};
use heatchan_core::waterfill::{capacity_waterfill, rd_reverse_waterfill};
use heatchan_core::{apply_kernel, FilterParams, Grid, HermiteBasis, SimConfig};

fn bench_waterfilling(c: &mut Criterion) {
    let p = FilterParams::from_dof(50.0, 1.0).unwrap();
    c.bench_function("capacity_waterfill_ab50", |b| {
        b.iter(|| capacity_waterfill(&p, black_box(20.0), black_box(0.01), 1e-12).unwrap())
    });
    c.bench_function("rd_reverse_waterfill_ab50", |b| {
        b.iter(|| rd_reverse_waterfill(&p, black_box(5.0), black_box(1.0), 1e-12).unwrap())
    });
}

fn bench_tf_plane(c: &mut Criterion) {
    let p = FilterParams::from_dof(50.0, 1.0).unwrap();
    c.bench_function("solve_nu_ab50", |b| {
        b.iter(|| solve_nu(&p, black_box(0.01), black_box(20.0)).unwrap())
    });
    c.bench_function("capacity_integral_quad_ab50", |b| {
        b.iter(|| capacity_integral_quad(&p, black_box(0.01), black_box(0.051)))
    });
}

fn bench_hermite(c: &mut Criterion) {
    let basis = HermiteBasis::new(1.0, 200).unwrap();
    c.bench_function("hermite_eval_all_200", |b| {
        b.iter(|| basis.eval_all(black_box(3.7)))
    });
}

fn bench_filter(c: &mut Criterion) {
    let p = FilterParams::derive(1.0, 2.0).unwrap();
    let basis = HermiteBasis::new(p.gamma(), 4).unwrap();
    let grid = Grid::for_filter(&p, 4);
    let input: Vec<f64> = grid.points().map(|t| basis.eval(0, t).unwrap()).collect();
    c.bench_function("apply_kernel_ab2", |b| {
        b.iter(|| apply_kernel(&p, black_box(&input), &grid).unwrap())
    });
}

fn bench_szego(c: &mut Criterion) {
    let spec = TestFunctionSpec::log_plus(1.0, 4.0).unwrap();
    c.bench_function("szego_sweep_log_plus", |b| {
        b.iter(|| szego_sweep(&spec, black_box(&[10.0, 100.0, 1000.0]), 1.0).unwrap())
    });
}

fn bench_simulation(c: &mut Criterion) {
    let p = FilterParams::derive(1.0, 2.0).unwrap();
    let cfg = SimConfig::new(p, 1.0, 200, 7, 5).unwrap();
    c.bench_function("matched_filter_noise_200_trials", |b| {
        b.iter(|| simulate_matched_filter_noise(black_box(&cfg)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_waterfilling,
    bench_tf_plane,
    bench_hermite,
    bench_filter,
    bench_szego,
    bench_simulation
);
criterion_main!(benches);
