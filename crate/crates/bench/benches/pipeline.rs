use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use qcpower_bench::sample_params;
use qcpower_core::distill::distill_channel;
use qcpower_core::models::{deformation_parameter, eigensystem};
use qcpower_core::pauli::error_distribution;
use qcpower_core::phase::{boundary_temperature, evaluate_point, Dim};
use qcpower_core::thermal::thermal_state;
use qcpower_core::ModelParams;

fn unit(c: &mut Criterion) {
    let p = ModelParams::xxz(0.3);
    c.bench_function("eigensystem", |b| b.iter(|| eigensystem(black_box(&p)).unwrap()));
    c.bench_function("thermal_state", |b| b.iter(|| thermal_state(black_box(&p), 0.16).unwrap()));
    let st = thermal_state(&p, 0.16).unwrap();
    let a = deformation_parameter(&p).unwrap();
    c.bench_function("distill_and_twirl", |b| {
        b.iter(|| error_distribution(&distill_channel(black_box(&st), a).unwrap()).unwrap())
    });
}

fn phase(c: &mut Criterion) {
    let params = sample_params();
    c.bench_function("evaluate_point", |b| {
        b.iter(|| {
            for p in &params {
                black_box(evaluate_point(p, 0.1, None).unwrap());
            }
        })
    });
    let mut g = c.benchmark_group("boundary");
    g.sample_size(10);
    g.bench_function("t_star_3d_heisenberg", |b| {
        b.iter(|| boundary_temperature(&ModelParams::xxz(0.0), Dim::Three, None, 1e-6).unwrap())
    });
    g.finish();
}

criterion_group!(benches, unit, phase);
criterion_main!(benches);
