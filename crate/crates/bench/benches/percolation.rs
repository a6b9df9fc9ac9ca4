use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qcpower_core::percolation::{critical_occupation, k_curve, KCurveConfig, LatticeKind, LatticeSpec};

fn spanning(c: &mut Criterion) {
    let mut g = c.benchmark_group("critical_occupation");
    for kind in LatticeKind::ALL {
        for size in [32, 128] {
            let lattice = LatticeSpec::new(kind, size).unwrap().build();
            g.bench_with_input(BenchmarkId::new(kind.name(), size), &lattice, |b, lat| {
                let mut trial = 0;
                b.iter(|| {
                    trial += 1;
                    black_box(critical_occupation(lat, 7, trial))
                })
            });
        }
    }
    g.finish();
}

fn kcurve(c: &mut Criterion) {
    let cfg = KCurveConfig {
        size: 32,
        trials: 4,
        seed: 1,
        c0: 1.0,
    };
    let mut g = c.benchmark_group("k_curve");
    g.sample_size(10);
    g.bench_function("L32_x5", |b| b.iter(|| k_curve(black_box(&[0.0, 0.1, 0.2, 0.3, 0.4]), &cfg).unwrap()));
    g.finish();
}

criterion_group!(benches, spanning, kcurve);
criterion_main!(benches);
