// SPDX-License-Identifier: MIT OR Apache-2.0

//! Replication-driver benchmark: data-parallel vs serial execution of a
//! representative Monte Carlo workload (simulate a path, estimate its
//! variance track, take the maximal partial sum).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nonstat::gaussian::max_partial_sum;
use nonstat::models::{theta_path, InnovationSpec, ThetaKind, TvarModel};
use nonstat::parallel::{replicate_map, replicate_map_serial};
use nonstat::rng::stage;
use nonstat::variance::brv;

fn workload(model: &TvarModel, seed: u64) -> f64 {
    let x = model.simulate(seed);
    let track = brv(&x, 8).expect("valid block length");
    max_partial_sum(&x) + track.values()[x.n() - 1].sqrt()
}

fn bench_replication(c: &mut Criterion) {
    let n = 600;
    let model = TvarModel::new(
        theta_path(ThetaKind::Piecewise4, 0.4, n).expect("valid theta"),
        InnovationSpec::standard_normal(),
    );
    let reps = 64;
    let mut group = c.benchmark_group("replicate");
    group.bench_with_input(BenchmarkId::new("parallel", reps), &reps, |b, &reps| {
        b.iter(|| {
            replicate_map(reps, 42, stage::REPLICATION, |_, seed| workload(&model, seed))
        })
    });
    group.bench_with_input(BenchmarkId::new("serial", reps), &reps, |b, &reps| {
        b.iter(|| {
            replicate_map_serial(reps, 42, stage::REPLICATION, |_, seed| {
                workload(&model, seed)
            })
        })
    });
    group.finish();
}

criterion_group!(benches, bench_replication);
criterion_main!(benches);
