use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use rrd_core::auxiliary::{eval_aux_bp, AuxSpec};
use rrd_core::harness::map_trials_with_threads;
use rrd_core::numerics::{gaussian_vector, RngStream};
use rrd_core::primal::{solve_primal, SolverConfig};
use rrd_core::problem::{sample_instance, ObjectiveSpec, SampleOptions, ShapeConfig};
use rrd_core::theory::{EpsilonConfig, Side};

const TRIALS: usize = 16;

fn primal_trial(n: usize, t: usize) -> f64 {
    let shape = ShapeConfig::new(n, 0.5, 0.5);
    let mut stream = RngStream::new(7, t as u64);
    let inst = sample_instance(
        &shape,
        &ObjectiveSpec::PurelyLinear,
        &mut stream,
        None,
        SampleOptions::default(),
    )
    .unwrap();
    solve_primal(&inst, &SolverConfig::default()).unwrap().objective
}

fn aux_trial(spec: &AuxSpec, t: usize) -> f64 {
    let g = gaussian_vector(&mut RngStream::new(7, t as u64), spec.shape.n).unwrap();
    eval_aux_bp(&g, spec).map(|e| e.value).unwrap_or(f64::NAN)
}

fn primal_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("primal_trials");
    group.sample_size(10);
    for n in [50, 100] {
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| map_trials_with_threads(TRIALS, Some(1), |t| primal_trial(n, t)))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| map_trials_with_threads(TRIALS, None, |t| primal_trial(n, t)))
        });
    }
    group.finish();
}

fn aux_trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("aux_bp_trials");
    let n = 400;
    let spec = AuxSpec::new(
        Side::Lower,
        ShapeConfig::new(n, 0.5, 0.5).with_beta(0.5),
        EpsilonConfig::default(),
        ObjectiveSpec::BpSplit { k: n / 2 },
    );
    group.bench_function("sequential", |b| {
        b.iter(|| map_trials_with_threads(256, Some(1), |t| aux_trial(&spec, t)))
    });
    group.bench_function("parallel", |b| {
        b.iter(|| map_trials_with_threads(256, None, |t| aux_trial(&spec, t)))
    });
    group.finish();
}

criterion_group!(benches, primal_trials, aux_trials);
criterion_main!(benches);
