use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use gdbench_core::mc::{run_experiment_with, ExperimentConfig, ExperimentId};
use gdbench_core::parallel::Execution;

fn config(id: ExperimentId, trials: usize) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::defaults(id);
    cfg.trials = trials;
    cfg.oracle_starts = 10;
    cfg
}

fn bench_execution(c: &mut Criterion) {
    let cases = [
        ("fig1a", config(ExperimentId::Fig1a, 200)),
        ("fig3a", config(ExperimentId::Fig3a, 8)),
    ];
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);
    for (name, cfg) in &cases {
        for exec in [Execution::Sequential, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(*name, format!("{exec:?}")), cfg, |b, cfg| {
                b.iter(|| run_experiment_with(cfg, exec, None).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_execution);
criterion_main!(benches);
