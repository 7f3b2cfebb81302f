use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use resdep_core::dispatch::{solve_horizon, solve_slot, DispatchProblem};

fn slot(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_slot");
    for n in [2usize, 16, 256] {
        let w: Vec<f64> = (0..n).map(|i| 1.0 + (i % 7) as f64).collect();
        let p: Vec<f64> = (0..n).map(|i| 2.0 + (i % 5) as f64).collect();
        let g = p.iter().sum::<f64>() * 0.6;
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| black_box(solve_slot(&w, &p, g).unwrap()))
        });
    }
    group.finish();
}

fn horizon(c: &mut Criterion) {
    let (n, k) = (4, 96);
    let problem = DispatchProblem {
        weights: vec![1.0, 2.0, 0.5, 4.0],
        p_req: (0..n).map(|i| (0..k).map(|j| ((i + j) % 9) as f64 + 1.0).collect()).collect(),
        p_grid: (0..k).map(|j| 10.0 + (j % 4) as f64).collect(),
    };
    c.bench_function("solve_horizon/4x96", |b| b.iter(|| black_box(solve_horizon(&problem).unwrap())));
}

criterion_group!(benches, slot, horizon);
criterion_main!(benches);
