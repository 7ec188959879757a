use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use orlicz_kit::corpus;
use orlicz_kit::fields_norms::{global_norm, BallFamily, Grid};
use orlicz_kit::operators::{frac_integral, hl_maximal};
use orlicz_kit::par;
use orlicz_kit::weights_kernels::{KernelFunction, WeightFunction};
use orlicz_kit::young_calc::YoungFunction;

fn bench(c: &mut Criterion) {
    let g1 = Grid::new(1, 4.0, 0.005).unwrap();
    let g2 = Grid::new(2, 1.0, 0.02).unwrap();
    let f1 = corpus::generate(1, 1, 7)[0].sample(g1);
    let f2 = corpus::generate(1, 2, 7)[0].sample(g2);
    let fam1 = BallFamily::half_octave(&g1);
    let fam2 = BallFamily::half_octave(&g2);
    let phi = YoungFunction::Power { p: 2.0 };
    let w = WeightFunction::Power { lambda: -1.0 };
    let rho = KernelFunction::power(0.25);

    let mut group = c.benchmark_group("par_vs_seq");
    group.sample_size(10);
    for (mode, sequential) in [("parallel", false), ("sequential", true)] {
        par::set_sequential(sequential);
        group.bench_with_input(BenchmarkId::new("hl_maximal_1d", mode), &f1, |b, f| {
            b.iter(|| hl_maximal(f, &fam1).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("hl_maximal_2d", mode), &f2, |b, f| {
            b.iter(|| hl_maximal(f, &fam2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("frac_integral_1d", mode), &f1, |b, f| {
            b.iter(|| frac_integral(f, &rho).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("global_norm_1d", mode), &f1, |b, f| {
            b.iter(|| global_norm(f, &phi, &w, &fam1, false))
        });
    }
    par::set_sequential(false);
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
