use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use texpack_core::param::{parameterize, ParamOptions, SolveOptions, Solver};
use texpack_core::raster::{bake_texture, BakeOptions};
use texpack_core::repair::{repair_component, RepairOptions};
use texpack_core::synth;

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("harmonic_solve");
    group.sample_size(10);
    for n in [1_000, 10_000, 50_000] {
        let mesh = synth::random_disk(1, n);
        for solver in [Solver::Pcg, Solver::Dense] {
            if solver == Solver::Dense && n > 2_000 {
                continue;
            }
            let opts = ParamOptions {
                solve: SolveOptions {
                    solver,
                    ..Default::default()
                },
                ..Default::default()
            };
            group.bench_with_input(BenchmarkId::new(format!("{solver:?}"), n), &mesh, |b, m| {
                b.iter(|| parameterize(black_box(m), &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn bake(c: &mut Criterion) {
    let mesh = synth::random_disk(2, 20_000);
    let uv = parameterize(&mesh, &ParamOptions::default()).unwrap().uv;
    let atlas = [synth::gradient(1024)];
    let mut group = c.benchmark_group("bake");
    group.sample_size(10);
    for res in [512, 2048] {
        group.bench_with_input(BenchmarkId::from_parameter(res), &res, |b, &res| {
            b.iter(|| bake_texture(&mesh, &uv, &atlas, &BakeOptions::square(res)).unwrap())
        });
    }
    group.finish();
}

fn repair(c: &mut Criterion) {
    let mut group = c.benchmark_group("repair");
    group.sample_size(10);
    for (name, mesh) in [
        ("thin_torus", synth::torus(96, 16, 1.0, 0.005)),
        ("double_torus", synth::double_torus(48, 16)),
    ] {
        group.bench_function(name, |b| b.iter(|| repair_component(black_box(&mesh), &RepairOptions::default()).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, solve, bake, repair);
criterion_main!(benches);
