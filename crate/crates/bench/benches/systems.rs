use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fmsys::commutative;
use fmsys::io::{build_io_pair, io_contractivity_norm};
use fmsys::noncommutative::{nc_output_transform, nc_transfer_eval, nc_transfer_series, simulate_levels, simulate_words};
use fmsys::random::{random_lattice_input, random_word_input};
use fmsys_bench::fixture;

fn simulation(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate");
    for level in [4usize, 6, 8] {
        let mut f = fixture(2, 3, 1);
        let u = random_word_input(&mut f.rng, 2, 1, 3).unwrap();
        group.bench_with_input(BenchmarkId::new("words_d2", level), &level, |b, &n| {
            b.iter(|| simulate_words(&f.sys, black_box(&u), &f.x0, n).unwrap())
        });
        if level <= 6 {
            group.bench_with_input(BenchmarkId::new("levels_d2", level), &level, |b, &n| {
                b.iter(|| simulate_levels(&f.sys, black_box(&u), &f.x0, n).unwrap())
            });
        }
    }
    for level in [10u32, 20] {
        let mut f = fixture(3, 3, 1);
        let u = random_lattice_input(&mut f.rng, 3, 1, 3);
        group.bench_with_input(BenchmarkId::new("lattice_d3", level), &level, |b, &n| {
            b.iter(|| commutative::simulate(&f.sys, black_box(&u), &f.x0, n).unwrap())
        });
    }
    group.finish();
}

fn frequency(c: &mut Criterion) {
    let mut group = c.benchmark_group("frequency");
    let mut f = fixture(3, 4, 3);
    let u = random_word_input(&mut f.rng, 3, 1, 3).unwrap();
    group.bench_function("transfer_eval_k3", |b| b.iter(|| nc_transfer_eval(&f.sys, black_box(&f.tuple)).unwrap()));
    group.bench_function("transfer_series_k3_n28", |b| {
        b.iter(|| nc_transfer_series(&f.sys, black_box(&f.tuple), 28).unwrap())
    });
    group.bench_function("output_transform_k3_n20", |b| {
        b.iter(|| nc_output_transform(&f.sys, black_box(&u), &f.x0, &f.tuple, 20).unwrap())
    });
    group.finish();
}

fn io_operators(c: &mut Criterion) {
    let mut group = c.benchmark_group("io");
    group.sample_size(10);
    let f = fixture(2, 3, 1);
    for level in [3usize, 5, 6] {
        group.bench_with_input(BenchmarkId::new("build_d2", level), &level, |b, &n| {
            b.iter(|| build_io_pair(black_box(&f.sys), n).unwrap())
        });
        let pair = build_io_pair(&f.sys, level).unwrap();
        group.bench_with_input(BenchmarkId::new("norm_d2", level), &pair, |b, p| b.iter(|| io_contractivity_norm(black_box(p))));
    }
    group.finish();
}

criterion_group!(benches, simulation, frequency, io_operators);
criterion_main!(benches);
