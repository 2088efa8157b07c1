//! Benchmarks for the measure kernels and the windowed-series pipeline,
//! comparing the rayon data-parallel path against the sequential one on the
//! same inputs. Run with `cargo bench -p mured-core`.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rayon::prelude::*;

use mured_core::distribution::{JointDistribution, VariableSet};
use mured_core::ingest::{self, CategoricalDataset, SeriesOptions, WindowSpec};
use mured_core::measures::{self, IpfOptions};
use mured_core::synth;
use mured_core::MeasureKind;

fn random_dists(arity: usize, count: usize) -> Vec<JointDistribution> {
    (0..count as u64)
        .map(|seed| synth::random_distribution(seed, &vec![2; arity], 0.0).unwrap())
        .collect()
}

fn bench_transmission(c: &mut Criterion) {
    let mut group = c.benchmark_group("transmission_n");
    for arity in [3usize, 4, 5, 6] {
        let dist = synth::random_distribution(42, &vec![2; arity], 0.0).unwrap();
        let vars = dist.variable_set();
        group.bench_with_input(BenchmarkId::from_parameter(arity), &arity, |b, _| {
            b.iter(|| measures::transmission_n(black_box(&dist), black_box(&vars)).unwrap())
        });
    }
    group.finish();
}

fn bench_mutual_redundancy(c: &mut Criterion) {
    let dist = synth::random_distribution(42, &[2, 2, 2, 2], 0.0).unwrap();
    let vars = dist.variable_set();
    c.bench_function("mutual_redundancy/dual_route_arity4", |b| {
        b.iter(|| measures::mutual_redundancy(black_box(&dist), black_box(&vars)).unwrap())
    });
}

fn bench_ipf(c: &mut Criterion) {
    let mut group = c.benchmark_group("ipf_fit");
    let opts = IpfOptions::default();

    let parity = synth::parity(3).unwrap();
    group.bench_function("parity3_pairwise", |b| {
        b.iter(|| measures::ipf_fit(black_box(&parity), 2, &opts).unwrap())
    });

    let random = synth::random_distribution(7, &[3, 3, 3], 0.0).unwrap();
    group.bench_function("random_3x3x3_pairwise", |b| {
        b.iter(|| measures::ipf_fit(black_box(&random), 2, &opts).unwrap())
    });
    group.finish();
}

/// Batch evaluation of the sign law over 200 random tables: the inner loop
/// the acceptance suite runs, sequential versus rayon.
fn bench_batch_redundancy(c: &mut Criterion) {
    let dists = random_dists(4, 200);
    let vars = dists[0].variable_set();
    let mut group = c.benchmark_group("batch_redundancy_200x4var");

    group.bench_function("sequential", |b| {
        b.iter(|| {
            dists
                .iter()
                .map(|d| measures::mutual_redundancy(d, &vars).unwrap())
                .sum::<f64>()
        })
    });
    group.bench_function("rayon", |b| {
        b.iter(|| {
            dists
                .par_iter()
                .map(|d| measures::mutual_redundancy(d, &vars).unwrap())
                .sum::<f64>()
        })
    });
    group.finish();
}

fn series_dataset(years: usize, rows_per_year: usize) -> CategoricalDataset {
    let columns = vec![
        "year".to_string(),
        "x".to_string(),
        "y".to_string(),
        "z".to_string(),
    ];
    let mut rows = Vec::with_capacity(years * rows_per_year);
    let mut state = 0x9e3779b97f4a7c15u64;
    for year in 0..years {
        for _ in 0..rows_per_year {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1);
            let bits = (state >> 33) as usize;
            rows.push(vec![
                (1980 + year).to_string(),
                (bits & 1).to_string(),
                ((bits >> 1) & 1).to_string(),
                ((bits >> 2) & 1).to_string(),
            ]);
        }
    }
    let mut ds = CategoricalDataset::new(columns, rows).unwrap();
    ds.set_time_column("year").unwrap();
    ds
}

/// The windowed-series pipeline end to end, parallel versus sequential
/// window evaluation.
fn bench_series(c: &mut Criterion) {
    let dataset = series_dataset(26, 400);
    let vars = VariableSet::from_names(["x", "y", "z"]).unwrap();
    let spec = WindowSpec::sliding(3, 1).unwrap();
    let mut group = c.benchmark_group("measure_series_26y_sliding3");

    for (name, parallel) in [("sequential", false), ("rayon", true)] {
        let options = SeriesOptions {
            parallel,
            ..SeriesOptions::new()
        };
        group.bench_function(name, |b| {
            b.iter(|| {
                ingest::measure_series(
                    black_box(&dataset),
                    &vars,
                    MeasureKind::Transmission,
                    &spec,
                    &options,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_transmission,
    bench_mutual_redundancy,
    bench_ipf,
    bench_batch_redundancy,
    bench_series
);
criterion_main!(benches);
