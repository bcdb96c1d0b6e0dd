use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rabi2p_bench::{energies, reference_params, z0};
use rabi2p_core::chen::{g_chen, ChenG};
use rabi2p_core::oracle::{self, sector_block, LevelSelection};
use rabi2p_core::solver::{find_zeros, RootFindConfig};
use rabi2p_core::travenec::{g_travenec, DEFAULT_TERMS};
use rabi2p_core::zhang::g_zhang;
use rabi2p_core::{Phase, SymmetrySector};

fn evaluations(c: &mut Criterion) {
    let p = reference_params();
    let grid = energies(64);
    let mut group = c.benchmark_group("evaluate_64");
    group.bench_function("chen", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&e| g_chen(&p, black_box(e), Phase::Plus).unwrap().value)
                .sum::<f64>()
        })
    });
    group.bench_function("zhang", |b| {
        b.iter(|| {
            grid.iter()
                .filter_map(|&e| g_zhang(&p, SymmetrySector::EVEN_PLUS, black_box(e)).ok())
                .map(|g| g.value)
                .sum::<f64>()
        })
    });
    group.bench_function("travenec", |b| {
        b.iter(|| {
            grid.iter()
                .map(|&e| {
                    g_travenec(&p, black_box(e), z0(), DEFAULT_TERMS)
                        .unwrap()
                        .value
                        .re
                })
                .sum::<f64>()
        })
    });
    group.finish();
}

fn zero_search(c: &mut Criterion) {
    let p = reference_params();
    let g = ChenG::new(p, Phase::Plus).unwrap();
    let config = RootFindConfig::for_params(&p, 21.0).unwrap();
    c.bench_function("chen_zeros_below_21", |b| {
        b.iter(|| {
            find_zeros(&g, p.omega(), black_box(&config))
                .unwrap()
                .zeros
                .len()
        })
    });
}

fn diagonalization(c: &mut Criterion) {
    let p = reference_params();
    let mut group = c.benchmark_group("oracle");
    for n_max in [128usize, 512, 2048] {
        let block = sector_block(&p, SymmetrySector::EVEN_PLUS, n_max);
        group.bench_with_input(BenchmarkId::new("lowest_8", n_max), &block, |b, t| {
            b.iter(|| oracle::lowest_eigenvalues(black_box(t), 8))
        });
    }
    group.bench_function("converged_lowest_8", |b| {
        b.iter(|| {
            oracle::eigenvalues(
                &p,
                SymmetrySector::EVEN_PLUS,
                LevelSelection::Lowest(8),
                1e-10,
            )
            .unwrap()
        })
    });
    group.finish();
}

criterion_group!(benches, evaluations, zero_search, diagonalization);
criterion_main!(benches);
