use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use vat_game::oracle::run_validation;
use vat_game::presets::SECTION6;
use vat_game::region::{rasterize, Axis, RegionGrid};
use vat_game::{Execution, SanctionBaseMode};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn validation(c: &mut Criterion) {
    let mut group = c.benchmark_group("validation");
    group.sample_size(10);
    for draws in [250usize, 1000] {
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(name, draws), &draws, |b, &n| {
                b.iter(|| run_validation(42, n, exec))
            });
        }
    }
    group.finish();
}

fn region(c: &mut Criterion) {
    let grid = RegionGrid {
        theta: Axis::new(0.0, 1.0, 0.005),
        gamma: Axis::new(0.0, 1.0, 0.01),
    };
    let mut group = c.benchmark_group("region_201x101");
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| {
                rasterize(
                    &grid,
                    &SECTION6.policy,
                    &SECTION6.endowments,
                    SanctionBaseMode::PaperLiteral,
                    exec,
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, validation, region);
criterion_main!(benches);
