use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dcqg_bench::recovery_matrix;
use dcqg_core::rasch::{
    estimate_abilities_mle, estimate_difficulties_mml, estimate_single_item_difficulty,
    EmConfig, Outcome, QuadratureGrid,
};

fn bench_mml(c: &mut Criterion) {
    let matrix = recovery_matrix(77, 100, 1);
    let grid = QuadratureGrid::default();
    let config = EmConfig::default();
    c.bench_function("mml_77x100", |b| {
        b.iter(|| estimate_difficulties_mml(black_box(&matrix), &grid, &config).unwrap())
    });
}

fn bench_ability_mle(c: &mut Criterion) {
    let matrix = recovery_matrix(77, 100, 2);
    let items =
        estimate_difficulties_mml(&matrix, &QuadratureGrid::default(), &EmConfig::default())
            .unwrap();
    c.bench_function("ability_mle_77x100", |b| {
        b.iter(|| estimate_abilities_mle(black_box(&matrix), &items).unwrap())
    });
}

fn bench_single_item(c: &mut Criterion) {
    let abilities: Vec<f64> = (0..77).map(|r| (r as f64 - 38.0) / 15.0).collect();
    let responses: Vec<Option<Outcome>> = (0..77)
        .map(|r| Some(if r % 3 == 0 { Outcome::Incorrect } else { Outcome::Correct }))
        .collect();
    c.bench_function("single_item_mle_77", |b| {
        b.iter(|| estimate_single_item_difficulty(black_box(&responses), &abilities).unwrap())
    });
}

criterion_group!(benches, bench_mml, bench_ability_mle, bench_single_item);
criterion_main!(benches);
