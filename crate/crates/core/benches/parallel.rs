//! Parallel against sequential evaluation of the same batch.
//!
//! `cargo bench -p repack-core` measures both variants; with
//! `--no-default-features` the library itself is sequential and only the
//! sequential variant is built.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use repack_core::geom::Tolerance;
use repack_core::io::Instance;
use repack_core::oracle::{gen_corridor, gen_grid};
use repack_core::pipeline::solve;
use repack_core::coloring::ColoringStrategy;

fn batch() -> Vec<Instance> {
    let mut out = Vec::new();
    for holes in [vec![(1, 1)], vec![(0, 0), (2, 2)], vec![(1, 0), (1, 2)]] {
        let g = gen_grid(3, 3, &holes).expect("grid generator");
        out.push(g.at(0, holes.len()));
        out.push(g.at(1, holes.len() + 1));
    }
    let c = gen_corridor(9.0, &[1.0, 4.5, 8.0]).expect("corridor generator");
    out.push(c.at(0, 1));
    out.push(c.at(1, 1));
    out
}

fn run(inst: &Instance) -> bool {
    solve(inst, ColoringStrategy::Exhaustive, &Tolerance::default()).map(|r| r.answer.is_yes()).unwrap_or(false)
}

macro_rules! parallel_variant {
    ($group: expr, $items: expr) => {
        #[cfg(feature = "parallel")]
        $group.bench_function("parallel", |b| b.iter(|| black_box(repack_core::par_map!($items, run))));
    };
}

fn solve_batch(c: &mut Criterion) {
    let items = batch();
    let mut group = c.benchmark_group("solve_batch");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| black_box(items.iter().map(run).collect::<Vec<_>>())));
    parallel_variant!(group, items);
    group.finish();
}

criterion_group!(benches, solve_batch);
criterion_main!(benches);
