use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use trl_bench::library;
use trl_core::graph::BasedGraph;
use trl_core::hasse::{enumerate_admissible, HasseDiagram};

fn enumerate(c: &mut Criterion) {
    for n in [3, 4, 5] {
        c.bench_function(&format!("enumerate/n{n}"), |b| b.iter(|| enumerate_admissible(black_box(n))));
    }
}

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("diagram");
    group.sample_size(10);
    for name in ["five_gen", "x1"] {
        let lib = library(name);
        group.bench_function(name, |b| b.iter(|| HasseDiagram::build(black_box(&lib)).unwrap()));
    }
    group.finish();
}

fn embed(c: &mut Criterion) {
    let shapes = enumerate_admissible(4);
    let graphs: Vec<BasedGraph> = shapes.iter().map(BasedGraph::from_shape).collect();
    c.bench_function("psi_embed/all_n4", |b| {
        b.iter(|| graphs.iter().filter(|g| g.psi_embed().is_ok()).count())
    });
}

criterion_group!(benches, enumerate, build, embed);
criterion_main!(benches);
