use criterion::{criterion_group, criterion_main, Criterion};
use lzcat::{evolve_observables, Model};
use lzcat_bench::{cat_state, config, params};

fn evolve(c: &mut Criterion) {
    let state = cat_state();
    let cfg = config();
    let mut g = c.benchmark_group("evolve_observables");
    g.sample_size(10);
    for (name, model) in [("rwa", Model::Rwa), ("full", Model::Full)] {
        let p = params(model);
        g.bench_function(name, |b| b.iter(|| evolve_observables(&state, &p, &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, evolve);
criterion_main!(benches);
