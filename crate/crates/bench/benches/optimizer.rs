use criterion::{criterion_group, criterion_main, Criterion};
use quokka_core::gen::{BenchSpec, Family};
use quokka_core::optimizer::{optimize, OptimizeOptions};
use quokka_core::LayoutParams;

fn table_circuits(c: &mut Criterion) {
    let mut g = c.benchmark_group("optimize_31");
    for family in [Family::Qft, Family::Qaoa { levels: 5 }, Family::Qv] {
        let raw = BenchSpec::new(family.clone(), 31, 1).generate().unwrap();
        for r in [0, 3] {
            let layout = LayoutParams::new(31, r, 10);
            g.bench_function(format!("{family}_r{r}"), |b| {
                b.iter(|| optimize(&raw, &layout, OptimizeOptions::default()).unwrap())
            });
        }
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = table_circuits
}
criterion_main!(benches);
