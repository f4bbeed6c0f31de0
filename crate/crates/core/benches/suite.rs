//! Sequential against parallel evaluation of a mixed case grid.

use criterion::{criterion_group, criterion_main, Criterion};
use qsv_core::par::Execution;
use qsv_core::suite::{lookup, run_entries};
use qsv_core::{Base, TruncationPolicy};

fn grid(c: &mut Criterion) {
    let entries: Vec<_> =
        ["curious_expansion", "curious_phi21", "q_curious_beta", "curious_beta", "inverse_pair_special"]
            .iter()
            .map(|id| lookup(id).expect("registered id"))
            .collect();
    let qs: Vec<Base> = [0.3, 0.5, 0.8].iter().map(|&q| Base::new(q).unwrap()).collect();
    let policy = TruncationPolicy::default();
    let mut group = c.benchmark_group("suite_grid");
    group.sample_size(10);
    for (name, exec) in [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)] {
        group.bench_function(name, |b| b.iter(|| run_entries(&entries, &qs, 4, 42, exec, &policy)));
    }
    group.finish();
}

criterion_group!(benches, grid);
criterion_main!(benches);
