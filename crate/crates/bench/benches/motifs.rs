use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hiernet::motifs::{brute_force_motifs, enumerate_motifs};
use hiernet::Anchoring;
use hiernet_bench::{first_year, synthetic_store};

fn fast_counter(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_motifs");
    group.sample_size(10);
    for per_day in [30.0, 100.0, 300.0] {
        let store = synthetic_store(per_day, 1, 7);
        let w = first_year(&store);
        group.throughput(Throughput::Elements(store.in_window(w).len() as u64));
        for (name, anchoring) in [("participants", Anchoring::Participants), ("first_sender", Anchoring::FirstSender)] {
            group.bench_with_input(BenchmarkId::new(name, per_day), &store, |b, s| {
                b.iter(|| enumerate_motifs(s, w, 30, anchoring))
            });
        }
    }
    group.finish();
}

fn against_brute(c: &mut Criterion) {
    let mut group = c.benchmark_group("fast_vs_brute");
    group.sample_size(10);
    let store = synthetic_store(1.0, 1, 7);
    let w = first_year(&store);
    group.bench_function("fast", |b| b.iter(|| enumerate_motifs(&store, w, 7, Anchoring::Participants)));
    group.bench_function("brute", |b| b.iter(|| brute_force_motifs(&store, w, 7, Anchoring::Participants)));
    group.finish();
}

criterion_group!(benches, fast_counter, against_brute);
criterion_main!(benches);
