//! Sequential vs parallel runs of the enumeration-heavy operations. With the
//! `parallel` feature the sequential side is a one-thread rayon pool; without
//! it only the sequential fallback is measured.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qalg::algebra::enumerate_algebras;
use qalg::equations::presets;
use qalg::free::free_algebra;
use qalg::metric::MetricSpace;
use qalg::monads::{self, check_enriched};
use qalg::Dist;

fn square() -> Arc<MetricSpace> {
    let one = Dist::ONE;
    Arc::new(
        MetricSpace::from_pairs(
            &["a", "b", "c", "d"],
            &[("a", "b", one), ("b", "c", one), ("c", "d", one), ("d", "a", one), ("a", "c", Dist::int(2)), ("b", "d", Dist::int(2))],
        )
        .unwrap(),
    )
}

type Workload = (&'static str, Box<dyn Fn() + Send + Sync>);

fn workloads() -> Vec<Workload> {
    let m = square();
    let m2 = m.clone();
    let m3 = m.clone();
    let word = monads::by_name("word", 2, Dist::ONE).unwrap();
    vec![
        (
            "free_semilattice",
            Box::new(move || {
                black_box(free_algebra(&presets::semilattice(), m.clone(), 4).unwrap());
            }),
        ),
        (
            "enumerate_monoid_tables",
            Box::new(move || {
                let p = presets::almost_commutative(Dist::ratio(1, 2));
                let c = Arc::new(m2.subspace(&[0, 1, 2]));
                black_box(enumerate_algebras(&p.signature, &c, 1 << 20).unwrap());
            }),
        ),
        (
            "enriched_word",
            Box::new(move || {
                black_box(check_enriched(word.as_ref(), &m3, &m3).unwrap());
            }),
        ),
    ]
}

fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("parallel");
    group.sample_size(10);
    for (name, run) in workloads() {
        #[cfg(feature = "parallel")]
        {
            let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
            group.bench_function(BenchmarkId::new("sequential", name), |b| b.iter(|| one.install(&run)));
            group.bench_function(BenchmarkId::new("rayon", name), |b| b.iter(&run));
        }
        #[cfg(not(feature = "parallel"))]
        group.bench_function(BenchmarkId::new("sequential", name), |b| b.iter(&run));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
