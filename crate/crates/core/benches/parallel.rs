//! Sequential (`jobs = 1`) against rayon for the two data-parallel kernels:
//! level-synchronous enumeration and batch canonicalization.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use opb::canonical::{canonical_keys, random_equivalent};
use opb::io::dataset;
use opb::lattice::{enumerate_classes, Budget, EnumerateOptions};
use opb::pattern::PatternMatrix;

const MODES: [(&str, Option<usize>); 2] = [("sequential", Some(1)), ("rayon", None)];

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    // n = 4 up to ν = 7: the first 1439 classes
    let cases = [("n3", 3, None), ("n4-to-nu7", 4, Some(1439))];
    for (label, n, max_nodes) in cases {
        for (mode, jobs) in MODES {
            let options = EnumerateOptions {
                maximal_only: false,
                budget: Budget {
                    max_nodes,
                    max_time: None,
                },
                jobs,
            };
            group.bench_with_input(BenchmarkId::new(mode, label), &options, |b, o| {
                b.iter(|| black_box(enumerate_classes(n, o).unwrap().classes_seen))
            });
        }
    }
    group.finish();
}

fn canonicalization(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let batch: Vec<PatternMatrix> = dataset::matrices("n4-classes")
        .iter()
        .flat_map(|m| (0..8).map(|_| random_equivalent(m, &mut rng)).collect::<Vec<_>>())
        .collect();
    let mut group = c.benchmark_group("canonical-keys");
    group.sample_size(10);
    for (mode, jobs) in MODES {
        group.bench_with_input(BenchmarkId::new(mode, batch.len()), &batch, |b, ms| {
            b.iter(|| black_box(canonical_keys(ms, jobs).unwrap().len()))
        });
    }
    group.finish();
}

criterion_group!(benches, enumeration, canonicalization);
criterion_main!(benches);
