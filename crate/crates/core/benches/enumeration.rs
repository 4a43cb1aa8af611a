use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use primword::pairs::{construct_e1, construct_e2, oracle_counts, DEFAULT_BUDGET};
use primword::properties::check_extension_pair;

type Job = (&'static str, u64, usize, fn(u64, usize) -> usize);

const JOBS: [Job; 4] = [
    ("oracle_counts", 2, 5, |n, l| {
        let (a, b) = oracle_counts(n, l, DEFAULT_BUDGET).unwrap();
        (a + b) as usize
    }),
    ("oracle_counts", 3, 3, |n, l| {
        let (a, b) = oracle_counts(n, l, DEFAULT_BUDGET).unwrap();
        (a + b) as usize
    }),
    ("construct_e1", 2, 10, |n, l| {
        construct_e1(n, l, DEFAULT_BUDGET).unwrap().len()
    }),
    ("construct_e2", 2, 10, |n, l| {
        construct_e2(n, l, DEFAULT_BUDGET).unwrap().len()
    }),
];

#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, rayon::ThreadPool)> {
    let pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
    };
    vec![("sequential", pool(1)), ("parallel", pool(0))]
}

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumeration");
    group.sample_size(10);
    for (name, n, l, job) in JOBS {
        let id = format!("{name}/n={n},l={l}");
        #[cfg(feature = "parallel")]
        for (mode, pool) in modes() {
            group.bench_with_input(BenchmarkId::new(mode, &id), &(n, l), |b, &(n, l)| {
                b.iter(|| pool.install(|| black_box(job(n, l))))
            });
        }
        #[cfg(not(feature = "parallel"))]
        group.bench_with_input(BenchmarkId::new("fallback", &id), &(n, l), |b, &(n, l)| {
            b.iter(|| black_box(job(n, l)))
        });
    }
    group.finish();
}

fn bench_properties(c: &mut Criterion) {
    let mut group = c.benchmark_group("properties");
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    for (mode, pool) in modes() {
        group.bench_function(BenchmarkId::new(mode, "extension_pair/u<=8"), |b| {
            b.iter(|| pool.install(|| black_box(check_extension_pair(2, 8))))
        });
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function(BenchmarkId::new("fallback", "extension_pair/u<=8"), |b| {
        b.iter(|| black_box(check_extension_pair(2, 8)))
    });
    group.finish();
}

criterion_group!(benches, bench_enumeration, bench_properties);
criterion_main!(benches);
