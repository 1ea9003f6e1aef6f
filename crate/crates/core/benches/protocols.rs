//! Local share arithmetic under both execution modes: the multivariate term sums
//! of a 4-ary product, a matrix product, and dealer generation.

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use mvbeaver::dealer::gen_aux_set;
use mvbeaver::protocols::{matmul, mul_multi_with, SharedMatrix};
use mvbeaver::{ExecMode, PartyId, Session, SessionConfig, Shared, Z128};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn session(exec: ExecMode) -> Session<Z128> {
    Session::new(SessionConfig {
        exec,
        ..Default::default()
    })
    .unwrap()
}

fn inputs(s: &mut Session<Z128>, arity: usize, len: usize) -> Vec<Shared<Z128>> {
    (0..arity)
        .map(|i| {
            let v: Vec<f64> = (0..len)
                .map(|e| ((e * 7 + i) % 13) as f64 / 8.0 - 0.75)
                .collect();
            s.input(PartyId(i % 3), &v).unwrap()
        })
        .collect()
}

fn bench_mul_multi(c: &mut Criterion) {
    let mut group = c.benchmark_group("mul_multi_4ary");
    for len in [1 << 12, 1 << 16] {
        group.throughput(Throughput::Elements(len as u64));
        for mode in MODES {
            group.bench_with_input(
                BenchmarkId::new(format!("{mode:?}"), len),
                &len,
                |b, &len| {
                    let mut rng = ChaCha20Rng::seed_from_u64(1);
                    b.iter_batched(
                        || {
                            let mut s = session(mode);
                            let xs = inputs(&mut s, 4, len);
                            let aux = gen_aux_set(4, len, 3, 4, &mut rng).unwrap();
                            (s, xs, aux)
                        },
                        |(mut s, xs, aux)| {
                            let refs: Vec<&Shared<Z128>> = xs.iter().collect();
                            mul_multi_with(&mut s, &refs, &aux).unwrap()
                        },
                        BatchSize::LargeInput,
                    );
                },
            );
        }
    }
    group.finish();
}

fn bench_matmul(c: &mut Criterion) {
    let mut group = c.benchmark_group("matmul");
    for dim in [32usize, 96] {
        for mode in MODES {
            group.bench_with_input(
                BenchmarkId::new(format!("{mode:?}"), dim),
                &dim,
                |b, &dim| {
                    b.iter_batched(
                        || {
                            let mut s = session(mode);
                            let xs = inputs(&mut s, 2, dim * dim);
                            let m: Vec<SharedMatrix<Z128>> = xs
                                .into_iter()
                                .map(|x| SharedMatrix::new(dim, dim, x).unwrap())
                                .collect();
                            (s, m)
                        },
                        |(mut s, m)| matmul(&mut s, &m[0], &m[1]).unwrap(),
                        BatchSize::LargeInput,
                    );
                },
            );
        }
    }
    group.finish();
}

fn bench_dealer(c: &mut Criterion) {
    let mut group = c.benchmark_group("dealer_prepare");
    let len = 1 << 14;
    for mode in MODES {
        group.bench_function(BenchmarkId::new(format!("{mode:?}"), len), |b| {
            b.iter(|| {
                let config = SessionConfig {
                    exec: mode,
                    ..Default::default()
                };
                mvbeaver::run_session::<Z128, _, _>(&config, |s| {
                    let xs = inputs(s, 4, len);
                    let refs: Vec<&Shared<Z128>> = xs.iter().collect();
                    mvbeaver::protocols::mul_multi(s, &refs)
                })
                .unwrap()
            });
        });
    }
    group.finish();
}

criterion_group!(benches, bench_mul_multi, bench_matmul, bench_dealer);
criterion_main!(benches);
