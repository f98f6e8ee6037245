use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tbisim::bisim::{brb_check, gbrb_check, strong_bisim, tb_check, tob_check};
use tbisim::encode::encode;
use tbisim_bench::stutter_pair;

fn checkers(c: &mut Criterion) {
    let mut g = c.benchmark_group("stutter");
    g.sample_size(10);
    for n in 1..=3 {
        let (l1, l2) = stutter_pair(n);
        g.bench_with_input(BenchmarkId::new("strong", n), &n, |b, _| {
            b.iter(|| strong_bisim(black_box(&l1), 0, &l2, 0).unwrap().equivalent)
        });
        g.bench_with_input(BenchmarkId::new("brb", n), &n, |b, _| {
            b.iter(|| brb_check(black_box(&l1), 0, &l2, 0, false).unwrap().equivalent)
        });
        g.bench_with_input(BenchmarkId::new("gbrb", n), &n, |b, _| {
            b.iter(|| gbrb_check(black_box(&l1), 0, &l2, 0, false).unwrap().equivalent)
        });
        g.bench_with_input(BenchmarkId::new("tob", n), &n, |b, _| {
            b.iter(|| tob_check(black_box(&l1), 0, &l2, 0, false).unwrap().equivalent)
        });
        if n <= 2 {
            let (e1, e2) = (encode(&l1, false).unwrap(), encode(&l2, false).unwrap());
            g.bench_with_input(BenchmarkId::new("tb", n), &n, |b, _| {
                b.iter(|| tb_check(black_box(&e1), 0, &e2, 0, false).unwrap().equivalent)
            });
        }
    }
    g.finish();
}

criterion_group!(benches, checkers);
criterion_main!(benches);
