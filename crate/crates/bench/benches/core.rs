use std::hint::black_box;

use bcf_core::*;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn digit_extraction(c: &mut Criterion) {
    let x: ExactRational = "123456789/987654321".parse().unwrap();
    c.bench_function("digits/exact 1000", |b| b.iter(|| digits(black_box(&x), 1000).unwrap()));
    let mut out = Vec::with_capacity(100);
    c.bench_function("digits/dyadic u128 100", |b| {
        b.iter(|| {
            out.clear();
            bcf_core::renyi::small_fraction_digits(black_box(0x9e37_79b9_7f4a_7c15), 1 << 64, 100, &mut out);
        })
    });
}

fn cylinders(c: &mut Criterion) {
    let word = DigitWord::new((0..200).map(|i| 2 + (i % 7) as Digit).collect()).unwrap();
    c.bench_function("cylinder/depth 200", |b| b.iter(|| cylinder(black_box(&word))));
}

fn pressure(c: &mut Criterion) {
    let psi = ArithmeticFunction::reciprocal();
    let mut g = c.benchmark_group("pressure");
    g.sample_size(10);
    for (name, method) in [("enumerate", PressureMethod::Enumerate), ("transfer", PressureMethod::Transfer)] {
        let cfg = PressureConfig { method, ..PressureConfig::default() };
        g.bench_with_input(BenchmarkId::new(name, "B=10 depth=6"), &cfg, |b, cfg| {
            b.iter(|| pressure_bracket_with(Some(&psi), -1.0, 1.0, 10, 6, cfg).unwrap())
        });
    }
    g.finish();
}

fn deviation(c: &mut Criterion) {
    let psi = ArithmeticFunction::identity();
    let j: TargetInterval = "[5/2,3]".parse().unwrap();
    let mut g = c.benchmark_group("deviation");
    g.sample_size(10);
    for n in [4usize, 6] {
        let q = DeviationQuery::exact(psi.clone(), n, j.clone(), 20);
        g.bench_with_input(BenchmarkId::new("exact B=20", n), &q, |b, q| b.iter(|| exact_measure(q).unwrap()));
    }
    let q = DeviationQuery::monte_carlo(psi, 8, j, 100_000, 1);
    g.bench_function("monte carlo 1e5 n=8", |b| b.iter(|| mc_measure(&q).unwrap()));
    g.finish();
}

criterion_group!(benches, digit_extraction, cylinders, pressure, deviation);
criterion_main!(benches);
