use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use lmls_core::direction::{compute_direction, safeguarded_direction};
use lmls_core::line_search::{backtrack, LineSearchConfig};
use lmls_core::oracles::{LogisticOracle, SparseDataset, StochasticOracle};
use lmls_core::{CholFactor, PairRingBuffer};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

fn full_buffer(d: usize, m: usize, rng: &mut ChaCha8Rng) -> (PairRingBuffer, CholFactor) {
    let mut buf = PairRingBuffer::new(d, m).unwrap();
    let mut f = CholFactor::empty(1.0);
    for _ in 0..m {
        buf.push_pair(&mut f, &gaussian(d, rng), &gaussian(d, rng)).unwrap();
    }
    (buf, f)
}

fn direction(c: &mut Criterion) {
    let mut group = c.benchmark_group("direction");
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for &d in &[100, 1_000, 10_000] {
        for &m in &[5, 20] {
            let (buf, f) = full_buffer(d, m, &mut rng);
            let g = gaussian(d, &mut rng);
            group.throughput(Throughput::Elements((d * m) as u64));
            group.bench_with_input(BenchmarkId::new(format!("plain/m{m}"), d), &d, |b, _| {
                b.iter(|| compute_direction(&buf, &f, 0.5, black_box(&g)).unwrap())
            });
            group.bench_with_input(BenchmarkId::new(format!("safeguarded/m{m}"), d), &d, |b, _| {
                b.iter(|| safeguarded_direction(&buf, &f, 0.5, black_box(&g), 0.01, 1e-6).unwrap())
            });
        }
    }
    group.finish();
}

fn factor(c: &mut Criterion) {
    let mut group = c.benchmark_group("factor");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let d = 1_000;
    for &m in &[5, 20, 50] {
        let (buf, f) = full_buffer(d, m, &mut rng);
        let pairs: Vec<_> = (0..64).map(|_| (gaussian(d, &mut rng), gaussian(d, &mut rng))).collect();
        group.bench_with_input(BenchmarkId::new("push_replace", m), &m, |b, _| {
            let (mut buf, mut f) = (buf.clone(), f.clone());
            let mut i = 0;
            b.iter(|| {
                let (s, y) = &pairs[i % pairs.len()];
                i += 1;
                buf.push_pair(&mut f, s, y).unwrap()
            })
        });
        group.bench_with_input(BenchmarkId::new("refactor_qr", m), &m, |b, _| {
            b.iter(|| buf.rebuild_factor(1.0).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("refactor_normal_eq", m), &m, |b, _| {
            b.iter(|| CholFactor::factor_normal_eq(buf.y(), 1.0).unwrap())
        });
        black_box(&f);
    }
    group.finish();
}

fn logistic(c: &mut Criterion) {
    let mut group = c.benchmark_group("logistic");
    let ds = SparseDataset::synthetic(5_000, 200, 0.1, 0.5, 3);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x = gaussian(200, &mut rng);
    for &batch in &[32, 256, 5_000] {
        let o = LogisticOracle::new(ds.clone(), 1e-4, batch).unwrap();
        group.throughput(Throughput::Elements(batch as u64));
        group.bench_with_input(BenchmarkId::new("eval_fg", batch), &batch, |b, _| {
            let mut seed = 0u64;
            b.iter(|| {
                seed += 1;
                o.eval_fg(black_box(&x), seed).unwrap()
            })
        });
    }
    group.finish();
}

fn line_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("line_search");
    let ds = SparseDataset::synthetic(5_000, 200, 0.1, 0.5, 3);
    let o = LogisticOracle::new(ds, 1e-4, 256).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x = gaussian(200, &mut rng);
    let (f0, g) = o.eval_fg(&x, 7).unwrap();
    let cfg = LineSearchConfig::default();
    for &scale in &[1.0, 100.0] {
        let p: Vec<f64> = g.iter().map(|v| -scale * v).collect();
        group.bench_with_input(BenchmarkId::new("backtrack", scale), &scale, |b, _| {
            b.iter(|| backtrack(&o, black_box(&x), &p, &g, f0, 1, &cfg, 7).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, direction, factor, logistic, line_search);
criterion_main!(benches);
