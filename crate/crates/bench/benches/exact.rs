//! Benchmarks for the hot exact-arithmetic paths: deriving energy
//! coefficients, repairing the factorization, and the closed-form
//! residual checks, plus one floating-point stepping benchmark.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nalgebra::DVector;
use rand::SeedableRng;
use rkenergy::energy::{beta_gamma, decompose};
use rkenergy::methods::make_pade;
use rkenergy::pade::verify_pade_cholesky;
use rkenergy::simulator::{energy_trace, random_seminegative};

fn bench_beta_gamma(c: &mut Criterion) {
    let mut g = c.benchmark_group("beta_gamma_diagonal_pade");
    for s in [4usize, 8, 12] {
        let sf = make_pade(s, s);
        g.bench_with_input(BenchmarkId::from_parameter(s), &sf, |b, sf| {
            b.iter(|| beta_gamma(sf))
        });
    }
    g.finish();
}

fn bench_decompose(c: &mut Criterion) {
    let mut g = c.benchmark_group("decompose_diagonal_pade");
    for s in [4usize, 8, 12] {
        let ec = beta_gamma(&make_pade(s, s));
        g.bench_with_input(BenchmarkId::from_parameter(s), &ec, |b, ec| {
            b.iter(|| decompose(ec))
        });
    }
    g.finish();
}

fn bench_cholesky_residual(c: &mut Criterion) {
    let mut g = c.benchmark_group("pade_cholesky_residual");
    for s in [5usize, 10, 15] {
        g.bench_with_input(BenchmarkId::from_parameter(s), &s, |b, &s| {
            b.iter(|| verify_pade_cholesky(s))
        });
    }
    g.finish();
}

fn bench_energy_trace(c: &mut Criterion) {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    let sys = random_seminegative(40, &mut rng);
    let sf = make_pade(3, 3);
    let u0 = DVector::from_fn(sys.dim, |i, _| (i as f64 * 0.37).cos());
    let tau = 0.5 / sys.op_norm;
    c.bench_function("energy_trace_pade33_dim40_100steps", |b| {
        b.iter(|| energy_trace(&sf, &sys, tau, 100, &u0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_beta_gamma,
    bench_decompose,
    bench_cholesky_residual,
    bench_energy_trace
);
criterion_main!(benches);
