//! Benchmarks for the evaluation kernels the identity checkers lean on:
//! infinite products, series summation, polynomial evaluation, the weight,
//! and two end-to-end residuals.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

use qsf::identity::{addition_residual, AdditionCase};
use qsf::ortho::{weight_eval, WeightSpec};
use qsf::poly::{asc_eval_def, asc_sequence};
use qsf::series::{phi, qpoch_infinite, HypergeometricSpec};
use qsf::{AscParams, QContext, SpectralPoint};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn bench_qpoch_infinite(crit: &mut Criterion) {
    let ctx = QContext::new(0.8).unwrap();
    crit.bench_function("qpoch_infinite q=0.8", |b| {
        b.iter(|| qpoch_infinite(black_box(Complex64::new(0.6, 0.3)), &ctx).unwrap())
    });
}

fn bench_phi(crit: &mut Criterion) {
    let ctx = QContext::new(0.8).unwrap();
    let spec = HypergeometricSpec::new(
        vec![Complex64::new(0.3, 0.4), Complex64::new(0.3, -0.4)],
        vec![c(0.35)],
        c(0.5),
    );
    crit.bench_function("2phi1 q=0.8 |z|=0.5", |b| {
        b.iter(|| phi(black_box(&spec), &ctx).unwrap())
    });
}

fn bench_asc(crit: &mut Criterion) {
    let ctx = QContext::new(0.5).unwrap();
    let par = AscParams::new(c(0.3), c(0.2), 0.5).unwrap();
    let p = SpectralPoint::from_theta(1.1);
    crit.bench_function("asc recurrence n=0..40", |b| {
        b.iter(|| asc_sequence(black_box(40), &p, &par))
    });
    crit.bench_function("asc definition n=12", |b| {
        b.iter(|| asc_eval_def(black_box(12), &p, &par, &ctx).unwrap())
    });
}

fn bench_weight(crit: &mut Criterion) {
    let ctx = QContext::new(0.8).unwrap();
    let par = AscParams::new(c(0.6), c(-0.4), 0.8).unwrap();
    let w = WeightSpec::new(par, 0).unwrap();
    crit.bench_function("weight q=0.8", |b| {
        b.iter(|| weight_eval(black_box(1.1), &w, &ctx).unwrap())
    });
}

fn bench_addition(crit: &mut Criterion) {
    let ctx = QContext::new(0.5).unwrap();
    let case = AdditionCase::new(
        c(0.3),
        c(0.2),
        c(0.4),
        1.5,
        2,
        SpectralPoint::from_theta(std::f64::consts::FRAC_PI_3),
    );
    crit.bench_function("addition residual N=40", |b| {
        b.iter(|| addition_residual(black_box(&case), 40, &ctx).unwrap())
    });
}

criterion_group!(
    benches,
    bench_qpoch_infinite,
    bench_phi,
    bench_asc,
    bench_weight,
    bench_addition
);
criterion_main!(benches);
