use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use gcs_core::algebra::AlgebraElement;
use gcs_core::fock::{resolution_of_identity, DisplacementGenerator};
use gcs_core::frame::weyl_disk_family;
use gcs_core::groupoid::pair_groupoid;
use gcs_core::{FockSpace, MorphismId};
use num_complex::Complex64;

fn displacement(c: &mut Criterion) {
    let s = FockSpace::new(80).unwrap();
    let gen = DisplacementGenerator::harmonic(s).unwrap();
    let z = Complex64::new(1.3, -0.7);
    c.bench_function("displacement_operator_n80", |b| {
        b.iter(|| gen.operator(black_box(z)))
    });
    let v = s.vacuum();
    c.bench_function("displacement_apply_n80", |b| {
        b.iter(|| gen.apply(black_box(z), v.amplitudes()))
    });
}

fn quadrature(c: &mut Criterion) {
    let s = FockSpace::new(40).unwrap();
    let mut group = c.benchmark_group("frames");
    group.sample_size(10);
    group.bench_function("resolution_n40_50x64", |b| {
        b.iter(|| resolution_of_identity(s, black_box(5.0), 50, 64).unwrap())
    });
    let fam = weyl_disk_family(s, 5.0, 50, 64).unwrap();
    group.bench_function("frame_operator_n40_50x64", |b| {
        b.iter(|| fam.frame_operator().unwrap())
    });
    group.finish();
}

fn algebra(c: &mut Criterion) {
    let g = Arc::new(pair_groupoid(12).unwrap());
    let coeffs = |shift: f64| {
        (0..g.morphism_count()).map(move |i| {
            (
                MorphismId(i),
                Complex64::new((i as f64 + shift).sin(), (i as f64).cos()),
            )
        })
    };
    let f = AlgebraElement::from_coeffs(Arc::clone(&g), coeffs(0.0)).unwrap();
    let h = AlgebraElement::from_coeffs(Arc::clone(&g), coeffs(1.0)).unwrap();
    c.bench_function("convolve_pair12_dense", |b| {
        b.iter(|| f.convolve(black_box(&h)).unwrap())
    });
    let big = pair_groupoid(8).unwrap();
    c.bench_function("verify_axioms_pair8", |b| {
        b.iter(|| black_box(&big).verify_axioms())
    });
}

criterion_group!(benches, displacement, quadrature, algebra);
criterion_main!(benches);
