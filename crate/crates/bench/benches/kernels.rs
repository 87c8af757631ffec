use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hypmass::mass::{mass_flux_integral, FluxBackground};
use hypmass::ode::{integrate_geodesic, GeodesicOptions};
use hypmass::{curvature_at, SphereQuadrature, StaticPotential};
use hypmass_bench::sads3;

fn curvature(c: &mut Criterion) {
    let g = sads3();
    c.bench_function("curvature_at", |b| b.iter(|| curvature_at(&g, black_box(&[3.0, -1.0, 2.0])).unwrap()));
}

fn flux(c: &mut Criterion) {
    let g = sads3();
    let v = StaticPotential::lapse(3);
    let quad = SphereQuadrature::new(24, 48).unwrap();
    c.bench_function("mass_flux_integral_24x48", |b| {
        b.iter(|| mass_flux_integral(&g, &v, black_box(50.0), &quad, FluxBackground::Hyperbolic).unwrap())
    });
}

fn geodesic(c: &mut Criterion) {
    let g = sads3();
    let opts = GeodesicOptions::default();
    c.bench_function("geodesic_length_5", |b| {
        b.iter(|| integrate_geodesic(&g, black_box(&[2.0, 0.0, 0.0]), &[0.6, 0.8, 0.0], 5.0, &opts).unwrap())
    });
}

criterion_group!(benches, curvature, flux, geodesic);
criterion_main!(benches);
