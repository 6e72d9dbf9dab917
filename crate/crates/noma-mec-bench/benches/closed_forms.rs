//! Closed-form evaluation costs: these sit inside sweep inner loops, so a
//! regression here multiplies across every grid point.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use noma_mec::chanstat::binomial_identity_lhs;
use noma_mec::downlink::p_d_tilde_quadrature;
use noma_mec::uplink_energy::p_tilde_exact;
use noma_mec::uplink_latency::{p_n_exact, SnrOperatingPoint};
use noma_mec::{DownlinkTaskSpec, EnergyScaling, OrderedPairConfig, QuadratureSpec};

fn closed_forms(c: &mut Criterion) {
    let pair = OrderedPairConfig::new(5, 2, 4).unwrap();
    let snr = SnrOperatingPoint::new(10.0, 100.0).unwrap();

    c.bench_function("p_n_exact M=5 (2,4)", |b| {
        b.iter(|| p_n_exact(black_box(&pair), black_box(&snr)).unwrap())
    });

    let scale = EnergyScaling::new(0.25).unwrap();
    c.bench_function("p_tilde_exact M=5 (2,4)", |b| {
        b.iter(|| p_tilde_exact(black_box(&pair), black_box(&snr), black_box(&scale)).unwrap())
    });

    let task = DownlinkTaskSpec::new(1.0, 1.0).unwrap();
    let quad = QuadratureSpec::default();
    c.bench_function("p_d_tilde_quadrature M=5 (2,4) 64 nodes", |b| {
        b.iter(|| {
            p_d_tilde_quadrature(
                black_box(&pair),
                black_box(100.0),
                black_box(0.5),
                black_box(&task),
                black_box(&quad),
            )
            .unwrap()
        })
    });

    c.bench_function("binomial_identity_lhs M=12 m=7", |b| {
        b.iter(|| binomial_identity_lhs(black_box(12), black_box(7)).unwrap())
    });
}

criterion_group!(benches, closed_forms);
criterion_main!(benches);
