//! Simulation throughput: the oracle side of every validation run. The
//! estimate benchmark covers the full pipeline (per-chunk seeding, sorting,
//! event evaluation, reduction); the sampler benchmark isolates one draw.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use noma_mec::chanstat::sample_ordered_pair;
use noma_mec::mc_oracle::{estimate_event, uplink_latency_event};
use noma_mec::uplink_latency::SnrOperatingPoint;
use noma_mec::{MonteCarloSpec, OrderedPairConfig};

fn monte_carlo(c: &mut Criterion) {
    let pair = OrderedPairConfig::new(5, 2, 4).unwrap();
    let snr = SnrOperatingPoint::new(10.0, 100.0).unwrap();
    let spec = MonteCarloSpec::new(100_000, 7, 1 << 14).unwrap();

    c.bench_function("estimate_event 1e5 trials M=5", |b| {
        b.iter(|| {
            estimate_event(
                black_box(&pair),
                black_box(&spec),
                uplink_latency_event(&snr),
            )
            .unwrap()
        })
    });

    c.bench_function("sample_ordered_pair M=5", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        b.iter(|| sample_ordered_pair(black_box(&pair), &mut rng))
    });
}

criterion_group!(benches, monte_carlo);
criterion_main!(benches);
