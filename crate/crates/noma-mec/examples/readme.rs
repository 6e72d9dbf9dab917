//! The quick-start example from the README: exact uplink latency
//! probability against a Monte Carlo estimate.

use noma_mec::mc_oracle::{estimate_event, uplink_latency_event};
use noma_mec::uplink_latency::p_n_exact;
use noma_mec::{MonteCarloSpec, OrderedPairConfig, SnrOperatingPoint};

fn main() -> Result<(), noma_mec::Error> {
    // m-th and n-th weakest of 5 devices.
    let pair = OrderedPairConfig::new(5, 1, 2)?;
    // Weak device at 20 dB, strong at twice that SNR.
    let snr = SnrOperatingPoint::from_eta(100.0, 2.0)?;

    let exact = p_n_exact(&pair, &snr)?;

    let mc = MonteCarloSpec::with_default_chunk(10_000_000, 42)?;
    let est = estimate_event(&pair, &mc, uplink_latency_event(&snr))?;

    assert!(est.within(exact, 4.0, 1e-4));
    println!("P = {exact}, MC = {} +/- {}", est.value, est.stderr);
    Ok(())
}
