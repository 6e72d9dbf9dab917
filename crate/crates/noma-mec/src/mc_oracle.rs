//! Monte Carlo estimators built straight from the event definitions.
//!
//! Every closed form in this crate has a brute-force counterpart here that
//! never touches the derived algebra: sample the ordered gain pair, test
//! the defining inequality, count. Agreement between the two routes is the
//! strongest correctness evidence the crate produces, so the events are
//! written from the raw comparisons (rate bookkeeping for the downlink,
//! threshold inequalities for the uplink), not from any simplified region.
//!
//! Estimates are bit-reproducible. Trials are split into fixed-size chunks,
//! chunk i draws from its own ChaCha8 stream keyed by a SplitMix-style hash
//! of (seed, i), and the per-chunk hit counts are integers, so the reduction
//! is exact and independent of how many worker threads rayon happens to use.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chanstat::{sample_ordered_pair, ChannelGainPair, OrderedPairConfig};
use crate::downlink::{cr_alpha_n_sq, rates_for, DownlinkScaling, DownlinkTaskSpec};
use crate::error::{Error, Result};
use crate::uplink_energy::EnergyScaling;
use crate::uplink_latency::SnrOperatingPoint;

/// Trial budget, master seed, and sub-stream granularity.
///
/// Invariants: `1 <= chunk <= trials`. The chunk size fixes the partition
/// of trials into deterministic sub-streams; changing it changes the
/// estimate (legitimately, like changing the seed), so it is part of the
/// reproducibility key.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MonteCarloSpec {
    trials: u64,
    seed: u64,
    chunk: u64,
}

impl MonteCarloSpec {
    pub const DEFAULT_CHUNK: u64 = 1 << 16;

    pub fn new(trials: u64, seed: u64, chunk: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::Invalid(
                "Monte Carlo needs at least one trial".into(),
            ));
        }
        if chunk == 0 || chunk > trials {
            return Err(Error::Invalid(format!(
                "chunk must satisfy 1 <= chunk <= trials, got chunk={chunk}, trials={trials}"
            )));
        }
        Ok(Self {
            trials,
            seed,
            chunk,
        })
    }

    /// Standard chunking: 65536 trials per sub-stream, capped by the budget.
    pub fn with_default_chunk(trials: u64, seed: u64) -> Result<Self> {
        Self::new(trials, seed, Self::DEFAULT_CHUNK.min(trials.max(1)))
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn chunk(&self) -> u64 {
        self.chunk
    }
}

/// An empirical frequency with its binomial standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl ProbabilityEstimate {
    /// Sampling-noise agreement test: |value - reference| within `sigmas`
    /// standard errors, but never tighter than the absolute `floor` (which
    /// keeps zero-hit estimates from demanding exact equality).
    pub fn within(&self, reference: f64, sigmas: f64, floor: f64) -> bool {
        (self.value - reference).abs() <= (sigmas * self.stderr).max(floor)
    }
}

/// SplitMix64 finalizer: a bijective avalanche mix on u64.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for chunk `index` of a run keyed by `seed`. The inner mix is a
/// bijection of the index, so two chunks of one run can never share a
/// stream key.
fn chunk_seed(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(mix64(index.wrapping_add(0x9E37_79B9_7F4A_7C15))))
}

/// Empirical probability of `event` under the ordered-gain distribution.
pub fn estimate_event<F>(
    cfg: &OrderedPairConfig,
    spec: &MonteCarloSpec,
    event: F,
) -> Result<ProbabilityEstimate>
where
    F: Fn(&ChannelGainPair) -> bool + Sync,
{
    let trials = spec.trials();
    let chunk = spec.chunk();
    let n_chunks = trials.div_ceil(chunk);

    let hits: u64 = (0..n_chunks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(chunk_seed(spec.seed(), i));
            let count = chunk.min(trials - i * chunk);
            let mut h = 0u64;
            for _ in 0..count {
                let pair = sample_ordered_pair(cfg, &mut rng);
                if event(&pair) {
                    h += 1;
                }
            }
            h
        })
        .sum();

    let value = hits as f64 / trials as f64;
    Ok(ProbabilityEstimate {
        value,
        stderr: (value * (1.0 - value) / trials as f64).sqrt(),
        trials,
    })
}

/// Strong user finishes inside the weak user's slot: the SIC feasibility
/// threshold is quadratic in the weak gain.
pub fn uplink_latency_event(snr: &SnrOperatingPoint) -> impl Fn(&ChannelGainPair) -> bool + Sync {
    let (rho_m, rho_n) = (snr.rho_m(), snr.rho_n());
    move |g: &ChannelGainPair| {
        g.strong_gain
            > rho_m / rho_n * g.weak_gain + rho_m * rho_m / rho_n * g.weak_gain * g.weak_gain
    }
}

/// OMA delivers at least as much data as reduced-power NOMA on the uplink.
pub fn uplink_energy_event(
    snr: &SnrOperatingPoint,
    scale: &EnergyScaling,
) -> impl Fn(&ChannelGainPair) -> bool + Sync {
    let (rho_m, rho_n) = (snr.rho_m(), snr.rho_n());
    let beta = scale.beta();
    move |g: &ChannelGainPair| {
        g.strong_gain <= ((1.0 - beta) * (1.0 + rho_m * g.weak_gain) - beta) / (beta * beta * rho_n)
    }
}

/// OMA delivers at least as much data as the two-slot downlink NOMA
/// protocol: full bit accounting with per-trial cognitive-radio allocation,
/// no shortcut through the simplified integration region.
pub fn downlink_energy_event(
    rho: f64,
    beta_tilde: f64,
    task: &DownlinkTaskSpec,
) -> Result<impl Fn(&ChannelGainPair) -> bool + Sync> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Invalid(format!(
            "rho must be finite and positive, got {rho}"
        )));
    }
    if !(beta_tilde.is_finite() && beta_tilde > 0.0 && beta_tilde < 1.0) {
        return Err(Error::Invalid(format!(
            "beta_tilde must lie strictly inside (0, 1), got {beta_tilde}"
        )));
    }
    let slot = task.slot();
    let eps = task.epsilon();
    Ok(move |g: &ChannelGainPair| {
        let scaling = DownlinkScaling::from_parts(beta_tilde, cr_alpha_n_sq(rho, g.weak_gain, eps));
        let rates = rates_for(rho, g, &scaling, slot);
        let oma_n = slot * (1.0 + rho * g.strong_gain).log2();
        rates.bits_n_slot1 + rates.bits_n_slot2 <= oma_n
    })
}

/// The two fixed-split downlink latency events: each server's
/// superposition-slot rate covers its own task.
#[allow(clippy::type_complexity)]
pub fn downlink_latency_events(
    rho: f64,
    scaling: DownlinkScaling,
    bits_m: f64,
    bits_n: f64,
    slot: f64,
) -> Result<(
    impl Fn(&ChannelGainPair) -> bool + Sync,
    impl Fn(&ChannelGainPair) -> bool + Sync,
)> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Invalid(format!(
            "rho must be finite and positive, got {rho}"
        )));
    }
    if !(slot.is_finite() && slot > 0.0) {
        return Err(Error::Invalid(format!(
            "slot must be finite and positive, got {slot}"
        )));
    }
    if !(bits_m.is_finite() && bits_m >= 0.0 && bits_n.is_finite() && bits_n >= 0.0) {
        return Err(Error::Invalid(format!(
            "task sizes must be finite and nonnegative, got ({bits_m}, {bits_n})"
        )));
    }
    let event_m = move |g: &ChannelGainPair| rates_for(rho, g, &scaling, slot).bits_m >= bits_m;
    let event_n =
        move |g: &ChannelGainPair| rates_for(rho, g, &scaling, slot).bits_n_slot1 >= bits_n;
    Ok((event_m, event_n))
}
