//! The uplink offloading probability P_n against its independent oracles:
//! Monte Carlo over the raw SIC feasibility event, frozen reference values,
//! limit behaviour, and the high-SNR decay law.

mod common;

use noma_mec::downlink::decay_exponent_fit;
use noma_mec::mc_oracle::{estimate_event, uplink_latency_event};
use noma_mec::uplink_latency::{
    min_noma_power, p_n_exact, p_n_highsnr, p_n_highsnr_dominant, HighSnrTerms, SnrOperatingPoint,
};
use noma_mec::{ChannelGainPair, Error, MonteCarloSpec, OrderedPairConfig};
use proptest::prelude::*;

fn cfg(m: u32, n: u32) -> OrderedPairConfig {
    OrderedPairConfig::new(5, m, n).unwrap()
}

#[test]
fn matches_frozen_reference_values() {
    let snr = SnrOperatingPoint::new(10.0, 20.0).unwrap();
    let v = p_n_exact(&cfg(2, 4), &snr).unwrap();
    assert!((v - 0.5553625880247459).abs() < 1e-12, "got {v}");

    // Weak user holding more power: the max{0, .} branch with nu = 0.
    let snr = SnrOperatingPoint::new(100.0, 50.0).unwrap();
    let v = p_n_exact(&cfg(4, 5), &snr).unwrap();
    assert!((v - 1.658589115407505e-4).abs() < 1e-16, "got {v}");
}

#[test]
fn approaches_one_when_weak_snr_vanishes() {
    // eta fixed, rho_m -> 0: every pair's probability tends to one.
    for m in 1..5u32 {
        for n in (m + 1)..=5 {
            let snr = SnrOperatingPoint::from_eta(1e-3, 2.0).unwrap();
            let v = p_n_exact(&cfg(m, n), &snr).unwrap();
            assert!(v >= 0.99, "(m,n)=({m},{n}): {v}");
        }
    }
}

#[test]
fn approaches_one_when_strong_snr_grows() {
    // rho_m fixed, rho_n -> infinity; exercises the large-z erfcx path.
    for m in 1..5u32 {
        for n in (m + 1)..=5 {
            let snr = SnrOperatingPoint::new(1.0, 1e6).unwrap();
            let v = p_n_exact(&cfg(m, n), &snr).unwrap();
            assert!(v >= 0.99, "(m,n)=({m},{n}): {v}");
        }
    }
}

#[test]
fn nondecreasing_in_strong_snr() {
    let pair = cfg(2, 4);
    let mut prev = -1.0;
    for i in 0..=40 {
        let rho_n = 10f64.powf(i as f64 * 0.1);
        let snr = SnrOperatingPoint::new(10.0, rho_n).unwrap();
        let v = p_n_exact(&pair, &snr).unwrap();
        assert!(v >= prev - 1e-12, "drop at rho_n={rho_n}: {v} < {prev}");
        prev = v;
    }
}

#[test]
fn oracle_agreement_at_reference_point() {
    let pair = cfg(2, 4);
    let snr = SnrOperatingPoint::new(10.0, 20.0).unwrap();
    let exact = p_n_exact(&pair, &snr).unwrap();
    let spec = MonteCarloSpec::new(10_000_000, 2024, 1 << 16).unwrap();
    let est = estimate_event(&pair, &spec, uplink_latency_event(&snr)).unwrap();
    assert!(
        est.within(exact, 3.0, 0.0),
        "exact {exact} vs MC {} +- {}",
        est.value,
        est.stderr
    );
}

#[test]
fn oracle_agreement_when_weak_user_has_more_power() {
    let pair = cfg(4, 5);
    let snr = SnrOperatingPoint::new(100.0, 50.0).unwrap();
    let exact = p_n_exact(&pair, &snr).unwrap();
    let spec = MonteCarloSpec::new(2_000_000, 99, 1 << 16).unwrap();
    let est = estimate_event(&pair, &spec, uplink_latency_event(&snr)).unwrap();
    assert!(
        est.within(exact, 3.0, 5e-3),
        "exact {exact} vs MC {} +- {}",
        est.value,
        est.stderr
    );
}

#[test]
fn high_snr_expansion_tracks_exact_values() {
    let rho_m = 1e4; // 40 dB
    for (m, n) in [(1u32, 2u32), (2, 4), (3, 5)] {
        let pair = cfg(m, n);
        let snr = SnrOperatingPoint::from_eta(rho_m, 2.0).unwrap();
        let exact = p_n_exact(&pair, &snr).unwrap();
        let approx = p_n_highsnr(&pair, rho_m, 2.0).unwrap();
        let ratio = approx / exact;
        assert!(
            (0.5..2.0).contains(&ratio),
            "(m,n)=({m},{n}): ratio {ratio}"
        );
        assert!((ratio - 1.0).abs() < 0.05, "(m,n)=({m},{n}): ratio {ratio}");
    }
    let small = p_n_highsnr(&cfg(1, 2), rho_m, 2.0).unwrap();
    assert!(small > 0.0 && small < 0.1, "got {small}");
}

#[test]
fn dominant_term_is_a_pure_power_law() {
    for (m, n) in [(1u32, 2u32), (2, 4)] {
        let pair = cfg(m, n);
        let curve: Vec<(f64, f64)> = (0..=10)
            .map(|i| {
                let rho_m = 10f64.powf(3.0 + 0.3 * i as f64);
                (rho_m, p_n_highsnr_dominant(&pair, rho_m, 2.0).unwrap())
            })
            .collect();
        let d = decay_exponent_fit(&curve, (30.0, 60.0)).unwrap();
        assert!((d - m as f64 / 2.0).abs() < 1e-9, "m={m}: d={d}");

        // At deep SNR the full expansion collapses onto its dominant term.
        let full = p_n_highsnr(&pair, 1e5, 2.0).unwrap();
        let dom = p_n_highsnr_dominant(&pair, 1e5, 2.0).unwrap();
        assert!((full / dom - 1.0).abs() < 0.05, "m={m}: {full} vs {dom}");
    }
}

#[test]
fn exact_curve_decays_at_half_m_rate() {
    for (m, n) in [(1u32, 2u32), (2, 4), (3, 5)] {
        let pair = cfg(m, n);
        let curve: Vec<(f64, f64)> = (0..=10)
            .map(|i| {
                let rho_n = 10f64.powf(3.5 + 0.2 * i as f64);
                let snr = SnrOperatingPoint::new(rho_n / 2.0, rho_n).unwrap();
                (rho_n, p_n_exact(&pair, &snr).unwrap())
            })
            .collect();
        let d = decay_exponent_fit(&curve, (35.0, 55.0)).unwrap();
        assert!((d - m as f64 / 2.0).abs() < 0.1, "m={m}: fitted decay {d}");
    }
}

#[test]
fn high_snr_terms_stay_in_expected_ranges() {
    let pair = cfg(2, 4);
    let snr = SnrOperatingPoint::from_eta(100.0, 2.0).unwrap();
    for p in 0..=1u32 {
        for l in 0..2u32 {
            let t = HighSnrTerms::evaluate(&pair, &snr, p, l);
            assert!(t.a > 0.0);
            assert!(t.b > 0.0);
            assert!(t.lambda > 0.0);
            assert!(t.mu_m.is_finite());
            assert!(t.q1_tilde.is_finite() && t.q2_tilde.is_finite());
        }
    }
}

#[test]
fn min_noma_power_reference_points() {
    // No weak-user activity: nothing to overcome.
    let idle = min_noma_power(1.0, &ChannelGainPair::new(0.0, 1.0).unwrap()).unwrap();
    assert_eq!(
        (idle.noma_power, idle.oma_power, idle.excess),
        (0.0, 0.0, 0.0)
    );

    let unit = min_noma_power(1.0, &ChannelGainPair::new(1.0, 1.0).unwrap()).unwrap();
    assert_eq!(
        (unit.noma_power, unit.oma_power, unit.excess),
        (2.0, 1.0, 1.0)
    );

    let skewed = min_noma_power(4.0, &ChannelGainPair::new(0.5, 2.0).unwrap()).unwrap();
    assert_eq!(
        (skewed.noma_power, skewed.oma_power, skewed.excess),
        (3.0, 1.0, 2.0)
    );

    assert!(matches!(
        min_noma_power(1.0, &ChannelGainPair::new(0.0, 0.0).unwrap()),
        Err(Error::ZeroStrongGain)
    ));
}

#[test]
fn population_cap_applies_at_construction() {
    assert!(matches!(
        OrderedPairConfig::new(25, 2, 4),
        Err(Error::PopulationTooLarge {
            population: 25,
            cap: 20
        })
    ));
}

fn config_strategy() -> impl Strategy<Value = OrderedPairConfig> {
    (2..=10u32)
        .prop_flat_map(|population| {
            (Just(population), 1..population).prop_flat_map(|(population, weak)| {
                (Just(population), Just(weak), (weak + 1)..=population)
            })
        })
        .prop_map(|(population, weak, strong)| {
            OrderedPairConfig::new(population, weak, strong).unwrap()
        })
}

proptest! {
    #[test]
    fn exact_form_stays_in_unit_interval(
        pair in config_strategy(),
        log_rho_m in -3.0f64..4.0,
        log_rho_n in -3.0f64..4.0,
    ) {
        let snr = SnrOperatingPoint::new(
            10f64.powf(log_rho_m),
            10f64.powf(log_rho_n),
        ).unwrap();
        let v = p_n_exact(&pair, &snr).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn excess_power_identity_is_exact(
        rho_m in 0.01f64..100.0,
        weak in 0.0f64..5.0,
        extra in 0.001f64..5.0,
    ) {
        let gains = ChannelGainPair::new(weak, weak + extra).unwrap();
        let split = min_noma_power(rho_m, &gains).unwrap();
        prop_assert_eq!(split.excess, (rho_m * weak) * (rho_m * weak) / (weak + extra));
        prop_assert_eq!(split.noma_power, split.oma_power + split.excess);
    }
}
