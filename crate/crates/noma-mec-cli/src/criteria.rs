//! The validation battery behind `noma-mec validate`: every check the
//! release gate runs, each returning a one-line verdict. The Monte Carlo
//! sides always go through the event simulators, never through the algebra
//! under test, so an agreement line is evidence rather than tautology.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noma_mec::chanstat::binomial_identity_lhs;
use noma_mec::downlink::{decay_exponent_fit, p_d_tilde_quadrature};
use noma_mec::mc_oracle::{
    downlink_energy_event, estimate_event, uplink_energy_event, uplink_latency_event,
};
use noma_mec::uplink_energy::{p_tilde_exact, p_tilde_regime, AsymptoticRegime, SnrGrowth};
use noma_mec::uplink_latency::{p_n_exact, SnrOperatingPoint};
use noma_mec::{
    DownlinkTaskSpec, EnergyScaling, MonteCarloSpec, OrderedPairConfig, QuadratureSpec,
};

use crate::{
    db_to_linear, run_sweep, FixedParams, McParams, Mode, Result, SweepAxis, SweepConfig,
    SweepParam,
};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:02} {}: {} ({})",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

fn pair(m: u32, n: u32) -> OrderedPairConfig {
    OrderedPairConfig::new(5, m, n).expect("grid pair is valid")
}

fn finish(id: u32, name: &'static str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name,
        passed,
        detail,
    }
}

/// Combinatorial identity across the full population range.
pub fn criterion_01() -> Result<CriterionResult> {
    let mut worst = 0.0f64;
    let mut passed = true;
    for population in 2..=12u32 {
        for weak in 1..population {
            let dev = (binomial_identity_lhs(population, weak)? - 1.0).abs();
            worst = worst.max(dev);
            passed &= dev <= 1e-10;
        }
    }
    Ok(finish(
        1,
        "binomial-identity",
        passed,
        format!("worst |lhs-1| = {worst:.3e} over 1 <= m < M <= 12, tolerance 1e-10"),
    ))
}

struct Agreement {
    points: usize,
    failures: usize,
    worst_gap: f64,
    worst_at: String,
}

impl Agreement {
    fn new() -> Self {
        Agreement {
            points: 0,
            failures: 0,
            worst_gap: 0.0,
            worst_at: String::new(),
        }
    }

    fn record(&mut self, analytic: f64, est: &noma_mec::ProbabilityEstimate, label: String) {
        self.points += 1;
        let gap = (analytic - est.value).abs();
        let allowance = (3.0 * est.stderr).max(5e-3);
        if gap > allowance {
            self.failures += 1;
        }
        if gap > self.worst_gap {
            self.worst_gap = gap;
            self.worst_at = label;
        }
    }

    fn detail(&self, trials: &str) -> String {
        format!(
            "{}/{} points within max(3 sigma, 5e-3) at {trials} trials; worst gap {:.2e} at {}",
            self.points - self.failures,
            self.points,
            self.worst_gap,
            self.worst_at
        )
    }
}

/// Exact uplink-latency curve against the raw-event simulation.
pub fn criterion_02() -> Result<CriterionResult> {
    let mut agg = Agreement::new();
    let mut seed = 2000u64;
    for (m, n) in [(1u32, 2u32), (2, 4), (4, 5)] {
        for rho_m_db in [0.0, 10.0, 20.0] {
            for eta in [0.5, 2.0, 5.0] {
                let snr = SnrOperatingPoint::from_eta(db_to_linear(rho_m_db), eta)?;
                let exact = p_n_exact(&pair(m, n), &snr)?;
                let spec = MonteCarloSpec::new(1_000_000, seed, 1 << 16)?;
                seed += 1;
                let est = estimate_event(&pair(m, n), &spec, uplink_latency_event(&snr))?;
                agg.record(
                    exact,
                    &est,
                    format!("(m,n)=({m},{n}) rho_m={rho_m_db}dB eta={eta}"),
                );
            }
        }
    }
    Ok(finish(
        2,
        "uplink-latency-oracle",
        agg.failures == 0,
        agg.detail("1e6"),
    ))
}

/// Boundary limits: certain offloading at vanishing weak SNR and at
/// dominant strong SNR.
pub fn criterion_03() -> Result<CriterionResult> {
    let mut min_p = 1.0f64;
    let mut passed = true;
    for (m, n) in [(1u32, 2u32), (2, 4), (4, 5)] {
        let low = SnrOperatingPoint::from_eta(db_to_linear(-30.0), 2.0)?;
        let p = p_n_exact(&pair(m, n), &low)?;
        min_p = min_p.min(p);
        passed &= p >= 0.99;
        let high = SnrOperatingPoint::new(1.0, db_to_linear(60.0))?;
        let p = p_n_exact(&pair(m, n), &high)?;
        min_p = min_p.min(p);
        passed &= p >= 0.99;
    }
    Ok(finish(
        3,
        "uplink-latency-limits",
        passed,
        format!("min probability {min_p:.6} across both limits, threshold 0.99"),
    ))
}

/// High-SNR decay order of the uplink-latency curve.
pub fn criterion_04() -> Result<CriterionResult> {
    let mut passed = true;
    let mut detail = Vec::new();
    for (m, n) in [(1u32, 2u32), (2, 4), (3, 5)] {
        let curve: Result<Vec<(f64, f64)>> = (0..=10)
            .map(|i| {
                let rho_n = 10f64.powf(3.5 + 0.2 * f64::from(i));
                let snr = SnrOperatingPoint::new(rho_n / 2.0, rho_n)?;
                Ok((rho_n, p_n_exact(&pair(m, n), &snr)?))
            })
            .collect();
        let d = decay_exponent_fit(&curve?, (35.0, 55.0))?;
        passed &= (d - f64::from(m) / 2.0).abs() <= 0.1;
        detail.push(format!("m={m}: d={d:.4}"));
    }
    Ok(finish(
        4,
        "uplink-latency-decay",
        passed,
        format!("{} vs m/2 within 0.1 over [35,55] dB", detail.join(", ")),
    ))
}

/// Uplink energy-comparison curve against the raw-event simulation,
/// covering both closed-form branches.
pub fn criterion_05() -> Result<CriterionResult> {
    let mut agg = Agreement::new();
    let mut seed = 5000u64;
    for (m, n) in [(1u32, 2u32), (3, 5)] {
        for beta in [0.125, 0.25, 1.0 / 3.0] {
            let scale = EnergyScaling::new(beta)?;
            for step in 0..7 {
                let rho_n_db = 10.0 + 5.0 * f64::from(step);
                let snr = SnrOperatingPoint::new(10.0, db_to_linear(rho_n_db))?;
                let exact = p_tilde_exact(&pair(m, n), &snr, &scale)?;
                let spec = MonteCarloSpec::new(1_000_000, seed, 1 << 16)?;
                seed += 1;
                let est = estimate_event(&pair(m, n), &spec, uplink_energy_event(&snr, &scale))?;
                agg.record(
                    exact,
                    &est,
                    format!("(m,n)=({m},{n}) beta={beta:.3} rho_n={rho_n_db}dB"),
                );
            }
        }
    }
    Ok(finish(
        5,
        "uplink-energy-oracle",
        agg.failures == 0,
        agg.detail("1e6"),
    ))
}

/// The reported operating point where the energy-comparison probability
/// reaches the percent range for the best weak user.
pub fn criterion_06() -> Result<CriterionResult> {
    let snr = SnrOperatingPoint::new(10.0, db_to_linear(25.0))?;
    let scale = EnergyScaling::new(0.125)?;
    let mut chosen = None;
    let mut values = Vec::new();
    for n in [2u32, 5] {
        let p = p_tilde_exact(&pair(1, n), &snr, &scale)?;
        values.push(format!("n={n}: {p:.4e}"));
        if (1e-2 / 3.0..=1e-2 * 3.0).contains(&p) && chosen.is_none() {
            chosen = Some(n);
        }
    }
    let detail = match chosen {
        Some(n) => format!("chosen n={n}; {}", values.join(", ")),
        None => format!("no n within a factor of 3 of 1e-2; {}", values.join(", ")),
    };
    Ok(finish(6, "uplink-energy-anchor", chosen.is_some(), detail))
}

/// Vanish-or-plateau behavior of the energy comparison at high SNR.
pub fn criterion_07() -> Result<CriterionResult> {
    let mut passed = true;
    let mut notes = Vec::new();

    let quarter = EnergyScaling::new(0.25)?;
    for (m, n) in [(1u32, 2u32), (2, 4), (3, 5)] {
        let snr = SnrOperatingPoint::new(10.0, db_to_linear(55.0))?;
        let p = p_tilde_exact(&pair(m, n), &snr, &quarter)?;
        passed &= p < 1e-3;
        if m == 1 {
            notes.push(format!("vanishing p(55dB)={p:.2e}"));
        }
    }

    let fifth = EnergyScaling::new(0.2)?;
    for (m, n) in [(1u32, 2u32), (2, 4), (3, 5)] {
        let p50 = {
            let rho_n = db_to_linear(50.0);
            p_tilde_exact(
                &pair(m, n),
                &SnrOperatingPoint::new(rho_n / 2.0, rho_n)?,
                &fifth,
            )?
        };
        let p60 = {
            let rho_n = db_to_linear(60.0);
            p_tilde_exact(
                &pair(m, n),
                &SnrOperatingPoint::new(rho_n / 2.0, rho_n)?,
                &fifth,
            )?
        };
        passed &= (p50 - p60).abs() < 1e-2;
        let regime = p_tilde_regime(
            &pair(m, n),
            SnrGrowth::BothProportional { ratio: 0.5 },
            &fifth,
        )?;
        let AsymptoticRegime::Plateaus { constant } = regime else {
            passed = false;
            notes.push(format!("(m,n)=({m},{n}) failed to plateau"));
            continue;
        };
        passed &= (p60 - constant).abs() < 1e-2;
        if m == 1 {
            notes.push(format!("plateau |p60-c|={:.2e}", (p60 - constant).abs()));
        }
    }

    Ok(finish(
        7,
        "uplink-energy-regimes",
        passed,
        format!("{} across (m,n) in {{(1,2),(2,4),(3,5)}}", notes.join("; ")),
    ))
}

fn downlink_grid() -> Vec<(u32, u32, f64, f64)> {
    let mut grid = Vec::new();
    for (m, n) in [(1u32, 2u32), (2, 4)] {
        for beta_tilde in [0.2, 0.5] {
            for step in 0..7 {
                grid.push((m, n, beta_tilde, 10.0 + 5.0 * f64::from(step)));
            }
        }
    }
    grid
}

/// Downlink quadrature against the rate-bookkeeping simulation, which
/// shares no algebra with the closed form.
pub fn criterion_08() -> Result<CriterionResult> {
    let task = DownlinkTaskSpec::new(1.0, 1.0)?;
    let quad = QuadratureSpec::default();
    let mut agg = Agreement::new();
    for (seed, (m, n, beta_tilde, rho_db)) in (8000u64..).zip(downlink_grid()) {
        let rho = db_to_linear(rho_db);
        let analytic = p_d_tilde_quadrature(&pair(m, n), rho, beta_tilde, &task, &quad)?;
        let spec = MonteCarloSpec::new(10_000_000, seed, 1 << 16)?;
        let event = downlink_energy_event(rho, beta_tilde, &task)?;
        let est = estimate_event(&pair(m, n), &spec, event)?;
        agg.record(
            analytic,
            &est,
            format!("(m,n)=({m},{n}) beta~={beta_tilde} rho={rho_db}dB"),
        );
    }
    Ok(finish(
        8,
        "downlink-energy-oracle",
        agg.failures == 0,
        agg.detail("1e7"),
    ))
}

/// Decay order of the downlink energy-comparison curve.
pub fn criterion_09() -> Result<CriterionResult> {
    let task = DownlinkTaskSpec::new(1.0, 1.0)?;
    let quad = QuadratureSpec::default();
    let mut passed = true;
    let mut detail = Vec::new();
    for (m, n) in [(1u32, 2u32), (2, 4)] {
        let curve: Result<Vec<(f64, f64)>> = (0..=10)
            .map(|i| {
                let rho = 10f64.powf(3.5 + 0.2 * f64::from(i));
                Ok((
                    rho,
                    p_d_tilde_quadrature(&pair(m, n), rho, 0.5, &task, &quad)?,
                ))
            })
            .collect();
        let d = decay_exponent_fit(&curve?, (35.0, 55.0))?;
        passed &= (d - f64::from(m)).abs() <= 0.15;
        detail.push(format!("m={m}: d={d:.4}"));
    }
    Ok(finish(
        9,
        "downlink-energy-decay",
        passed,
        format!("{} vs m within 0.15 over [35,55] dB", detail.join(", ")),
    ))
}

/// Quadrature stability under node doubling across the oracle grid.
pub fn criterion_10() -> Result<CriterionResult> {
    let task = DownlinkTaskSpec::new(1.0, 1.0)?;
    let coarse = QuadratureSpec::default();
    let fine = QuadratureSpec::new(2 * coarse.points())?;
    let mut worst = 0.0f64;
    for (m, n, beta_tilde, rho_db) in downlink_grid() {
        let rho = db_to_linear(rho_db);
        let a = p_d_tilde_quadrature(&pair(m, n), rho, beta_tilde, &task, &coarse)?;
        let b = p_d_tilde_quadrature(&pair(m, n), rho, beta_tilde, &task, &fine)?;
        worst = worst.max((a - b).abs());
    }
    Ok(finish(
        10,
        "quadrature-stability",
        worst < 1e-4,
        format!(
            "worst |p({}) - p({})| = {worst:.3e} over the oracle grid, tolerance 1e-4",
            coarse.points(),
            fine.points()
        ),
    ))
}

/// The curved downlink threshold collapses to a plain interval check above
/// the starvation point.
pub fn criterion_11() -> Result<CriterionResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(1106);
    let mut mismatches = 0u32;
    let mut accepted = 0u32;
    while accepted < 10_000 {
        let rho = 10f64.powf(rng.random::<f64>() * 4.0);
        let beta_tilde = 0.05 + 0.9 * rng.random::<f64>();
        let bits = 0.25 + 3.75 * rng.random::<f64>();
        let eps = bits.exp2() - 1.0;
        let spread = 10f64.powf(-6.0 + 9.0 * rng.random::<f64>());
        let x = eps / rho * (1.0 + spread);
        let right = eps / (beta_tilde * rho);
        if (x - right).abs() <= 1e-9 * right {
            continue;
        }
        accepted += 1;
        let slope_num = rho * ((1.0 - beta_tilde) * (1.0 + eps) - 1.0);
        let g = (slope_num * x + eps) / (rho * beta_tilde * (rho * x - eps));
        if (x <= g) != (x <= right) {
            mismatches += 1;
        }
    }
    Ok(finish(
        11,
        "downlink-region-identity",
        mismatches == 0,
        format!("{mismatches} mismatches over {accepted} random tuples"),
    ))
}

fn criterion_02_sweep_csv() -> Result<String> {
    let mut out = String::new();
    for (m, n) in [(1u32, 2u32), (2, 4), (4, 5)] {
        for eta in [0.5, 2.0, 5.0] {
            let cfg = SweepConfig {
                mode: Mode::UplinkLatency,
                axis: SweepAxis {
                    param: SweepParam::RhoMDb,
                    start: 0.0,
                    stop: 20.0,
                    step: 10.0,
                },
                fixed: FixedParams {
                    population: 5,
                    weak: m,
                    strong: n,
                    eta: Some(eta),
                    ..FixedParams::default()
                },
                mc: Some(McParams {
                    trials: 1_000_000,
                    seed: 777,
                    chunk: None,
                }),
                quad_points: None,
            };
            out.push_str(&run_sweep(&cfg)?);
        }
    }
    Ok(out)
}

/// Rerunning the oracle sweep with the same seed reproduces the CSV byte
/// for byte.
pub fn criterion_12() -> Result<CriterionResult> {
    let first = criterion_02_sweep_csv()?;
    let second = criterion_02_sweep_csv()?;
    let identical = first == second;
    Ok(finish(
        12,
        "sweep-determinism",
        identical,
        format!(
            "two runs of the 27-point oracle sweep: {} bytes each, {}",
            first.len(),
            if identical { "identical" } else { "DIFFERENT" }
        ),
    ))
}

type Criterion = fn() -> Result<CriterionResult>;

pub const ALL: [(u32, Criterion); 12] = [
    (1, criterion_01),
    (2, criterion_02),
    (3, criterion_03),
    (4, criterion_04),
    (5, criterion_05),
    (6, criterion_06),
    (7, criterion_07),
    (8, criterion_08),
    (9, criterion_09),
    (10, criterion_10),
    (11, criterion_11),
    (12, criterion_12),
];

/// Run every criterion, or a single one when `only` is given.
pub fn run(only: Option<u32>) -> Result<Vec<CriterionResult>> {
    let mut out = Vec::new();
    for (id, f) in ALL {
        if only.is_none_or(|want| want == id) {
            out.push(f()?);
        }
    }
    if out.is_empty() {
        return Err(crate::CliError::Config(format!(
            "no criterion numbered {}; valid ids are 1..=12",
            only.unwrap_or(0)
        )));
    }
    Ok(out)
}
