//! Downlink NOMA-MEC: cognitive-radio power allocation, per-server rate
//! bookkeeping, and the quadrature closed form for the energy comparison.
//!
//! The base station superposes the two servers' signals with power split
//! alpha_m^2 + alpha_n^2 = 1. Under the cognitive-radio policy the weak
//! server m is the primary: alpha_n^2 takes whatever power is left after
//! server m's signal-to-interference ratio is pinned exactly at the OMA
//! target epsilon = 2^{N/T} - 1,
//!
//! ```text
//! alpha_n^2 = max{0, (rho g_m - epsilon) / (rho g_m (1 + epsilon))}.
//! ```
//!
//! Both signals reach a server through that server's own channel, so the
//! interference in server m's SINR rides on g_m; substituting the policy in
//! gives SINR_m = epsilon identically whenever the allocation is feasible,
//! which is what [`downlink_rates`] reproduces bit for bit.
//!
//! The energy-reduced protocol then gives server n a second, NOMA-freed
//! slot at reduced power beta~ rho. OMA still wins the data race when
//! server n's two-slot total falls short of its single-slot OMA bits; that
//! event's probability P~^D_n reduces to a one-dimensional integral over
//! the weak gain whose integrand mixes exponentials of the curved threshold
//!
//! ```text
//! g(x) = (rho x [(1-beta~)(1+epsilon) - 1] + epsilon) / (rho beta~ (rho x - epsilon)),
//! ```
//!
//! on x in [epsilon/rho, epsilon/(beta~ rho)]. No elementary antiderivative
//! exists, so [`p_d_tilde_quadrature`] applies Chebyshev-Gauss quadrature;
//! the kernel is bounded (the diverging exponent only ever appears inside a
//! decaying exponential) and a few dozen nodes settle the value to well
//! below the Monte Carlo resolution used to cross-check it.

use crate::chanstat::{
    factorial_f64, unit_interval_checked, ChannelGainPair, CompensatedSum, OrderedPairConfig,
};
use crate::error::{Error, Result};
use crate::mc_oracle::{self, MonteCarloSpec, ProbabilityEstimate};

/// Task size and slot length, with the derived SINR target
/// epsilon = 2^{bits/slot} - 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownlinkTaskSpec {
    bits: f64,
    slot: f64,
    epsilon: f64,
}

impl DownlinkTaskSpec {
    pub fn new(bits: f64, slot: f64) -> Result<Self> {
        if !(bits.is_finite() && slot.is_finite() && bits > 0.0 && slot > 0.0) {
            return Err(Error::Invalid(format!(
                "task needs positive bits and slot, got bits={bits}, slot={slot}"
            )));
        }
        Ok(Self {
            bits,
            slot,
            epsilon: (bits / slot).exp2() - 1.0,
        })
    }

    pub fn bits(&self) -> f64 {
        self.bits
    }

    pub fn slot(&self) -> f64 {
        self.slot
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Superposition power split plus the second-slot power fraction beta~.
///
/// Invariants: 0 < beta_tilde < 1 (a full-power second slot would make the
/// energy comparison trivial) and alpha_m_sq = 1 - alpha_n_sq exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownlinkScaling {
    beta_tilde: f64,
    alpha_m_sq: f64,
    alpha_n_sq: f64,
}

impl DownlinkScaling {
    pub fn new(beta_tilde: f64, alpha_n_sq: f64) -> Result<Self> {
        if !(beta_tilde.is_finite() && beta_tilde > 0.0 && beta_tilde < 1.0) {
            return Err(Error::Invalid(format!(
                "beta_tilde must lie strictly inside (0, 1), got {beta_tilde}"
            )));
        }
        if !(alpha_n_sq.is_finite() && (0.0..=1.0).contains(&alpha_n_sq)) {
            return Err(Error::Invalid(format!(
                "alpha_n_sq must lie in [0, 1], got {alpha_n_sq}"
            )));
        }
        Ok(Self {
            beta_tilde,
            alpha_m_sq: 1.0 - alpha_n_sq,
            alpha_n_sq,
        })
    }

    /// Construction from values already known to satisfy the invariants
    /// (the cognitive-radio share is in [0, 1/(1+eps)) by derivation).
    /// Debug-checked; the Monte Carlo loop builds one of these per trial.
    pub(crate) fn from_parts(beta_tilde: f64, alpha_n_sq: f64) -> Self {
        debug_assert!(beta_tilde > 0.0 && beta_tilde < 1.0);
        debug_assert!((0.0..=1.0).contains(&alpha_n_sq));
        Self {
            beta_tilde,
            alpha_m_sq: 1.0 - alpha_n_sq,
            alpha_n_sq,
        }
    }

    pub fn beta_tilde(&self) -> f64 {
        self.beta_tilde
    }

    pub fn alpha_m_sq(&self) -> f64 {
        self.alpha_m_sq
    }

    pub fn alpha_n_sq(&self) -> f64 {
        self.alpha_n_sq
    }
}

/// Chebyshev-Gauss node count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    points: u32,
}

impl QuadratureSpec {
    pub fn new(points: u32) -> Result<Self> {
        if points == 0 {
            return Err(Error::Invalid("quadrature needs at least one node".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> u32 {
        self.points
    }
}

impl Default for QuadratureSpec {
    /// 64 nodes: doubling from here moves the acceptance-grid values by
    /// less than 1e-8, two orders under the tolerance the tests enforce.
    fn default() -> Self {
        Self { points: 64 }
    }
}

/// Strong-server power share under the cognitive-radio policy, as a bare
/// function of the weak gain. Zero gain means an infeasible primary link
/// and the max clamps the share to zero, so the expression never divides
/// by zero along a valid evaluation.
pub(crate) fn cr_alpha_n_sq(rho: f64, weak_gain: f64, epsilon: f64) -> f64 {
    let rg = rho * weak_gain;
    if rg <= epsilon {
        0.0
    } else {
        (rg - epsilon) / (rg * (1.0 + epsilon))
    }
}

/// Cognitive-radio power allocation for one realization of the weak
/// server's channel.
pub fn cr_power_allocation(
    rho: f64,
    weak_gain: f64,
    task: &DownlinkTaskSpec,
    beta_tilde: f64,
) -> Result<DownlinkScaling> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Invalid(format!(
            "rho must be finite and positive, got {rho}"
        )));
    }
    if !(weak_gain.is_finite() && weak_gain >= 0.0) {
        return Err(Error::Invalid(format!(
            "weak_gain must be finite and nonnegative, got {weak_gain}"
        )));
    }
    DownlinkScaling::new(beta_tilde, cr_alpha_n_sq(rho, weak_gain, task.epsilon()))
}

/// Bits moved per slot to each server under a fixed power split.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DownlinkRates {
    /// Superposition slot, weak server (decodes through its own channel
    /// with the strong server's signal as interference).
    pub bits_m: f64,
    /// Superposition slot, strong server (after SIC removes the weak
    /// server's signal).
    pub bits_n_slot1: f64,
    /// Second slot at reduced power beta~ rho, strong server alone.
    pub bits_n_slot2: f64,
}

pub(crate) fn rates_for(
    rho: f64,
    gains: &ChannelGainPair,
    scaling: &DownlinkScaling,
    slot: f64,
) -> DownlinkRates {
    let g_m = gains.weak_gain;
    let g_n = gains.strong_gain;
    let sinr_m = rho * scaling.alpha_m_sq() * g_m / (1.0 + rho * scaling.alpha_n_sq() * g_m);
    DownlinkRates {
        bits_m: slot * (1.0 + sinr_m).log2(),
        bits_n_slot1: slot * (1.0 + rho * scaling.alpha_n_sq() * g_n).log2(),
        bits_n_slot2: slot * (1.0 + scaling.beta_tilde() * rho * g_n).log2(),
    }
}

/// Rate bookkeeping for one realization of the ordered gain pair.
pub fn downlink_rates(
    rho: f64,
    gains: &ChannelGainPair,
    scaling: &DownlinkScaling,
    task: &DownlinkTaskSpec,
) -> Result<DownlinkRates> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::Invalid(format!(
            "rho must be finite and positive, got {rho}"
        )));
    }
    Ok(rates_for(rho, gains, scaling, task.slot()))
}

/// Closed-form P~^D_n by Chebyshev-Gauss quadrature.
///
/// The first term is the weak-gain CDF at epsilon/rho: below that point the
/// allocation starves server n entirely and OMA wins outright. The
/// quadrature term integrates the joint density between the ordering
/// diagonal and the curved threshold g(x). The bracket
/// e^{-kx} - e^{-k g(x)} is evaluated as e^{-kx}(-expm1(-k (g(x)-x))),
/// which keeps full precision when g hugs x near the right endpoint; at
/// the left endpoint g blows up and the second exponential is an exact
/// zero in the limit, so an overflowing or nonpositive denominator simply
/// drops that exponential.
pub fn p_d_tilde_quadrature(
    cfg: &OrderedPairConfig,
    rho: f64,
    beta_tilde: f64,
    task: &DownlinkTaskSpec,
    quad: &QuadratureSpec,
) -> Result<f64> {
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
    let kk = cfg.population();
    let m = cfg.weak_index();
    let n = cfg.strong_index();
    let eps = task.epsilon();

    let mut acc = CompensatedSum::default();
    acc.add(1.0);
    let pref = factorial_f64(kk) / (factorial_f64(m - 1) * factorial_f64(kk - m));
    for l in 0..m {
        let d = (kk - m + l + 1) as f64;
        acc.add(-pref * cfg.c_l(l) * (-d * eps / rho).exp() / d);
    }

    let lo = eps / rho;
    let hi = eps / (beta_tilde * rho);
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let nodes = quad.points();
    let weight = core::f64::consts::PI / nodes as f64;
    // Coefficient of x in g's numerator; epsilon cancels out of it.
    let slope_num = rho * ((1.0 - beta_tilde) * (1.0 + eps) - 1.0);

    for p in 0..=(n - 1 - m) {
        let k = (kk - m - p) as f64;
        let mut inner = CompensatedSum::default();
        for i in 1..=nodes {
            let theta = ((2 * i - 1) as f64 * core::f64::consts::PI / (2.0 * nodes as f64)).cos();
            let x = mid + half * theta;
            let den = rho * beta_tilde * (rho * x - eps);
            let bracket = if den > 0.0 {
                let g = (slope_num * x + eps) / den;
                if g.is_finite() {
                    (-k * x).exp() * (-libm::expm1(-k * (g - x)))
                } else {
                    (-k * x).exp()
                }
            } else {
                (-k * x).exp()
            };
            let kernel =
                (-((p + 1) as f64) * x).exp() * (1.0 - (-x).exp()).powi((m - 1) as i32) * bracket
                    / k;
            let term = weight * half * kernel * (1.0 - theta * theta).sqrt();
            if !term.is_finite() {
                return Err(Error::NonFiniteSummand {
                    p,
                    l: i,
                    value: term,
                });
            }
            inner.add(term);
        }
        acc.add(cfg.c_mn() * cfg.c_p(p) * inner.value());
    }

    unit_interval_checked(acc.value())
}

/// Monte Carlo estimates of the two downlink latency probabilities: the
/// chance each server's superposition-slot rate covers its own task, under
/// a fixed (non-adaptive) power split.
pub fn p_d_latency_mc(
    cfg: &OrderedPairConfig,
    rho: f64,
    scaling: &DownlinkScaling,
    bits_m: f64,
    bits_n: f64,
    slot: f64,
    mc: &MonteCarloSpec,
) -> Result<(ProbabilityEstimate, ProbabilityEstimate)> {
    let (event_m, event_n) =
        mc_oracle::downlink_latency_events(rho, *scaling, bits_m, bits_n, slot)?;
    let est_m = mc_oracle::estimate_event(cfg, mc, event_m)?;
    let est_n = mc_oracle::estimate_event(cfg, mc, event_n)?;
    Ok((est_m, est_n))
}

/// Least-squares decay exponent d of a probability curve, i.e. the d in
/// p(rho) ~ rho^{-d}, fitted on the points whose rho falls inside the given
/// dB window.
pub fn decay_exponent_fit(curve: &[(f64, f64)], window_db: (f64, f64)) -> Result<f64> {
    let (lo_db, hi_db) = window_db;
    let mut pts = Vec::new();
    for &(rho, prob) in curve {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(Error::FitDomain(format!("nonpositive rho {rho} in curve")));
        }
        let db = 10.0 * rho.log10();
        if db >= lo_db && db <= hi_db {
            if !(prob.is_finite() && prob > 0.0) {
                return Err(Error::FitDomain(format!(
                    "probability {prob} at rho={rho} is not positive, cannot take its log"
                )));
            }
            pts.push((rho.ln(), prob.ln()));
        }
    }
    if pts.len() < 4 {
        return Err(Error::FitDomain(format!(
            "need at least 4 points inside [{lo_db}, {hi_db}] dB, found {}",
            pts.len()
        )));
    }

    let inv = 1.0 / pts.len() as f64;
    let x_bar = pts.iter().map(|&(x, _)| x).sum::<f64>() * inv;
    let y_bar = pts.iter().map(|&(_, y)| y).sum::<f64>() * inv;
    let sxy: f64 = pts.iter().map(|&(x, y)| (x - x_bar) * (y - y_bar)).sum();
    let sxx: f64 = pts.iter().map(|&(x, _)| (x - x_bar) * (x - x_bar)).sum();
    if sxx == 0.0 {
        return Err(Error::FitDomain("all window points share one rho".into()));
    }
    Ok(-(sxy / sxx))
}
