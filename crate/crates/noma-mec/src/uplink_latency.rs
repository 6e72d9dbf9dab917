//! Uplink latency: the probability that the strong user of a NOMA pair
//! finishes offloading its task inside the weak user's OMA time slot.
//!
//! The scheme keeps the weak user m on its OMA schedule and lets the strong
//! user n transmit on top of it. With SIC at the base station, user n's
//! extra transmission succeeds within user m's slot exactly when
//!
//! ```text
//! |h_n|^2 > (rho_m/rho_n) |h_m|^2 + (rho_m^2/rho_n) |h_m|^4,
//! ```
//!
//! and P_n is that event's probability under the ordered-gain density of
//! [`crate::chanstat`]. The closed form integrates the density over the
//! event region; the inner integral produces the probability-integral terms
//! and the outer one the alternating binomial sums.
//!
//! Three evaluators are exposed. [`p_n_exact`] is the full closed form,
//! valid at any SNR, including rho_n < rho_m where the threshold's linear
//! part already exceeds the ordering bound and the lower integration limit
//! collapses to zero. [`p_n_highsnr`] is the high-SNR expansion whose terms
//! split by the parity of m, and [`p_n_highsnr_dominant`] keeps only its
//! slowest-decaying piece, making the rho^{-m/2} decay rate visible by
//! inspection. The asymptotic forms are approximations, not probabilities;
//! outside their regime they may exceed one and are returned unclamped.

use core::f64::consts::PI;

use crate::chanstat::{
    erfcx, factorial_f64, unit_interval_checked, ChannelGainPair, CompensatedSum, OrderedPairConfig,
};
use crate::error::{Error, Result};

/// Linear transmit SNRs of the paired users.
///
/// Invariants: both SNRs are finite and positive, and `eta` equals
/// `rho_n / rho_m` exactly (it is derived at construction, never stored
/// independently).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrOperatingPoint {
    rho_m: f64,
    rho_n: f64,
    eta: f64,
}

impl SnrOperatingPoint {
    pub fn new(rho_m: f64, rho_n: f64) -> Result<Self> {
        if !(rho_m.is_finite() && rho_n.is_finite() && rho_m > 0.0 && rho_n > 0.0) {
            return Err(Error::Invalid(format!(
                "SNRs must be finite and positive, got rho_m={rho_m}, rho_n={rho_n}"
            )));
        }
        Ok(Self {
            rho_m,
            rho_n,
            eta: rho_n / rho_m,
        })
    }

    /// Same operating point, parameterized by the power ratio eta = rho_n/rho_m.
    pub fn from_eta(rho_m: f64, eta: f64) -> Result<Self> {
        if !(eta.is_finite() && eta > 0.0) {
            return Err(Error::Invalid(format!(
                "eta must be finite and positive, got {eta}"
            )));
        }
        Self::new(rho_m, rho_m * eta)
    }

    pub fn rho_m(&self) -> f64 {
        self.rho_m
    }

    pub fn rho_n(&self) -> f64 {
        self.rho_n
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Double factorial k!! as f64; (-1)!! = 0!! = 1 by convention.
fn double_factorial(k: i64) -> f64 {
    let mut r = 1.0;
    let mut k = k;
    while k > 1 {
        r *= k as f64;
        k -= 2;
    }
    r
}

/// The per-summand symbols of the exact and high-SNR forms.
///
/// `a` and `b` drive the exact closed form (one pair per (p, l) summand);
/// `lambda`, `mu_m` and the parity-split `q1_tilde`, `q2_tilde` drive the
/// high-SNR expansion (l enters them only through the internal sum of
/// `mu_m`). At l = 0 the identity b = lambda holds, since
/// lambda = p + 1 + (M-m-p)/eta.
#[derive(Debug, Clone, Copy)]
pub struct HighSnrTerms {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub mu_m: f64,
    pub q1_tilde: f64,
    pub q2_tilde: f64,
}

impl HighSnrTerms {
    pub fn evaluate(cfg: &OrderedPairConfig, snr: &SnrOperatingPoint, p: u32, l: u32) -> Self {
        let m = cfg.weak_index();
        let k = (cfg.population() - m - p) as f64;
        let a = snr.rho_m() / snr.eta() * k;
        let b = (p + l + 1) as f64 + k / snr.eta();
        let lambda = (p + 1) as f64 + k / snr.eta();

        // mu_m collects the l-sum of the expansion's polynomial piece plus
        // the boundary contribution proportional to lambda.
        let mut mu = CompensatedSum::default();
        for j in 0..m {
            mu.add(cfg.c_l(j) * (j as f64).powi(m as i32));
        }
        let parity_sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        mu.add(factorial_f64(m) * lambda * parity_sign);
        let mu_m = mu.value();

        let sqrt_pi = PI.sqrt();
        let (q1_tilde, q2_tilde) = if m % 2 == 1 {
            // Odd m: the leading term is a constant in a, the correction
            // decays like a^{-1/2}.
            let q1 =
                sqrt_pi * factorial_f64(m - 1) / (factorial_f64((m - 1) / 2) * 2f64.powi(m as i32));
            let q2 =
                mu_m / (double_factorial(m as i64) * 2f64.powi(m.div_ceil(2) as i32) * a.sqrt());
            (q1, q2)
        } else {
            // Even m: the roles swap; the constant piece carries the sign
            // (-1)^{m-1} = -1.
            let q1 = sqrt_pi * mu_m / (factorial_f64(m / 2) * 2f64.powi((m + 1) as i32) * a.sqrt());
            let q2 = -factorial_f64(m - 1)
                / (double_factorial(m as i64 - 1) * 2f64.powi((m / 2) as i32));
            (q1, q2)
        };

        Self {
            a,
            b,
            lambda,
            mu_m,
            q1_tilde,
            q2_tilde,
        }
    }
}

/// Exact offloading probability P_n.
///
/// The delicate piece is the product e^{b^2/4a} (1 - Phi(z)), which is
/// rewritten through the scaled complement as erfcx(z) e^{-nu (a nu + b)}
/// with z = sqrt(a) nu + b/(2 sqrt(a)); both exponentials then have
/// nonpositive arguments and nothing can overflow. The threshold shift
/// nu = max{0, rho_n - rho_m} / rho_m^2 vanishes when the strong user is
/// the higher-power one, in which case the single-sum tail cancels to zero
/// term by term against the combinatorial identity.
pub fn p_n_exact(cfg: &OrderedPairConfig, snr: &SnrOperatingPoint) -> Result<f64> {
    let mm = cfg.population();
    let m = cfg.weak_index();
    let n = cfg.strong_index();
    let (rho_m, rho_n) = (snr.rho_m(), snr.rho_n());
    let nu = (rho_n - rho_m).max(0.0) / (rho_m * rho_m);

    let mut acc = CompensatedSum::default();
    for p in 0..=(n - 1 - m) {
        let k = (mm - m - p) as f64;
        let a = rho_m * rho_m / rho_n * k;
        let sqrt_a = a.sqrt();
        for l in 0..m {
            let b = (p + l + 1) as f64 + k * rho_m / rho_n;
            let z = sqrt_a * nu + b / (2.0 * sqrt_a);
            let term = cfg.c_mn() * cfg.c_p(p) / k
                * cfg.c_l(l)
                * (PI.sqrt() / (2.0 * sqrt_a))
                * erfcx(z)
                * (-nu * (a * nu + b)).exp();
            if !term.is_finite() {
                return Err(Error::NonFiniteSummand { p, l, value: term });
            }
            acc.add(term);
        }
    }

    acc.add(1.0);
    let pref = factorial_f64(mm) / (factorial_f64(m - 1) * factorial_f64(mm - m));
    for l in 0..m {
        let d = (mm - m + l + 1) as f64;
        acc.add(-pref * cfg.c_l(l) * (-d * nu).exp() / d);
    }

    unit_interval_checked(acc.value())
}

/// High-SNR expansion of P_n at fixed power ratio eta.
///
/// Returned raw: the expansion is asymptotic in rho_m and blows past one
/// when evaluated at low SNR, which is informative rather than wrong.
pub fn p_n_highsnr(cfg: &OrderedPairConfig, rho_m: f64, eta: f64) -> Result<f64> {
    let snr = SnrOperatingPoint::from_eta(rho_m, eta)?;
    let m = cfg.weak_index();
    let n = cfg.strong_index();
    let half_m = m as f64 / 2.0;

    let mut acc = CompensatedSum::default();
    for p in 0..=(n - 1 - m) {
        let terms = HighSnrTerms::evaluate(cfg, &snr, p, 0);
        let k = (cfg.population() - m - p) as f64;
        let term = eta.powf(half_m) * cfg.c_mn() * cfg.c_p(p) / k.powf(half_m + 1.0)
            * (terms.q1_tilde - terms.q2_tilde);
        if !term.is_finite() {
            return Err(Error::NonFiniteSummand {
                p,
                l: 0,
                value: term,
            });
        }
        acc.add(term);
    }
    Ok(acc.value() / rho_m.powf(half_m))
}

/// Dominant decay term of the high-SNR expansion: a single power law
/// K_m (eta/rho_m)^{m/2} scaled by the combinatorial sum over p, decaying
/// exactly like rho^{-m/2}.
pub fn p_n_highsnr_dominant(cfg: &OrderedPairConfig, rho_m: f64, eta: f64) -> Result<f64> {
    // Construction only validates; the dominant term needs no per-p symbols.
    let _ = SnrOperatingPoint::from_eta(rho_m, eta)?;
    let m = cfg.weak_index();
    let n = cfg.strong_index();
    let half_m = m as f64 / 2.0;

    let k_m = if m % 2 == 1 {
        PI.sqrt() * factorial_f64(m - 1) / (factorial_f64((m - 1) / 2) * 2f64.powi(m as i32))
    } else {
        factorial_f64(m - 1) / (double_factorial(m as i64 - 1) * 2f64.powi((m / 2) as i32))
    };

    let mut acc = CompensatedSum::default();
    for p in 0..=(n - 1 - m) {
        let k = (cfg.population() - m - p) as f64;
        acc.add(cfg.c_mn() * cfg.c_p(p) / k.powf(half_m + 1.0));
    }
    Ok((eta / rho_m).powf(half_m) * k_m * acc.value())
}

/// Power budget for one strong-user transmission alongside a given weak
/// user, split into the OMA baseline and the interference surcharge NOMA
/// adds on top.
///
/// `noma_power = oma_power + excess` holds exactly by construction; the
/// surcharge is (rho_m |h_m|^2)^2 / |h_n|^2, the price of transmitting
/// over the weak user's active slot instead of a clean one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinNomaPower {
    pub noma_power: f64,
    pub oma_power: f64,
    pub excess: f64,
}

/// Minimal strong-user transmit SNR that matches its OMA rate while the
/// weak user occupies the slot, next to the clean-slot OMA baseline.
pub fn min_noma_power(rho_m: f64, gains: &ChannelGainPair) -> Result<MinNomaPower> {
    if !(rho_m.is_finite() && rho_m > 0.0) {
        return Err(Error::Invalid(format!(
            "rho_m must be finite and positive, got {rho_m}"
        )));
    }
    if gains.strong_gain == 0.0 {
        return Err(Error::ZeroStrongGain);
    }
    let oma_power = gains.weak_gain / gains.strong_gain * rho_m;
    let scaled = rho_m * gains.weak_gain;
    let excess = scaled * scaled / gains.strong_gain;
    Ok(MinNomaPower {
        noma_power: oma_power + excess,
        oma_power,
        excess,
    })
}
