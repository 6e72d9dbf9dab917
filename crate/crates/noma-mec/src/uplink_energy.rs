//! Uplink energy comparison: the probability that plain OMA delivers at
//! least as much data as the energy-reduced NOMA protocol.
//!
//! In the energy-saving variant, user n transmits in both slots of the OMA
//! frame at the reduced power beta * rho_n each, spending 2 beta < 1 of its
//! OMA energy. OMA wins the data race exactly when
//!
//! ```text
//! |h_n|^2 <= ((1 - beta)(1 + rho_m |h_m|^2) - beta) / (beta^2 rho_n),
//! ```
//!
//! a half-plane event in the ordered-gain pair whose probability P~_n has
//! two closed forms, split by the sign of (1 - beta) rho_m - beta^2 rho_n.
//! When that quantity is nonnegative the threshold line lies above the
//! ordering diagonal everywhere, one integration region disappears, and the
//! short form applies; otherwise the crossing point
//! kappa_1 = (1 - 2 beta) / (beta^2 rho_n - (1 - beta) rho_m) splits the
//! outer integral in two. On the boundary itself kappa_1 diverges but the
//! crossing recedes to infinity, so the short form is the correct limit and
//! is the branch taken.
//!
//! The asymptotic behaviour is a regime classification rather than a decay
//! law: P~_n vanishes when the strong user's power grows fast enough
//! (rho_m / rho_n staying below beta^2 / (1 - beta)) and otherwise settles
//! at a nonzero plateau whose value [`p_tilde_regime`] reports.

use crate::chanstat::{factorial_f64, unit_interval_checked, CompensatedSum, OrderedPairConfig};
use crate::error::{Error, Result};
use crate::uplink_latency::SnrOperatingPoint;

/// Per-slot power fraction beta used by NOMA user n in the energy-reduced
/// protocol.
///
/// Invariant: 0 < beta < 1/2 strictly, so that NOMA's two-slot energy
/// 2 beta rho_n stays below the OMA budget and the comparison is nontrivial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyScaling {
    beta: f64,
}

impl EnergyScaling {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0 && beta < 0.5) {
            return Err(Error::Invalid(format!(
                "beta must lie strictly inside (0, 1/2), got {beta}"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Crossing point of the threshold line with the ordering diagonal,
    /// finite and positive only in the second branch.
    pub(crate) fn kappa_1(&self, snr: &SnrOperatingPoint) -> f64 {
        let b = self.beta;
        (1.0 - 2.0 * b) / (b * b * snr.rho_n() - (1.0 - b) * snr.rho_m())
    }
}

/// Exact evaluation of P~_n.
pub fn p_tilde_exact(
    cfg: &OrderedPairConfig,
    snr: &SnrOperatingPoint,
    scale: &EnergyScaling,
) -> Result<f64> {
    let mm = cfg.population();
    let m = cfg.weak_index();
    let n = cfg.strong_index();
    let beta = scale.beta();
    let (rho_m, rho_n) = (snr.rho_m(), snr.rho_n());

    // Threshold intercept: P(strong <= c + s * weak) with
    // c = (1 - 2 beta) / (beta^2 rho_n), s = (1 - beta) rho_m / (beta^2 rho_n).
    let c = (1.0 - 2.0 * beta) / (beta * beta * rho_n);

    let mut acc = CompensatedSum::default();
    acc.add(1.0);

    let first_branch = (1.0 - beta) * rho_m >= beta * beta * rho_n;
    if !first_branch {
        // Below kappa_1 the ordering bound y >= x is the binding one and the
        // region integrates to the same single sum as the latency tail.
        let kappa_1 = scale.kappa_1(snr);
        let pref = factorial_f64(mm) / (factorial_f64(m - 1) * factorial_f64(mm - m));
        for l in 0..m {
            let d = (mm - m + l + 1) as f64;
            let term = -pref * cfg.c_l(l) * (-d * kappa_1).exp() / d;
            if !term.is_finite() {
                return Err(Error::NonFiniteSummand {
                    p: 0,
                    l,
                    value: term,
                });
            }
            acc.add(term);
        }
    }

    for p in 0..=(n - 1 - m) {
        let k = (mm - m - p) as f64;
        for l in 0..m {
            let a_tilde = rho_m * (1.0 - beta) * k / (beta * beta * rho_n) + (p + l + 1) as f64;
            // First branch integrates the threshold tail over all x; the
            // second stops at kappa_1, leaving the bracketed complement.
            let reach = if first_branch {
                1.0
            } else {
                1.0 - (-a_tilde * scale.kappa_1(snr)).exp()
            };
            let term =
                -cfg.c_mn() * cfg.c_p(p) * cfg.c_l(l) * (-k * c).exp() * reach / (k * a_tilde);
            if !term.is_finite() {
                return Err(Error::NonFiniteSummand { p, l, value: term });
            }
            acc.add(term);
        }
    }

    unit_interval_checked(acc.value())
}

/// How the pair of SNRs is taken to infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrGrowth {
    /// rho_n grows without bound, rho_m held fixed.
    StrongOnly,
    /// Both grow with rho_m / rho_n approaching the given positive ratio.
    BothProportional { ratio: f64 },
    /// rho_m grows without bound, rho_n held fixed.
    WeakOnly,
}

/// Limiting behaviour of P~_n along a growth path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticRegime {
    Vanishes,
    Plateaus { constant: f64 },
}

/// Classifies the limit of P~_n under the given SNR growth and, for the
/// plateau case, evaluates the limiting constant.
///
/// The discriminating ratio is beta^2 / (1 - beta): growth paths keeping
/// rho_m / rho_n below it drive the threshold intercept and slope to zero
/// together and P~_n vanishes; at or above it the slope survives and P~_n
/// settles. The plateau constant is the c -> 0 limit of the first-branch
/// sum, with a~ frozen at b~ + p + l + 1, b~ = ratio (1-beta) (M-m-p) / beta^2.
/// A weak-user-only blowup pushes the threshold to infinity and the
/// constant to one.
pub fn p_tilde_regime(
    cfg: &OrderedPairConfig,
    growth: SnrGrowth,
    scale: &EnergyScaling,
) -> Result<AsymptoticRegime> {
    let beta = scale.beta();
    match growth {
        SnrGrowth::StrongOnly => Ok(AsymptoticRegime::Vanishes),
        SnrGrowth::WeakOnly => Ok(AsymptoticRegime::Plateaus { constant: 1.0 }),
        SnrGrowth::BothProportional { ratio } => {
            if !(ratio.is_finite() && ratio > 0.0) {
                return Err(Error::Invalid(format!(
                    "growth ratio rho_m/rho_n must be finite and positive, got {ratio}"
                )));
            }
            if ratio < beta * beta / (1.0 - beta) {
                return Ok(AsymptoticRegime::Vanishes);
            }
            let m = cfg.weak_index();
            let n = cfg.strong_index();
            let mut acc = CompensatedSum::default();
            acc.add(1.0);
            for p in 0..=(n - 1 - m) {
                let k = (cfg.population() - m - p) as f64;
                let b_tilde = ratio * (1.0 - beta) * k / (beta * beta);
                for l in 0..m {
                    acc.add(
                        -cfg.c_mn() * cfg.c_p(p) * cfg.c_l(l)
                            / (k * (b_tilde + (p + l + 1) as f64)),
                    );
                }
            }
            Ok(AsymptoticRegime::Plateaus {
                constant: unit_interval_checked(acc.value())?,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_domain_is_open() {
        assert!(EnergyScaling::new(0.25).is_ok());
        assert!(EnergyScaling::new(0.0).is_err());
        assert!(EnergyScaling::new(0.5).is_err());
        assert!(EnergyScaling::new(f64::NAN).is_err());
    }

    #[test]
    fn regime_classification_boundaries() {
        let cfg = OrderedPairConfig::new(5, 1, 2).unwrap();
        let scale = EnergyScaling::new(0.2).unwrap();
        // beta^2/(1-beta) = 0.05; the boundary itself belongs to the plateau
        let boundary = 0.2 * 0.2 / (1.0 - 0.2);
        assert_eq!(
            p_tilde_regime(&cfg, SnrGrowth::BothProportional { ratio: 0.04 }, &scale).unwrap(),
            AsymptoticRegime::Vanishes
        );
        assert!(matches!(
            p_tilde_regime(
                &cfg,
                SnrGrowth::BothProportional { ratio: boundary },
                &scale
            )
            .unwrap(),
            AsymptoticRegime::Plateaus { .. }
        ));
        assert_eq!(
            p_tilde_regime(&cfg, SnrGrowth::WeakOnly, &scale).unwrap(),
            AsymptoticRegime::Plateaus { constant: 1.0 }
        );
        assert!(p_tilde_regime(
            &cfg,
            SnrGrowth::BothProportional {
                ratio: f64::INFINITY
            },
            &scale
        )
        .is_err());
    }
}
