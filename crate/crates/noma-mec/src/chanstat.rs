//! Order statistics of unit-mean exponential channel gains and the special
//! functions the closed forms are built from.
//!
//! Rayleigh fading with normalized noise makes every squared channel gain an
//! exponential variate with unit mean, so sorting the gains of a population
//! of M users (or K servers) turns "the user with the m-th weakest channel"
//! into the m-th order statistic of M i.i.d. Exp(1) draws. Everything in
//! this crate is phrased in terms of one selected pair of order statistics:
//! the weak index m and the strong index n with m < n.
//!
//! The joint density of that pair is
//!
//! ```text
//! f(x, y) = c_mn e^{-x} e^{-(M-n+1)y} (1-e^{-x})^{m-1} (e^{-x}-e^{-y})^{n-1-m},   0 <= x <= y,
//! ```
//!
//! and the combinatorial constants c_mn, c_p, c_l that appear when the two
//! parenthesized factors are binomially expanded live on
//! [`OrderedPairConfig`]. With the population capped at twenty, all of them
//! fit exactly in integer arithmetic; they are computed from a u128
//! factorial table rather than from rounded log-factorials.
//!
//! The probability integral used by the uplink closed forms is the error
//! function, Phi(x) = (2/sqrt(pi)) Int_0^x e^{-t^2} dt. The closed forms
//! multiply e^{b^2/4a} by (1 - Phi(z)), a product that overflows long before
//! the result stops being a perfectly ordinary probability, so the scaled
//! complementary form e^{z^2}(1 - Phi(z)) is exposed as [`erfcx`] and the
//! callers keep only well-scaled exponentials.

use rand::Rng;

use crate::error::{Error, Result};

/// Hard cap on the population size M (or K).
///
/// Two independent reasons pin the same number: 20! is the largest factorial
/// that is still exact in the integer table below, and the alternating sums
/// of the closed forms cancel like 2^M, which at M = 20 already costs about
/// six of the sixteen decimal digits a f64 carries.
pub const MAX_POPULATION: u32 = 20;

/// Exact factorials 0! ..= 20!. 20! < 2^62, so u128 has plenty of headroom
/// for the multinomial products formed from these entries.
const FACTORIALS: [u128; 21] = {
    let mut t = [1u128; 21];
    let mut k = 1;
    while k <= 20 {
        t[k] = t[k - 1] * k as u128;
        k += 1;
    }
    t
};

fn factorial(k: u32) -> u128 {
    FACTORIALS[k as usize]
}

/// Exact factorial as f64 (k <= 20, so the value is below 2^62 and every
/// table entry converts without rounding until 18!; 19! and 20! round once).
pub(crate) fn factorial_f64(k: u32) -> f64 {
    factorial(k) as f64
}

/// Raw closed-form outputs are accepted as probabilities only inside
/// [-UNIT_TOL, 1 + UNIT_TOL] and then clamped; anything further out, or
/// non-finite, is a cancellation failure worth surfacing, not rounding.
pub(crate) const UNIT_TOL: f64 = 1e-9;

pub(crate) fn unit_interval_checked(value: f64) -> crate::error::Result<f64> {
    if !value.is_finite() || !(-UNIT_TOL..=1.0 + UNIT_TOL).contains(&value) {
        return Err(Error::OutOfUnitRange {
            value,
            tol: UNIT_TOL,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Exact binomial coefficient for the small arguments used here (n <= 20).
fn binomial(n: u32, k: u32) -> u128 {
    debug_assert!(k <= n && n <= MAX_POPULATION);
    factorial(n) / (factorial(k) * factorial(n - k))
}

/// Kahan-Babuska-Neumaier compensated accumulator.
///
/// The closed forms sum terms of alternating sign whose partial sums are
/// orders of magnitude larger than the result; carrying the running
/// compensation term recovers what plain `+=` throws away.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// The population and the two ordered indices selected for NOMA pairing.
///
/// Invariants: `2 <= population <= MAX_POPULATION` and
/// `1 <= weak_index < strong_index <= population`; both indices are
/// one-based ranks into the ascending sort of the channel gains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderedPairConfig {
    population: u32,
    weak_index: u32,
    strong_index: u32,
}

impl OrderedPairConfig {
    pub fn new(population: u32, weak_index: u32, strong_index: u32) -> Result<Self> {
        if population > MAX_POPULATION {
            return Err(Error::PopulationTooLarge {
                population,
                cap: MAX_POPULATION,
            });
        }
        if population < 2
            || weak_index < 1
            || weak_index >= strong_index
            || strong_index > population
        {
            return Err(Error::Invalid(format!(
                "need 1 <= m < n <= M >= 2, got M={population}, m={weak_index}, n={strong_index}"
            )));
        }
        Ok(Self {
            population,
            weak_index,
            strong_index,
        })
    }

    pub fn population(&self) -> u32 {
        self.population
    }

    pub fn weak_index(&self) -> u32 {
        self.weak_index
    }

    pub fn strong_index(&self) -> u32 {
        self.strong_index
    }

    /// Leading multinomial constant of the joint density,
    /// M! / ((m-1)! (n-1-m)! (M-n)!).
    pub fn c_mn(&self) -> f64 {
        let (mm, m, n) = (self.population, self.weak_index, self.strong_index);
        let denom = factorial(m - 1) * factorial(n - 1 - m) * factorial(mm - n);
        (factorial(mm) / denom) as f64
    }

    /// Signed coefficient of the (e^{-x} - e^{-y})^{n-1-m} expansion:
    /// C(n-1-m, p) (-1)^{n-1-m-p}, for 0 <= p <= n-1-m.
    pub fn c_p(&self, p: u32) -> f64 {
        let t = self.strong_index - 1 - self.weak_index;
        debug_assert!(p <= t);
        let mag = binomial(t, p) as f64;
        if (t - p).is_multiple_of(2) {
            mag
        } else {
            -mag
        }
    }

    /// Signed coefficient of the (1 - e^{-x})^{m-1} expansion:
    /// C(m-1, l) (-1)^l, for 0 <= l <= m-1.
    pub fn c_l(&self, l: u32) -> f64 {
        debug_assert!(l < self.weak_index);
        let mag = binomial(self.weak_index - 1, l) as f64;
        if l.is_multiple_of(2) {
            mag
        } else {
            -mag
        }
    }
}

/// One sampled (or otherwise obtained) pair of ordered channel gains.
///
/// Invariants: both gains are finite, nonnegative, and
/// `weak_gain <= strong_gain`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelGainPair {
    pub weak_gain: f64,
    pub strong_gain: f64,
}

impl ChannelGainPair {
    pub fn new(weak_gain: f64, strong_gain: f64) -> Result<Self> {
        let ok = weak_gain.is_finite()
            && strong_gain.is_finite()
            && weak_gain >= 0.0
            && weak_gain <= strong_gain;
        if !ok {
            return Err(Error::Invalid(format!(
                "need 0 <= weak <= strong, both finite, got ({weak_gain}, {strong_gain})"
            )));
        }
        Ok(Self {
            weak_gain,
            strong_gain,
        })
    }

    /// Construction from values that are ordered by construction, e.g. picked
    /// out of a sorted sample. Checked only in debug builds; the Monte Carlo
    /// loop calls this once per trial.
    pub(crate) fn from_sorted(weak_gain: f64, strong_gain: f64) -> Self {
        debug_assert!(0.0 <= weak_gain && weak_gain <= strong_gain);
        Self {
            weak_gain,
            strong_gain,
        }
    }
}

/// Joint density of the m-th and n-th order statistics at (x, y).
///
/// Zero off the support, i.e. for x > y or negative arguments. The
/// configuration carries its own validity, so no error path remains here.
pub fn ordered_joint_pdf(x: f64, y: f64, cfg: &OrderedPairConfig) -> f64 {
    if x > y || x < 0.0 {
        return 0.0;
    }
    let mm = cfg.population();
    let m = cfg.weak_index();
    let n = cfg.strong_index();
    let ex = (-x).exp();
    let ey = (-y).exp();
    cfg.c_mn()
        * ex
        * (-((mm - n + 1) as f64) * y).exp()
        * (1.0 - ex).powi((m - 1) as i32)
        * (ex - ey).powi((n - 1 - m) as i32)
}

/// Draws the full population of unit-mean exponentials by inverse CDF,
/// sorts it, and returns the m-th and n-th smallest.
///
/// `-ln(1 - U)` with U uniform on [0, 1) keeps the argument of the log
/// inside (0, 1], so no draw can produce an infinity.
pub fn sample_ordered_pair<R: Rng + ?Sized>(
    cfg: &OrderedPairConfig,
    rng: &mut R,
) -> ChannelGainPair {
    let mm = cfg.population() as usize;
    let mut gains = [0.0f64; MAX_POPULATION as usize];
    for g in gains.iter_mut().take(mm) {
        let u: f64 = rng.random();
        *g = -(1.0 - u).ln();
    }
    let gains = &mut gains[..mm];
    gains.sort_unstable_by(f64::total_cmp);
    ChannelGainPair::from_sorted(
        gains[(cfg.weak_index() - 1) as usize],
        gains[(cfg.strong_index() - 1) as usize],
    )
}

/// The probability integral Phi(x) = (2/sqrt(pi)) Int_0^x e^{-t^2} dt.
///
/// Odd, monotone increasing, Phi(+inf) = 1. Delegates to the platform-grade
/// error function implementation, which is correct to a couple of ulp.
pub fn prob_integral(x: f64) -> f64 {
    libm::erf(x)
}

/// Scaled complementary form e^{z^2} (1 - Phi(z)) for z >= 0.
///
/// Takes values in (0, 1], decreasing towards 1/(z sqrt(pi)). The direct
/// product below the switch point stays far from both overflow (e^{z^2} at
/// z = 25 is about 1e271) and underflow (erfc(25) is about 1e-274); above
/// it, the asymptotic continued expansion
/// 1/(z sqrt(pi)) * sum_k (-1)^k (2k-1)!! / (2 z^2)^k
/// is already accurate to machine precision at its first few terms.
pub fn erfcx(z: f64) -> f64 {
    debug_assert!(z >= 0.0);
    if z < 25.0 {
        (z * z).exp() * libm::erfc(z)
    } else {
        // (2k-1)!!/(2z^2)^k shrinks by (2k+1)/(2z^2) <= 1.7e-2 per term here,
        // so truncation is below f64 resolution long before k hits the bound.
        let inv2z2 = 1.0 / (2.0 * z * z);
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..=12u32 {
            term *= -((2 * k - 1) as f64) * inv2z2;
            sum += term;
            if term.abs() < f64::EPSILON * sum.abs() {
                break;
            }
        }
        sum / (z * core::f64::consts::PI.sqrt())
    }
}

/// Left-hand side of the combinatorial identity
/// (M! / ((m-1)! (M-m)!)) sum_{l=0}^{m-1} c_l / (M-m+l+1),
/// which equals 1 for every 1 <= m < M.
///
/// Evaluated with exact integer coefficients and compensated summation; the
/// population cap is enforced here because the cancellation in the
/// alternating sum doubles with every additional user.
pub fn binomial_identity_lhs(population: u32, weak_index: u32) -> Result<f64> {
    if population > MAX_POPULATION {
        return Err(Error::PopulationTooLarge {
            population,
            cap: MAX_POPULATION,
        });
    }
    if weak_index < 1 || weak_index >= population {
        return Err(Error::Invalid(format!(
            "need 1 <= m < M, got M={population}, m={weak_index}"
        )));
    }
    let (mm, m) = (population, weak_index);
    let prefactor = (factorial(mm) / (factorial(m - 1) * factorial(mm - m))) as f64;
    let mut acc = CompensatedSum::default();
    for l in 0..m {
        let c_l = {
            let mag = binomial(m - 1, l) as f64;
            if l % 2 == 0 {
                mag
            } else {
                -mag
            }
        };
        acc.add(c_l / (mm - m + l + 1) as f64);
    }
    Ok(prefactor * acc.value())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_rejects_bad_indices() {
        assert!(OrderedPairConfig::new(5, 2, 4).is_ok());
        assert!(OrderedPairConfig::new(1, 1, 1).is_err());
        assert!(OrderedPairConfig::new(5, 0, 3).is_err());
        assert!(OrderedPairConfig::new(5, 3, 3).is_err());
        assert!(OrderedPairConfig::new(5, 2, 6).is_err());
        assert!(matches!(
            OrderedPairConfig::new(21, 1, 2),
            Err(Error::PopulationTooLarge {
                population: 21,
                cap: 20
            })
        ));
    }

    #[test]
    fn combinatorial_constants_match_direct_counts() {
        let cfg = OrderedPairConfig::new(5, 2, 4).unwrap();
        // 5! / (1! 1! 1!) = 120
        assert_eq!(cfg.c_mn(), 120.0);
        // n-1-m = 1: c_0 = C(1,0)(-1)^1 = -1, c_1 = C(1,1) = 1
        assert_eq!(cfg.c_p(0), -1.0);
        assert_eq!(cfg.c_p(1), 1.0);
        // m-1 = 1: c_0 = 1, c_1 = -1
        assert_eq!(cfg.c_l(0), 1.0);
        assert_eq!(cfg.c_l(1), -1.0);
    }

    #[test]
    fn expansion_coefficients_sum_to_zero() {
        // (e^{-x} - e^{-y})^t expanded at x = y must vanish for t >= 1.
        for (m, n) in [(1u32, 3u32), (2, 4), (1, 5), (3, 5)] {
            let cfg = OrderedPairConfig::new(5, m, n).unwrap();
            let t = n - 1 - m;
            if t >= 1 {
                let s: f64 = (0..=t).map(|p| cfg.c_p(p)).sum();
                assert_eq!(s, 0.0, "c_p sum for (m,n)=({m},{n})");
            }
        }
    }

    #[test]
    fn gain_pair_validation() {
        assert!(ChannelGainPair::new(0.5, 2.0).is_ok());
        assert!(ChannelGainPair::new(2.0, 0.5).is_err());
        assert!(ChannelGainPair::new(-0.1, 0.5).is_err());
        assert!(ChannelGainPair::new(0.1, f64::INFINITY).is_err());
    }

    #[test]
    fn compensated_sum_beats_naive_on_cancellation() {
        // 1 + eps/2 + eps/2 - 1: naive left-to-right gives 0.
        let mut acc = CompensatedSum::default();
        for x in [1.0, f64::EPSILON / 2.0, f64::EPSILON / 2.0, -1.0] {
            acc.add(x);
        }
        assert_eq!(acc.value(), f64::EPSILON);
    }
}
