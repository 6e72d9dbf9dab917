//! Latency and energy analysis of NOMA-assisted mobile edge computing
//! offloading over ordered Rayleigh fading channels.
//!
//! A population of users (uplink) or edge servers (downlink) is sorted by
//! instantaneous channel gain and one weak/strong pair is scheduled
//! non-orthogonally on top of the orthogonal baseline. The crate evaluates,
//! in closed form and by Monte Carlo simulation against the very same event
//! definitions, the probabilities that govern whether the NOMA shortcut
//! actually pays off:
//!
//! * [`uplink_latency`]: P_n, the chance the strong user completes its
//!   offload inside the weak user's slot, exactly and in the high-SNR
//!   expansion whose decay is rho^{-m/2}.
//! * [`uplink_energy`]: P~_n, the chance plain OMA out-delivers the
//!   energy-reduced NOMA uplink, with its vanish-or-plateau asymptotics.
//! * [`downlink`]: cognitive-radio power allocation, superposition rate
//!   bookkeeping, the Chebyshev-Gauss closed form for the downlink energy
//!   comparison P~^D_n (decaying like rho^{-m}), and decay-exponent fits.
//! * [`chanstat`]: the ordered-pair channel statistics and numerically
//!   hardened special functions everything above is assembled from.
//! * [`mc_oracle`]: reproducible, seedable Monte Carlo estimators used to
//!   validate every closed form from the raw event definitions.
//!
//! All analytic routines are pure; all simulation routines are
//! deterministic functions of (seed, trials, chunk). Alternating
//! combinatorial sums cap the population at 20, where f64 cancellation is
//! still harmless.

pub mod chanstat;
pub mod downlink;
mod error;
pub mod mc_oracle;
pub mod uplink_energy;
pub mod uplink_latency;

pub use chanstat::{ChannelGainPair, OrderedPairConfig, MAX_POPULATION};
pub use downlink::{DownlinkScaling, DownlinkTaskSpec, QuadratureSpec};
pub use error::{Error, Result};
pub use mc_oracle::{MonteCarloSpec, ProbabilityEstimate};
pub use uplink_energy::{AsymptoticRegime, EnergyScaling, SnrGrowth};
pub use uplink_latency::SnrOperatingPoint;
