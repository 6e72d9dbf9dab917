//! Sweep and validation plumbing behind the `noma-mec` binary.
//!
//! A sweep walks one parameter axis, evaluates the closed forms of the core
//! crate at every grid point, optionally attaches a Monte Carlo estimate,
//! and renders one CSV row per point. All validation happens while the grid
//! is being planned, before any numerical work starts, so a bad flag can
//! never waste a long simulation. Rows are computed in parallel and written
//! in grid order; for a fixed seed the output is byte-identical across runs
//! and across worker-thread counts.

use clap::ValueEnum;
use rayon::prelude::*;
use std::fmt;
use std::str::FromStr;

use noma_mec::downlink::{p_d_latency_mc, p_d_tilde_quadrature};
use noma_mec::mc_oracle::{
    downlink_energy_event, estimate_event, uplink_energy_event, uplink_latency_event,
};
use noma_mec::uplink_energy::p_tilde_exact;
use noma_mec::uplink_latency::{p_n_exact, p_n_highsnr, SnrOperatingPoint};
use noma_mec::{
    DownlinkScaling, DownlinkTaskSpec, EnergyScaling, MonteCarloSpec, OrderedPairConfig,
    ProbabilityEstimate, QuadratureSpec,
};

pub mod criteria;

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Config(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<noma_mec::Error> for CliError {
    fn from(err: noma_mec::Error) -> Self {
        CliError::Config(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Exact uplink completion-time advantage, with Monte Carlo if requested.
    UplinkLatency,
    /// Same curve plus its high-SNR approximation in the asymptotic column.
    UplinkLatencyAsymptotic,
    /// Uplink energy-comparison probability under the beta power split.
    UplinkEnergy,
    /// Downlink energy-comparison probability by quadrature.
    DownlinkEnergy,
    /// Downlink per-server completion probabilities, Monte Carlo only.
    DownlinkLatency,
}

/// Which server's completion probability a downlink-latency sweep reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    M,
    N,
}

impl Target {
    fn label(self) -> &'static str {
        match self {
            Target::M => "m",
            Target::N => "n",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    RhoMDb,
    RhoNDb,
    RhoDb,
    Eta,
    Beta,
    BetaTilde,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::RhoMDb => "rho-m-db",
            SweepParam::RhoNDb => "rho-n-db",
            SweepParam::RhoDb => "rho-db",
            SweepParam::Eta => "eta",
            SweepParam::Beta => "beta",
            SweepParam::BetaTilde => "beta-tilde",
        }
    }

    fn parse(name: &str) -> Result<Self> {
        let all = [
            SweepParam::RhoMDb,
            SweepParam::RhoNDb,
            SweepParam::RhoDb,
            SweepParam::Eta,
            SweepParam::Beta,
            SweepParam::BetaTilde,
        ];
        all.into_iter().find(|p| p.name() == name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown sweep parameter {name:?}; expected one of rho-m-db, rho-n-db, rho-db, eta, beta, beta-tilde"
            ))
        })
    }
}

/// One swept axis, `param:start:stop:step`. SNR axes are in dB, the rest in
/// natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FromStr for SweepAxis {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(CliError::Config(format!(
                "sweep axis {s:?} must look like param:start:stop:step"
            )));
        }
        let param = SweepParam::parse(parts[0])?;
        let nums: Vec<f64> = parts[1..]
            .iter()
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    CliError::Config(format!("sweep axis {s:?}: {t:?} is not a number"))
                })
            })
            .collect::<Result<_>>()?;
        let (start, stop, step) = (nums[0], nums[1], nums[2]);
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            return Err(CliError::Config(format!(
                "sweep axis {s:?} has a non-finite bound"
            )));
        }
        if step <= 0.0 {
            return Err(CliError::Config(format!(
                "sweep axis {s:?}: step must be positive"
            )));
        }
        if stop < start {
            return Err(CliError::Config(format!(
                "sweep axis {s:?}: stop is below start"
            )));
        }
        Ok(SweepAxis {
            param,
            start,
            stop,
            step,
        })
    }
}

impl SweepAxis {
    /// Grid points start, start+step, ... up to stop, tolerating float
    /// drift at the far end.
    pub fn values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut i = 0u32;
        loop {
            let v = self.start + f64::from(i) * self.step;
            if v > self.stop + self.step * 1e-9 {
                break;
            }
            out.push(v);
            i += 1;
        }
        out
    }
}

/// Everything the sweep holds constant. Fields are optional; each mode
/// checks for the ones it needs during planning.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedParams {
    pub population: u32,
    pub weak: u32,
    pub strong: u32,
    pub rho_m_db: Option<f64>,
    pub rho_n_db: Option<f64>,
    pub eta: Option<f64>,
    pub beta: Option<f64>,
    pub beta_tilde: Option<f64>,
    pub rho_db: Option<f64>,
    pub alpha_n_sq: Option<f64>,
    pub bits: Option<f64>,
    pub slot: Option<f64>,
    pub bits_m: Option<f64>,
    pub bits_n: Option<f64>,
    pub target: Option<Target>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McParams {
    pub trials: u64,
    pub seed: u64,
    pub chunk: Option<u64>,
}

impl McParams {
    /// Every row gets its own stream; the offset keeps rows independent
    /// while the whole sweep stays a pure function of the base seed.
    fn spec_for_row(&self, row: usize) -> Result<MonteCarloSpec> {
        let chunk = self.chunk.unwrap_or_else(|| self.trials.min(1 << 16));
        MonteCarloSpec::new(self.trials, self.seed.wrapping_add(row as u64), chunk)
            .map_err(Into::into)
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub mode: Mode,
    pub axis: SweepAxis,
    pub fixed: FixedParams,
    pub mc: Option<McParams>,
    pub quad_points: Option<u32>,
}

/// dB coordinates of one uplink operating point, kept alongside the linear
/// form so CSV rows echo the user's units without round-trip noise.
#[derive(Debug, Clone, Copy)]
struct UplinkPoint {
    snr: SnrOperatingPoint,
    rho_m_db: f64,
    rho_n_db: f64,
    eta: f64,
}

fn uplink_point(rho_m_db: f64, rho_n_db: Option<f64>, eta: Option<f64>) -> Result<UplinkPoint> {
    match (rho_n_db, eta) {
        (Some(_), Some(_)) => Err(CliError::Config(
            "give either --rho-n-db or --eta, not both".into(),
        )),
        (Some(nd), None) => {
            let snr = SnrOperatingPoint::new(db_to_linear(rho_m_db), db_to_linear(nd))?;
            Ok(UplinkPoint {
                snr,
                rho_m_db,
                rho_n_db: nd,
                eta: snr.eta(),
            })
        }
        (None, Some(eta)) => {
            let snr = SnrOperatingPoint::from_eta(db_to_linear(rho_m_db), eta)?;
            Ok(UplinkPoint {
                snr,
                rho_m_db,
                rho_n_db: rho_m_db + 10.0 * eta.log10(),
                eta,
            })
        }
        (None, None) => Err(CliError::Config(
            "the uplink operating point needs --rho-n-db or --eta".into(),
        )),
    }
}

fn resolve_uplink_axis(fixed: &FixedParams, param: SweepParam, v: f64) -> Result<UplinkPoint> {
    match param {
        SweepParam::RhoMDb => uplink_point(v, fixed.rho_n_db, fixed.eta),
        SweepParam::RhoNDb => {
            if fixed.eta.is_some() {
                return Err(CliError::Config(
                    "sweeping rho-n-db leaves no room for --eta".into(),
                ));
            }
            let md = fixed
                .rho_m_db
                .ok_or_else(|| CliError::Config("sweeping rho-n-db needs --rho-m-db".into()))?;
            uplink_point(md, Some(v), None)
        }
        SweepParam::Eta => {
            if fixed.rho_n_db.is_some() {
                return Err(CliError::Config(
                    "sweeping eta leaves no room for --rho-n-db".into(),
                ));
            }
            let md = fixed
                .rho_m_db
                .ok_or_else(|| CliError::Config("sweeping eta needs --rho-m-db".into()))?;
            uplink_point(md, None, Some(v))
        }
        other => Err(CliError::Config(format!(
            "axis {} does not apply to an uplink mode",
            other.name()
        ))),
    }
}

fn require(opt: Option<f64>, flag: &str) -> Result<f64> {
    opt.ok_or_else(|| CliError::Config(format!("this mode needs {flag}")))
}

/// Fully validated work order for one grid point.
enum RowPlan {
    Uplink {
        point: UplinkPoint,
        with_asymptotic: bool,
    },
    UplinkEnergy {
        point: UplinkPoint,
        scale: EnergyScaling,
        beta: f64,
    },
    DownlinkEnergy {
        rho_db: f64,
        beta_tilde: f64,
    },
    DownlinkLatency {
        rho_db: f64,
        scaling: DownlinkScaling,
    },
}

struct RowOutput {
    params: Vec<String>,
    analytic: Option<f64>,
    asymptotic: Option<f64>,
    mc: Option<ProbabilityEstimate>,
}

fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn render_row(row: &RowOutput) -> String {
    let mut cells = row.params.clone();
    cells.push(row.analytic.map(fmt_num).unwrap_or_default());
    cells.push(row.asymptotic.map(fmt_num).unwrap_or_default());
    match &row.mc {
        Some(est) => {
            cells.push(fmt_num(est.value));
            cells.push(fmt_num(est.stderr));
            cells.push(est.trials.to_string());
        }
        None => cells.extend([String::new(), String::new(), String::new()]),
    }
    cells.join(",")
}

/// Run one sweep to a CSV string (header plus one row per grid point).
pub fn run_sweep(cfg: &SweepConfig) -> Result<String> {
    let fixed = &cfg.fixed;
    let pair = OrderedPairConfig::new(fixed.population, fixed.weak, fixed.strong)?;
    let values = cfg.axis.values();
    let quad = QuadratureSpec::new(cfg.quad_points.unwrap_or(64))?;

    // Planning pass: build and validate every row before computing any.
    let mut param_header: Vec<&str> = vec!["param_population", "param_m", "param_n"];
    let mut plans: Vec<RowPlan> = Vec::with_capacity(values.len());
    let mut task = DownlinkTaskSpec::new(1.0, 1.0).expect("unit task is valid");
    let mut latency = LatencyTargets {
        bits_m: 0.0,
        bits_n: 0.0,
        slot: 1.0,
        target: Target::M,
    };

    match cfg.mode {
        Mode::UplinkLatency | Mode::UplinkLatencyAsymptotic => {
            param_header.extend(["param_rho_m_db", "param_rho_n_db", "param_eta"]);
            let with_asymptotic = cfg.mode == Mode::UplinkLatencyAsymptotic;
            for &v in &values {
                let point = resolve_uplink_axis(fixed, cfg.axis.param, v)?;
                plans.push(RowPlan::Uplink {
                    point,
                    with_asymptotic,
                });
            }
        }
        Mode::UplinkEnergy => {
            param_header.extend([
                "param_rho_m_db",
                "param_rho_n_db",
                "param_eta",
                "param_beta",
            ]);
            for &v in &values {
                let (point, beta) = if cfg.axis.param == SweepParam::Beta {
                    let md = require(fixed.rho_m_db, "--rho-m-db")?;
                    (uplink_point(md, fixed.rho_n_db, fixed.eta)?, v)
                } else {
                    let beta = require(fixed.beta, "--beta")?;
                    (resolve_uplink_axis(fixed, cfg.axis.param, v)?, beta)
                };
                plans.push(RowPlan::UplinkEnergy {
                    point,
                    scale: EnergyScaling::new(beta)?,
                    beta,
                });
            }
        }
        Mode::DownlinkEnergy => {
            param_header.extend([
                "param_rho_db",
                "param_beta_tilde",
                "param_bits",
                "param_slot",
            ]);
            let bits = fixed.bits.unwrap_or(1.0);
            let slot = fixed.slot.unwrap_or(1.0);
            task = DownlinkTaskSpec::new(bits, slot)?;
            for &v in &values {
                let (rho_db, beta_tilde) = match cfg.axis.param {
                    SweepParam::RhoDb => (v, require(fixed.beta_tilde, "--beta-tilde")?),
                    SweepParam::BetaTilde => (require(fixed.rho_db, "--rho-db")?, v),
                    other => {
                        return Err(CliError::Config(format!(
                            "axis {} does not apply to downlink-energy",
                            other.name()
                        )))
                    }
                };
                if !(beta_tilde.is_finite() && beta_tilde > 0.0 && beta_tilde < 1.0) {
                    return Err(CliError::Config(format!(
                        "beta-tilde must lie strictly inside (0, 1), got {beta_tilde}"
                    )));
                }
                plans.push(RowPlan::DownlinkEnergy { rho_db, beta_tilde });
            }
        }
        Mode::DownlinkLatency => {
            param_header.extend([
                "param_rho_db",
                "param_alpha_n_sq",
                "param_beta_tilde",
                "param_bits_m",
                "param_bits_n",
                "param_slot",
                "param_target",
            ]);
            if cfg.mc.is_none() {
                return Err(CliError::Config(
                    "downlink-latency has no closed form; give --mc-trials".into(),
                ));
            }
            if cfg.axis.param != SweepParam::RhoDb {
                return Err(CliError::Config(format!(
                    "axis {} does not apply to downlink-latency (sweep rho-db)",
                    cfg.axis.param.name()
                )));
            }
            let alpha_n_sq = require(fixed.alpha_n_sq, "--alpha-n-sq")?;
            let beta_tilde = require(fixed.beta_tilde, "--beta-tilde")?;
            let bits_m = require(fixed.bits_m, "--bits-m")?;
            let bits_n = require(fixed.bits_n, "--bits-n")?;
            let slot = fixed.slot.unwrap_or(1.0);
            if !(slot.is_finite() && slot > 0.0) {
                return Err(CliError::Config(format!(
                    "slot must be positive, got {slot}"
                )));
            }
            let target = fixed
                .target
                .ok_or_else(|| CliError::Config("downlink-latency needs --target m|n".into()))?;
            latency = LatencyTargets {
                bits_m,
                bits_n,
                slot,
                target,
            };
            let scaling = DownlinkScaling::new(beta_tilde, alpha_n_sq)?;
            for &v in &values {
                plans.push(RowPlan::DownlinkLatency { rho_db: v, scaling });
            }
        }
    }

    // Compute pass, rows in parallel but emitted in grid order.
    let shared = SweepEnv {
        pair,
        task,
        quad,
        latency,
    };
    let rows: Result<Vec<RowOutput>> = plans
        .par_iter()
        .enumerate()
        .map(|(i, plan)| compute_row(plan, i, cfg, &shared))
        .collect();
    let rows = rows?;

    let mut out = String::new();
    out.push_str(&param_header.join(","));
    out.push_str(",analytic,asymptotic,mc_value,mc_stderr,mc_trials\n");
    for row in &rows {
        out.push_str(&render_row(row));
        out.push('\n');
    }
    Ok(out)
}

#[derive(Clone, Copy)]
struct LatencyTargets {
    bits_m: f64,
    bits_n: f64,
    slot: f64,
    target: Target,
}

struct SweepEnv {
    pair: OrderedPairConfig,
    task: DownlinkTaskSpec,
    quad: QuadratureSpec,
    latency: LatencyTargets,
}

fn compute_row(
    plan: &RowPlan,
    index: usize,
    cfg: &SweepConfig,
    shared: &SweepEnv,
) -> Result<RowOutput> {
    let SweepEnv {
        pair,
        task,
        quad,
        latency,
    } = shared;
    let mc_spec = match &cfg.mc {
        Some(mc) => Some(mc.spec_for_row(index)?),
        None => None,
    };
    let base = vec![
        pair.population().to_string(),
        pair.weak_index().to_string(),
        pair.strong_index().to_string(),
    ];
    match plan {
        RowPlan::Uplink {
            point,
            with_asymptotic,
        } => {
            let mut params = base;
            params.extend([
                fmt_num(point.rho_m_db),
                fmt_num(point.rho_n_db),
                fmt_num(point.eta),
            ]);
            let analytic = p_n_exact(pair, &point.snr)?;
            let asymptotic = if *with_asymptotic {
                Some(p_n_highsnr(pair, point.snr.rho_m(), point.snr.eta())?)
            } else {
                None
            };
            let mc = match mc_spec {
                Some(spec) => Some(estimate_event(
                    pair,
                    &spec,
                    uplink_latency_event(&point.snr),
                )?),
                None => None,
            };
            Ok(RowOutput {
                params,
                analytic: Some(analytic),
                asymptotic,
                mc,
            })
        }
        RowPlan::UplinkEnergy { point, scale, beta } => {
            let mut params = base;
            params.extend([
                fmt_num(point.rho_m_db),
                fmt_num(point.rho_n_db),
                fmt_num(point.eta),
                fmt_num(*beta),
            ]);
            let analytic = p_tilde_exact(pair, &point.snr, scale)?;
            let mc = match mc_spec {
                Some(spec) => Some(estimate_event(
                    pair,
                    &spec,
                    uplink_energy_event(&point.snr, scale),
                )?),
                None => None,
            };
            Ok(RowOutput {
                params,
                analytic: Some(analytic),
                asymptotic: None,
                mc,
            })
        }
        RowPlan::DownlinkEnergy { rho_db, beta_tilde } => {
            let rho = db_to_linear(*rho_db);
            let mut params = base;
            params.extend([
                fmt_num(*rho_db),
                fmt_num(*beta_tilde),
                fmt_num(task.bits()),
                fmt_num(task.slot()),
            ]);
            let analytic = p_d_tilde_quadrature(pair, rho, *beta_tilde, task, quad)?;
            let mc = match mc_spec {
                Some(spec) => {
                    let event = downlink_energy_event(rho, *beta_tilde, task)?;
                    Some(estimate_event(pair, &spec, event)?)
                }
                None => None,
            };
            Ok(RowOutput {
                params,
                analytic: Some(analytic),
                asymptotic: None,
                mc,
            })
        }
        RowPlan::DownlinkLatency { rho_db, scaling } => {
            let rho = db_to_linear(*rho_db);
            let mut params = base;
            params.extend([
                fmt_num(*rho_db),
                fmt_num(scaling.alpha_n_sq()),
                fmt_num(scaling.beta_tilde()),
                fmt_num(latency.bits_m),
                fmt_num(latency.bits_n),
                fmt_num(latency.slot),
                latency.target.label().to_string(),
            ]);
            let spec = mc_spec.expect("checked during planning");
            let (weak, strong) = p_d_latency_mc(
                pair,
                rho,
                scaling,
                latency.bits_m,
                latency.bits_n,
                latency.slot,
                &spec,
            )?;
            let est = match latency.target {
                Target::M => weak,
                Target::N => strong,
            };
            Ok(RowOutput {
                params,
                analytic: None,
                asymptotic: None,
                mc: Some(est),
            })
        }
    }
}

/// The combinatorial identity behind the closed forms, checked across a
/// population range. Returns the report text and whether every pair passed.
pub fn identity_report(max_population: u32, tol: f64) -> Result<(String, bool)> {
    let mut out = String::new();
    let mut all_ok = true;
    let mut worst = 0.0f64;
    for population in 2..=max_population {
        for weak in 1..population {
            let lhs = noma_mec::chanstat::binomial_identity_lhs(population, weak)?;
            let dev = (lhs - 1.0).abs();
            worst = worst.max(dev);
            if dev > tol {
                all_ok = false;
                out.push_str(&format!(
                    "M={population} m={weak}: deviation {dev:.3e} exceeds {tol:.1e}\n"
                ));
            }
        }
    }
    out.push_str(&format!(
        "identity over 1 <= m < M <= {max_population}: worst deviation {worst:.3e} ({})\n",
        if all_ok { "PASS" } else { "FAIL" }
    ));
    Ok((out, all_ok))
}
