//! Limiting SNR forms and empirical scaling orders.

use std::fmt;
use std::str::FromStr;

use crate::allocation::optimal_split;
use crate::error::{domain, Error, Result};
use crate::model::units::rate;
use crate::model::{CascadeGains, Deployment, ElementSplit, HybridGains, PowerConfig, SchemeKind};
use crate::snr::{c1, snr_relaxed};

/// Log-log fits with an RMS residual above this are not treated as power laws.
pub const POWER_LAW_RESIDUAL: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalingVariable {
    /// Total number of elements.
    N,
    /// BS transmit power.
    PB,
    /// Amplification power.
    PI,
}

impl ScalingVariable {
    pub const ALL: [ScalingVariable; 3] = [ScalingVariable::N, ScalingVariable::PB, ScalingVariable::PI];

    pub fn as_str(self) -> &'static str {
        match self {
            ScalingVariable::N => "n",
            ScalingVariable::PB => "p_b",
            ScalingVariable::PI => "p_i",
        }
    }
}

impl fmt::Display for ScalingVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalingVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "n" | "n_total" => Ok(ScalingVariable::N),
            "p_b" | "pb" => Ok(ScalingVariable::PB),
            "p_i" | "pi" => Ok(ScalingVariable::PI),
            _ => Err(domain(format!("unknown scaling variable {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticQuery {
    pub scheme: SchemeKind,
    pub variable: ScalingVariable,
    /// Passive fraction `N_p / N` used when the variable is `N`.
    pub epsilon: f64,
}

impl AsymptoticQuery {
    pub fn new(scheme: SchemeKind, variable: ScalingVariable, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(domain(format!("passive fraction must lie in (0, 1), got {epsilon}")));
        }
        Ok(Self { scheme, variable, epsilon })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AsymptoticKind {
    Linear,
    Quadratic,
    Bounded,
}

impl fmt::Display for AsymptoticKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AsymptoticKind::Linear => "linear",
            AsymptoticKind::Quadratic => "quadratic",
            AsymptoticKind::Bounded => "bounded",
        })
    }
}

/// `SNR ~ value * v` (linear), `value * v^2` (quadratic), or `SNR -> value` (bounded).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticForm {
    pub kind: AsymptoticKind,
    pub value: f64,
}

impl AsymptoticForm {
    /// The limiting SNR at variable value `v`.
    pub fn at(&self, v: f64) -> f64 {
        match self.kind {
            AsymptoticKind::Linear => self.value * v,
            AsymptoticKind::Quadratic => self.value * v * v,
            AsymptoticKind::Bounded => self.value,
        }
    }

    /// Capacity scaling order in the sense of the comparison table.
    pub fn scaling_order(&self) -> &'static str {
        match self.kind {
            AsymptoticKind::Linear => "O(log v)",
            AsymptoticKind::Quadratic => "O(2 log v)",
            AsymptoticKind::Bounded => "constant",
        }
    }
}

/// Leading-order behaviour of the closed-form SNR as the queried variable grows.
///
/// Sweeps over `N` use the query's passive fraction; power sweeps need `split`.
/// Coefficients come from direct expansion of the closed forms.
pub fn asymptotic_snr(
    query: &AsymptoticQuery,
    cfg: &PowerConfig,
    dep: &Deployment,
    split: Option<ElementSplit>,
) -> Result<AsymptoticForm> {
    if query.scheme != dep.scheme() {
        return Err(domain(format!("query is for {} but gains are for {}", query.scheme, dep.scheme())));
    }
    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, .. } = *cfg;
    let eps = query.epsilon;
    let counts = || {
        split
            .map(|s| (s.n_p as f64, s.n_a as f64))
            .ok_or_else(|| domain(format!("{} sweep needs an element split", query.variable)))
    };
    use AsymptoticKind::*;
    use ScalingVariable::*;
    let form = |kind, value| AsymptoticForm { kind, value };
    Ok(match (dep, query.variable) {
        (Deployment::Bhu(g), N) => form(Quadratic, c1(cfg, g) * eps * eps),
        (Deployment::Bhu(g), PB) => {
            let (n_p, _) = counts()?;
            form(Linear, g.bi * g.iu * n_p * n_p / s0)
        }
        (Deployment::Bhu(g), PI) => {
            let (_, n_a) = counts()?;
            form(Bounded, p_b * g.bi * n_a / sr)
        }
        (Deployment::Bapu(g), N) => form(Linear, p_b * g.b * (1.0 - eps) / sr),
        (Deployment::Bapu(g), PB) => {
            let (n_p, n_a) = counts()?;
            form(Bounded, g.u * g.i * n_a * n_p * n_p * p_i / s0)
        }
        (Deployment::Bapu(g), PI) => {
            let (_, n_a) = counts()?;
            form(Bounded, g.b * n_a * p_b / sr)
        }
        (Deployment::Bpau(g), N) => form(Linear, g.u * (1.0 - eps) * p_i / s0),
        (Deployment::Bpau(g), PB) => {
            let (_, n_a) = counts()?;
            form(Bounded, g.u * n_a * p_i / s0)
        }
        (Deployment::Bpau(g), PI) => {
            let (n_p, n_a) = counts()?;
            form(Bounded, p_b * g.i * g.b * n_a * n_p * n_p / sr)
        }
    })
}

/// Log-spaced sweep of the scaling variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sweep {
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Sweep {
    pub fn new(from: f64, to: f64) -> Self {
        Self { from, to, points: 20 }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let ratio = self.to / self.from;
        (0..n).map(|k| self.from * ratio.powf(k as f64 / (n - 1) as f64)).collect()
    }

    pub fn decades(&self) -> f64 {
        (self.to / self.from).log10()
    }
}

/// How elements are split while the variable changes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScalingPolicy {
    /// `N_p = eps N`; only for sweeps over `N`.
    FixedFraction(f64),
    /// A fixed split; only for power sweeps.
    FixedSplit(ElementSplit),
    /// Relaxed optimal split at every point. `n_total` is used for power sweeps.
    OptimizedAllocation { n_total: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScalingEstimate {
    /// Least-squares slope of `log SNR` against `log v`.
    pub slope: f64,
    /// RMS residual of the fit, in decades.
    pub residual: f64,
    /// Slope fitted over the top decade of the sweep only.
    pub tail_slope: f64,
    pub power_law_ok: bool,
    /// `(v, snr)` for every sweep point.
    pub points: Vec<(f64, f64)>,
}

/// SNR at one point of a scaling sweep.
pub fn scaling_point(
    cfg: &PowerConfig,
    dep: &Deployment,
    variable: ScalingVariable,
    policy: ScalingPolicy,
    v: f64,
) -> Result<f64> {
    let cfg = match variable {
        ScalingVariable::N => *cfg,
        ScalingVariable::PB => PowerConfig { p_b: v, ..*cfg },
        ScalingVariable::PI => PowerConfig { p_i: v, ..*cfg },
    };
    let (n_p, n_a) = match (variable, policy) {
        (ScalingVariable::N, ScalingPolicy::FixedFraction(eps)) => {
            if !(eps > 0.0 && eps < 1.0) {
                return Err(domain(format!("passive fraction must lie in (0, 1), got {eps}")));
            }
            (eps * v, (1.0 - eps) * v)
        }
        (ScalingVariable::N, ScalingPolicy::OptimizedAllocation { .. }) => {
            let s = optimal_split(&cfg, dep, v);
            (s.n_p, s.n_a)
        }
        (ScalingVariable::N, ScalingPolicy::FixedSplit(_)) => {
            return Err(domain("a fixed split cannot follow an element-count sweep"));
        }
        (_, ScalingPolicy::FixedSplit(s)) => (s.n_p as f64, s.n_a as f64),
        (_, ScalingPolicy::OptimizedAllocation { n_total }) => {
            let s = optimal_split(&cfg, dep, n_total);
            (s.n_p, s.n_a)
        }
        (_, ScalingPolicy::FixedFraction(_)) => {
            return Err(domain("a passive fraction needs an element-count sweep"));
        }
    };
    Ok(snr_relaxed(&cfg, dep, n_p, n_a))
}

/// Fits the empirical SNR growth order over a sweep spanning at least two decades.
pub fn estimate_scaling_order(
    cfg: &PowerConfig,
    dep: &Deployment,
    variable: ScalingVariable,
    sweep: Sweep,
    policy: ScalingPolicy,
) -> Result<ScalingEstimate> {
    if !(sweep.from > 0.0 && sweep.to.is_finite()) || sweep.decades() < 2.0 - 1e-9 {
        return Err(domain(format!("sweep {}..{} must be positive and span two decades", sweep.from, sweep.to)));
    }
    if sweep.points < 3 {
        return Err(domain("a sweep needs at least three points"));
    }
    let points = sweep
        .values()
        .into_iter()
        .map(|v| scaling_point(cfg, dep, variable, policy, v).map(|s| (v, s)))
        .collect::<Result<Vec<_>>>()?;
    if points.iter().any(|&(_, s)| !(s > 0.0 && s.is_finite())) {
        return Err(domain("SNR vanished or overflowed along the sweep"));
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(v, s)| (v.log10(), s.log10())).collect();
    let (slope, intercept) = least_squares(&logs);
    let residual =
        (logs.iter().map(|&(x, y)| (y - slope * x - intercept).powi(2)).sum::<f64>() / logs.len() as f64).sqrt();
    let top = sweep.to.log10() - 1.0 - 1e-9;
    let tail: Vec<(f64, f64)> = logs.iter().copied().filter(|&(x, _)| x >= top).collect();
    let tail_slope = if tail.len() >= 2 { least_squares(&tail).0 } else { slope };
    Ok(ScalingEstimate { slope, residual, tail_slope, power_law_ok: residual <= POWER_LAW_RESIDUAL, points })
}

fn least_squares(xy: &[(f64, f64)]) -> (f64, f64) {
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = xy.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xy.iter().map(|&(x, _)| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargePiRatios {
    pub r0_over_r1: f64,
    pub r0_over_r2: f64,
    /// Scheme with the largest limiting rate; ties go to the earlier scheme.
    pub best: SchemeKind,
}

/// Limiting rate ratios of the hybrid scheme to the two-surface schemes as `P_I` grows.
pub fn large_pi_rate_ratio(
    cfg: &PowerConfig,
    hybrid: &HybridGains,
    cascade: &CascadeGains,
    split: ElementSplit,
) -> LargePiRatios {
    let PowerConfig { p_b, sigma_r_sq: sr, .. } = *cfg;
    let (n_p, n_a) = (split.n_p as f64, split.n_a as f64);
    let r0 = rate(p_b * hybrid.bi * n_a / sr);
    let r1 = rate(p_b * cascade.b * n_a / sr);
    let r2 = rate(p_b * cascade.b * cascade.i * n_a * n_p * n_p / sr);
    let rates = [r0, r1, r2];
    let best = (0..3).fold(0, |b, k| if rates[k] > rates[b] { k } else { b });
    LargePiRatios { r0_over_r1: r0 / r1, r0_over_r2: r0 / r2, best: SchemeKind::ALL[best] }
}
