//! Closed-form SNRs, amplification factors and fixed-configuration comparisons.

use crate::error::{domain, Error, Result};
use crate::model::units::rate;
use crate::model::{CascadeGains, Deployment, ElementSplit, HybridGains, PowerConfig, SchemeKind};

/// Scheme constants; entries that do not apply to a deployment are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct DerivedConstants {
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c6: Option<f64>,
    pub c7: Option<f64>,
    pub c8: Option<f64>,
    pub c9: f64,
    pub c10: f64,
}

impl DerivedConstants {
    pub fn new(cfg: &PowerConfig, dep: &Deployment) -> Self {
        let mut c = DerivedConstants { c9: cfg.c9(), c10: cfg.c10(), ..Default::default() };
        match dep {
            Deployment::Bhu(g) => {
                c.c1 = Some(c1(cfg, g));
                c.c2 = Some(c2(cfg, g));
            }
            Deployment::Bapu(g) | Deployment::Bpau(g) => {
                let (c3, c4) = bapu_cubic(cfg, g);
                let (c7, c8) = bpau_cubic(cfg, g);
                c.c3 = Some(c3);
                c.c4 = Some(c4);
                c.c6 = Some(c6(cfg, g));
                c.c7 = Some(c7);
                c.c8 = Some(c8);
            }
        }
        c
    }
}

/// Leading factor of the optimally allocated hybrid SNR.
pub fn c1(cfg: &PowerConfig, g: &HybridGains) -> f64 {
    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, .. } = *cfg;
    p_b * g.bi * g.iu * (p_b * g.bi + sr) / (sr * p_i * g.iu + s0 * p_b * g.bi + s0 * sr)
}

/// `sqrt(P_I / (P_B beta_BI^2 + sigma_r^2))`.
pub fn c2(cfg: &PowerConfig, g: &HybridGains) -> f64 {
    (cfg.p_i / (cfg.p_b * g.bi + cfg.sigma_r_sq)).sqrt()
}

/// `beta_B^2 beta_I^2 beta_U^2 P_I P_B`.
pub fn c6(cfg: &PowerConfig, g: &CascadeGains) -> f64 {
    g.b * g.i * g.u * cfg.p_i * cfg.p_b
}

/// Cubic and linear coefficients `(c3, c4)` of the active-first allocation equation.
pub fn bapu_cubic(cfg: &PowerConfig, g: &CascadeGains) -> (f64, f64) {
    let c3 = cfg.sigma_r_sq * g.u * g.i * cfg.p_i;
    let c4 = cfg.sigma0_sq * cfg.p_b * g.b + cfg.sigma0_sq * cfg.sigma_r_sq;
    (c3, c4)
}

/// Cubic and linear coefficients `(c7, c8)` of the passive-first allocation equation.
pub fn bpau_cubic(cfg: &PowerConfig, g: &CascadeGains) -> (f64, f64) {
    let c7 = cfg.sigma0_sq * cfg.p_b * g.i * g.b;
    let c8 = cfg.sigma_r_sq * g.u * cfg.p_i + cfg.sigma0_sq * cfg.sigma_r_sq;
    (c7, c8)
}

/// Common amplitude of the active elements that spends the whole budget `P_I`.
///
/// Accepts real-valued element counts.
pub fn amp_factor_relaxed(cfg: &PowerConfig, dep: &Deployment, n_p: f64, n_a: f64) -> f64 {
    let incident = match dep {
        Deployment::Bhu(g) => cfg.p_b * g.bi,
        Deployment::Bapu(g) => cfg.p_b * g.b,
        Deployment::Bpau(g) => cfg.p_b * g.i * g.b * n_p * n_p,
    };
    (cfg.p_i / (n_a * (incident + cfg.sigma_r_sq))).sqrt()
}

pub fn amp_factor(cfg: &PowerConfig, dep: &Deployment, split: ElementSplit) -> Result<f64> {
    if split.n_a == 0 {
        return Err(domain("amplification factor needs at least one active element"));
    }
    Ok(amp_factor_relaxed(cfg, dep, split.n_p as f64, split.n_a as f64))
}

/// Closed-form SNR at real-valued element counts.
pub fn snr_relaxed(cfg: &PowerConfig, dep: &Deployment, n_p: f64, n_a: f64) -> f64 {
    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, .. } = *cfg;
    match dep {
        Deployment::Bhu(g) => {
            let amp = (n_a * p_i).sqrt() + n_p * (p_b * g.bi + sr).sqrt();
            p_b * g.bi * g.iu * amp * amp / (sr * p_i * g.iu + s0 * p_b * g.bi + s0 * sr)
        }
        Deployment::Bapu(g) => {
            let num = g.b * g.i * g.u * p_i * p_b * n_a * n_p * n_p;
            num / (sr * g.u * g.i * p_i * n_p * n_p + s0 * p_b * g.b + s0 * sr)
        }
        Deployment::Bpau(g) => {
            let num = g.b * g.i * g.u * p_i * p_b * n_a * n_p * n_p;
            num / (s0 * p_b * g.i * g.b * n_p * n_p + sr * g.u * p_i + s0 * sr)
        }
    }
}

/// Amplification budget maximizing the hybrid SNR for a fixed split.
///
/// With `x = sqrt(P_I)` the hybrid SNR is `(sqrt(N_a) x + B)^2 / (C x^2 + D)`,
/// whose only stationary point is `x = sqrt(N_a) D / (B C)`.
pub fn bhu_peak_amplification_power(cfg: &PowerConfig, g: &HybridGains, n_p: f64, n_a: f64) -> f64 {
    let b = n_p * (cfg.p_b * g.bi + cfg.sigma_r_sq).sqrt();
    let c = cfg.sigma_r_sq * g.iu;
    let d = cfg.sigma0_sq * (cfg.p_b * g.bi + cfg.sigma_r_sq);
    n_a * d * d / (b * b * c * c)
}

/// Result of a closed-form evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub scheme: SchemeKind,
    pub snr: f64,
    pub rate: f64,
    pub alpha: f64,
    pub constants: DerivedConstants,
}

/// Closed-form SNR and rate of a deployment under optimal phase alignment.
pub fn snr_closed_form(cfg: &PowerConfig, dep: &Deployment, split: ElementSplit) -> Result<EvalResult> {
    ElementSplit::new(split.n_p, split.n_a)?;
    let alpha = amp_factor(cfg, dep, split)?;
    if let Some(alpha_max) = cfg.alpha_max {
        if alpha > alpha_max {
            return Err(Error::AmplitudeCap { alpha, alpha_max });
        }
    }
    let snr = snr_relaxed(cfg, dep, split.n_p as f64, split.n_a as f64);
    Ok(EvalResult { scheme: dep.scheme(), snr, rate: rate(snr), alpha, constants: DerivedConstants::new(cfg, dep) })
}

/// Outcome of the favorable amplification-power check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FavorablePower {
    pub holds: bool,
    /// `P_I` divided by the smallest of the three bounds.
    pub margin: f64,
}

/// Whether `P_I` is small enough that every scheme keeps amplitudes in the favorable range.
pub fn check_favorable_power(
    cfg: &PowerConfig,
    hybrid: &HybridGains,
    cascade: &CascadeGains,
    n_total: u64,
) -> FavorablePower {
    let n1 = n_total.saturating_sub(1) as f64;
    let sr = cfg.sigma_r_sq;
    let bound = [
        n1 * (cfg.p_b * hybrid.bi + sr),
        n1 * (cfg.p_b * cascade.b + sr),
        n1 * (cfg.p_b * cascade.i * cascade.b + sr),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let margin = cfg.p_i / bound;
    FavorablePower { holds: cfg.p_i <= bound, margin }
}

/// Ratio of two schemes' closed-form SNRs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairComparison {
    /// `gamma_a / gamma_b`.
    pub ratio: f64,
    /// `None` on an exact tie.
    pub winner: Option<SchemeKind>,
    /// Sign predicate for an active-first versus passive-first pair on shared gains.
    pub predicate: Option<f64>,
    /// Whether the predicate sign agrees with the ratio.
    pub consistent: bool,
}

/// `(P_I beta_U^2 sigma_r^2 - P_B beta_B^2 sigma0^2)(1 - N_p^2 beta_I^2)`; positive iff active-first wins.
pub fn bapu_over_bpau_predicate(cfg: &PowerConfig, g: &CascadeGains, n_p: f64) -> f64 {
    (cfg.p_i * g.u * cfg.sigma_r_sq - cfg.p_b * g.b * cfg.sigma0_sq) * (1.0 - n_p * n_p * g.i)
}

pub fn compare_pair(cfg: &PowerConfig, a: &Deployment, b: &Deployment, split: ElementSplit) -> Result<PairComparison> {
    let ga = snr_closed_form(cfg, a, split)?.snr;
    let gb = snr_closed_form(cfg, b, split)?.snr;
    let ratio = ga / gb;
    let winner = if ga > gb {
        Some(a.scheme())
    } else if gb > ga {
        Some(b.scheme())
    } else {
        None
    };
    let (predicate, consistent) = match (a, b) {
        (Deployment::Bapu(x), Deployment::Bpau(y)) if x == y => {
            let p = bapu_over_bpau_predicate(cfg, x, split.n_p as f64);
            // Both quantities are differences of nearly equal terms near a tie.
            let tie = (ratio - 1.0).abs() <= 1e-12;
            (Some(p), tie || (p > 0.0) == (ratio > 1.0))
        }
        _ => (None, true),
    };
    debug_assert!(consistent, "predicate sign disagrees with SNR ratio {ratio}");
    Ok(PairComparison { ratio, winner, predicate, consistent })
}
