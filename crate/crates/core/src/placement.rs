//! Surface placement along the BS-user line.
//!
//! The closed forms assume high SNR and, for the two-surface schemes, that the
//! passive surface sits directly above the user (active-first) or the BS
//! (passive-first). Grid searches on the exact SNR check them.

use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::model::units::rate;
use crate::model::{
    DoubleIrsGeometry, Deployment, ElementSplit, Geometry, PowerConfig, SchemeKind, SingleIrsGeometry,
};
use crate::snr::{snr_closed_form, snr_relaxed};

/// Default grid resolution (m).
pub const DEFAULT_RESOLUTION: f64 = 0.05;

/// Default dominance threshold for the high-SNR assumptions.
pub const DEFAULT_DOMINANCE: f64 = 100.0;

/// Surface heights (m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Heights {
    /// Hybrid surface.
    pub h_s: f64,
    /// Both surfaces of the two-surface schemes.
    pub h_d: f64,
}

/// A placement and the SNRs it yields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacementSolution {
    pub scheme: SchemeKind,
    /// `x_BI` for the hybrid scheme, `x_B` for active-first, `x_U` for passive-first.
    pub x_star: f64,
    /// Approximated high-SNR objective, where defined.
    pub snr_approx: Option<f64>,
    /// Exact closed-form SNR at the resulting geometry.
    pub snr_true: f64,
    pub geometry: Geometry,
}

impl PlacementSolution {
    pub fn rate(&self) -> f64 {
        rate(self.snr_true)
    }

    /// Horizontal distance from the BS to the hybrid or active surface.
    pub fn bs_to_active(&self) -> f64 {
        match self.geometry {
            Geometry::Single(g) => g.x_bi,
            Geometry::Double(g) => match self.scheme {
                SchemeKind::Bpau => g.l - g.x_u,
                _ => g.x_b,
            },
        }
    }
}

/// Search domain for the two-surface grid search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlacementDomain {
    /// Passive surface fixed above the user (active-first) or the BS (passive-first).
    Restricted,
    /// Both coordinates free on the simplex `x_B + x_U < L`.
    Simplex,
}

/// Builds the geometry of `scheme` with its free coordinate at `x`.
pub fn placed_geometry(scheme: SchemeKind, l: f64, heights: Heights, x: f64) -> Result<Geometry> {
    Ok(match scheme {
        SchemeKind::Bhu => Geometry::Single(SingleIrsGeometry::new(l, x, heights.h_s)?),
        SchemeKind::Bapu => Geometry::Double(DoubleIrsGeometry::new(l, x, 0.0, heights.h_d)?),
        SchemeKind::Bpau => Geometry::Double(DoubleIrsGeometry::new(l, 0.0, x, heights.h_d)?),
    })
}

/// Exact closed-form SNR of `scheme` on `geom`.
pub fn snr_at_geometry(cfg: &PowerConfig, scheme: SchemeKind, geom: &Geometry, split: ElementSplit) -> Result<f64> {
    let dep = Deployment::new(scheme, crate::model::gains_from_geometry(geom, cfg)?)?;
    Ok(snr_closed_form(cfg, &dep, split)?.snr)
}

fn clamp(x: f64, l: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, l)
    }
}

/// Approximated hybrid SNR as a function of the BS-surface distance.
pub fn bhu_placement_objective(cfg: &PowerConfig, split: ElementSplit, l: f64, h_s: f64, x: f64) -> f64 {
    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, beta_ref: beta, .. } = *cfg;
    let d_bi2 = x * x + h_s * h_s;
    let d_iu2 = (l - x).powi(2) + h_s * h_s;
    let n_p = split.n_p as f64;
    let amp = (split.n_a as f64 * p_i).sqrt() + (n_p * n_p * p_b * beta / d_bi2).sqrt();
    p_b * beta * amp * amp / (sr * p_i * d_bi2 + s0 * p_b * d_iu2)
}

/// `x_BI* = c9 L / (c9 + c10)`.
pub fn bhu_x_star(cfg: &PowerConfig, l: f64) -> f64 {
    let (c9, c10) = (cfg.c9(), cfg.c10());
    clamp(c9 * l / (c9 + c10), l)
}

/// `x_B* = L sigma0^2 P_B h_d^2 / (beta sigma_r^2 P_I N_p^2 + sigma0^2 P_B h_d^2)`.
pub fn bapu_x_star(cfg: &PowerConfig, n_p: u64, l: f64, h_d: f64) -> f64 {
    let (c9, c10) = (cfg.c9(), cfg.c10());
    let np2 = (n_p as f64).powi(2);
    let h2 = h_d * h_d;
    clamp(l * c9 * h2 / (cfg.beta_ref * c10 * np2 + c9 * h2), l)
}

/// `x_U* = L sigma_r^2 P_I h_d^2 / (beta sigma0^2 P_B N_p^2 + sigma_r^2 P_I h_d^2)`.
pub fn bpau_x_star(cfg: &PowerConfig, n_p: u64, l: f64, h_d: f64) -> f64 {
    let (c9, c10) = (cfg.c9(), cfg.c10());
    let np2 = (n_p as f64).powi(2);
    let h2 = h_d * h_d;
    clamp(l * c10 * h2 / (cfg.beta_ref * c9 * np2 + c10 * h2), l)
}

/// Approximated hybrid SNR at `x_BI*`.
pub fn bhu_placed_snr(cfg: &PowerConfig, split: ElementSplit, l: f64, h_s: f64) -> f64 {
    let (c9, c10) = (cfg.c9(), cfg.c10());
    let beta = cfg.beta_ref;
    let s = c9 + c10;
    let n_p = split.n_p as f64;
    let amp = (split.n_a as f64 * cfg.p_i).sqrt()
        + (n_p * n_p * cfg.p_b * beta * s * s / (c9 * c9 * l * l + h_s * h_s * s * s)).sqrt();
    s * cfg.p_b * beta * amp * amp / (h_s * h_s * s * s + c9 * c10 * l * l)
}

/// Approximated active-first SNR at `x_B*`.
pub fn bapu_placed_snr(cfg: &PowerConfig, split: ElementSplit, l: f64, h_d: f64) -> f64 {
    let (c9, c10) = (cfg.c9(), cfg.c10());
    let beta = cfg.beta_ref;
    let np2 = (split.n_p as f64).powi(2);
    let h2 = h_d * h_d;
    beta * cfg.p_b * split.n_a as f64 * (beta * c10 * np2 + c9 * h2) / (cfg.sigma_r_sq * h2 * (beta * c10 * np2 + c9 * l * l))
}

/// Approximated passive-first SNR at `x_U*`.
pub fn bpau_placed_snr(cfg: &PowerConfig, split: ElementSplit, l: f64, h_d: f64) -> f64 {
    let (c9, c10) = (cfg.c9(), cfg.c10());
    let beta = cfg.beta_ref;
    let np2 = (split.n_p as f64).powi(2);
    let h2 = h_d * h_d;
    beta * cfg.p_i * split.n_a as f64 * (beta * c9 * np2 + c10 * h2) / (cfg.sigma0_sq * h2 * (beta * c9 * np2 + c10 * l * l))
}

fn solution(cfg: &PowerConfig, scheme: SchemeKind, split: ElementSplit, l: f64, heights: Heights, x: f64, approx: f64) -> Result<PlacementSolution> {
    let geometry = placed_geometry(scheme, l, heights, x)?;
    Ok(PlacementSolution {
        scheme,
        x_star: x,
        snr_approx: Some(approx),
        snr_true: snr_at_geometry(cfg, scheme, &geometry, split)?,
        geometry,
    })
}

/// Hybrid surface at `x_BI*`.
///
/// Fails when the exact SNR cannot be evaluated at the resulting geometry.
pub fn place_bhu(cfg: &PowerConfig, split: ElementSplit, l: f64, h_s: f64) -> Result<PlacementSolution> {
    let heights = Heights { h_s, h_d: 0.0 };
    solution(cfg, SchemeKind::Bhu, split, l, heights, bhu_x_star(cfg, l), bhu_placed_snr(cfg, split, l, h_s))
}

/// Active surface at `x_B*` with the passive surface above the user.
///
/// Fails when `x_B*` lands so close to the passive surface that the
/// inter-surface gain leaves the far-field range.
pub fn place_bapu(cfg: &PowerConfig, split: ElementSplit, l: f64, h_d: f64) -> Result<PlacementSolution> {
    let heights = Heights { h_s: 0.0, h_d };
    let x = bapu_x_star(cfg, split.n_p, l, h_d);
    solution(cfg, SchemeKind::Bapu, split, l, heights, x, bapu_placed_snr(cfg, split, l, h_d))
}

/// Active surface at `x_U*` from the user with the passive surface above the BS.
///
/// Fails under the same condition as [`place_bapu`].
pub fn place_bpau(cfg: &PowerConfig, split: ElementSplit, l: f64, h_d: f64) -> Result<PlacementSolution> {
    let heights = Heights { h_s: 0.0, h_d };
    let x = bpau_x_star(cfg, split.n_p, l, h_d);
    solution(cfg, SchemeKind::Bpau, split, l, heights, x, bpau_placed_snr(cfg, split, l, h_d))
}

/// Closed-form placement of any scheme.
pub fn place(cfg: &PowerConfig, scheme: SchemeKind, split: ElementSplit, l: f64, heights: Heights) -> Result<PlacementSolution> {
    match scheme {
        SchemeKind::Bhu => place_bhu(cfg, split, l, heights.h_s),
        SchemeKind::Bapu => place_bapu(cfg, split, l, heights.h_d),
        SchemeKind::Bpau => place_bpau(cfg, split, l, heights.h_d),
    }
}

/// Grid coordinates `0, res, 2 res, ...` up to and including `l`.
pub fn grid_points(l: f64, resolution: f64) -> Vec<f64> {
    let steps = (l / resolution + 1e-9).floor() as usize;
    let mut pts: Vec<f64> = (0..=steps).map(|k| (k as f64 * resolution).min(l)).collect();
    if l - pts[steps] > 1e-9 * resolution.max(l) {
        pts.push(l);
    }
    pts
}

/// Higher SNR wins; ties go to the lexicographically smaller coordinates.
fn better(a: (f64, f64, f64), b: (f64, f64, f64)) -> (f64, f64, f64) {
    if b.2 > a.2 || (b.2 == a.2 && (b.0, b.1) < (a.0, a.1)) {
        b
    } else {
        a
    }
}

/// Grid search of the exact SNR over the placement domain.
///
/// Points where the two surfaces coincide are skipped.
pub fn grid_search_placement(
    cfg: &PowerConfig,
    scheme: SchemeKind,
    split: ElementSplit,
    l: f64,
    heights: Heights,
    resolution: f64,
    domain_kind: PlacementDomain,
) -> Result<PlacementSolution> {
    if !(resolution > 0.0) {
        return Err(domain(format!("grid resolution must be positive, got {resolution}")));
    }
    let xs = grid_points(l, resolution);
    let none = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    let eval = |x: f64, y: f64| -> (f64, f64, f64) {
        let geom = match scheme {
            SchemeKind::Bhu => SingleIrsGeometry::new(l, x, heights.h_s).map(Geometry::Single),
            _ => DoubleIrsGeometry::new(l, x, y, heights.h_d).map(Geometry::Double),
        };
        match geom.and_then(|g| snr_at_geometry(cfg, scheme, &g, split)) {
            Ok(s) => (x, y, s),
            Err(_) => none,
        }
    };
    let (bx, by, _) = match (scheme, domain_kind) {
        (SchemeKind::Bhu, _) => xs.par_iter().map(|&x| eval(x, 0.0)).reduce(|| none, better),
        (SchemeKind::Bapu, PlacementDomain::Restricted) => xs.par_iter().map(|&x| eval(x, 0.0)).reduce(|| none, better),
        (SchemeKind::Bpau, PlacementDomain::Restricted) => xs.par_iter().map(|&x| eval(0.0, x)).reduce(|| none, better),
        (_, PlacementDomain::Simplex) => xs
            .par_iter()
            .map(|&x| xs.iter().take_while(|&&y| x + y < l).map(|&y| eval(x, y)).fold(none, better))
            .reduce(|| none, better),
    };
    if !bx.is_finite() {
        return Err(domain("no feasible placement on the grid"));
    }
    let geometry = match scheme {
        SchemeKind::Bhu => Geometry::Single(SingleIrsGeometry::new(l, bx, heights.h_s)?),
        _ => Geometry::Double(DoubleIrsGeometry::new(l, bx, by, heights.h_d)?),
    };
    let x_star = if scheme == SchemeKind::Bpau { by } else { bx };
    let snr_approx = match (scheme, domain_kind) {
        (SchemeKind::Bhu, _) => Some(bhu_placement_objective(cfg, split, l, heights.h_s, bx)),
        _ => None,
    };
    Ok(PlacementSolution {
        scheme,
        x_star,
        snr_approx,
        snr_true: snr_at_geometry(cfg, scheme, &geometry, split)?,
        geometry,
    })
}

/// Dominance ratios behind the high-SNR placement approximations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport {
    pub bhu_ratio: f64,
    pub bapu_ratio: f64,
    pub bpau_ratio: f64,
    /// Lower bound that `P_B` must dominate; non-positive means no constraint.
    pub p_b_bound: f64,
    /// `P_B / p_b_bound`, infinite when the bound is non-positive.
    pub p_b_margin: f64,
    pub threshold: f64,
    /// Every dominance ratio reaches the threshold.
    pub valid: bool,
}

impl AssumptionReport {
    pub fn ratio(&self, scheme: SchemeKind) -> f64 {
        match scheme {
            SchemeKind::Bhu => self.bhu_ratio,
            SchemeKind::Bapu => self.bapu_ratio,
            SchemeKind::Bpau => self.bpau_ratio,
        }
    }

    pub fn valid_for(&self, scheme: SchemeKind) -> bool {
        self.ratio(scheme) >= self.threshold
    }
}

/// Hybrid dominance ratio on `geom`.
pub fn bhu_dominance(cfg: &PowerConfig, geom: &SingleIrsGeometry) -> f64 {
    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, beta_ref: beta, .. } = *cfg;
    let (d_bi, d_iu) = geom.distances();
    let (a, b) = (d_bi * d_bi, d_iu * d_iu);
    (beta * sr * p_i * a + beta * s0 * p_b * b) / (sr * s0 * a * b)
}

/// Active-first and passive-first dominance ratios on `geom`.
pub fn double_dominance(cfg: &PowerConfig, geom: &DoubleIrsGeometry, n_p: u64) -> (f64, f64) {
    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, beta_ref: beta, .. } = *cfg;
    let (d_b, d_i, d_u) = geom.distances();
    let (b, i, u) = (d_b * d_b, d_i * d_i, d_u * d_u);
    let np2 = (n_p as f64).powi(2);
    let den = s0 * sr * b * i * u;
    (
        (beta * beta * sr * p_i * np2 * b + beta * s0 * p_b * i * u) / den,
        (beta * sr * p_i * i * b + beta * beta * s0 * p_b * np2 * u) / den,
    )
}

/// Evaluates the high-SNR dominance assumptions on a pair of geometries.
pub fn check_placement_assumptions(
    cfg: &PowerConfig,
    single: &SingleIrsGeometry,
    double: &DoubleIrsGeometry,
    split: ElementSplit,
    threshold: f64,
) -> AssumptionReport {
    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, beta_ref: beta, .. } = *cfg;
    let bhu_ratio = bhu_dominance(cfg, single);
    let (bapu_ratio, bpau_ratio) = double_dominance(cfg, double, split.n_p);
    let (d_bi, d_iu) = single.distances();
    let (d_b, d_i, d_u) = double.distances();
    let (bi, iu, b, i, u) = (d_bi * d_bi, d_iu * d_iu, d_b * d_b, d_i * d_i, d_u * d_u);
    let np2 = (split.n_p as f64).powi(2);
    let p_b_bound = [
        sr * bi / beta - sr * p_i * bi / (s0 * iu),
        b * sr / beta - sr * beta * b * p_i * np2 / (s0 * i * u),
        sr * i * b / (beta * beta * np2) - sr * p_i * i * b / (beta * s0 * np2 * u),
    ]
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    let p_b_margin = if p_b_bound > 0.0 { p_b / p_b_bound } else { f64::INFINITY };
    AssumptionReport {
        bhu_ratio,
        bapu_ratio,
        bpau_ratio,
        p_b_bound,
        p_b_margin,
        threshold,
        valid: bhu_ratio >= threshold && bapu_ratio >= threshold && bpau_ratio >= threshold,
    }
}

/// The three schemes at their closed-form placements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlacedComparison {
    pub bhu: PlacementSolution,
    pub bapu: PlacementSolution,
    pub bpau: PlacementSolution,
    /// Ratio of approximated SNRs, active-first over hybrid.
    pub bapu_over_bhu: f64,
    /// Ratio of approximated SNRs, passive-first over hybrid.
    pub bpau_over_bhu: f64,
    /// Left side of the active-first-beats-passive-first condition; positive favours active-first.
    pub bapu_over_bpau_predicate: f64,
    /// Highest exact rate.
    pub winner: SchemeKind,
}

/// `(c9 - c10)(((b Np^2 - L^2) b Np^2 + (b Np^2 + L^2) h_d^2) c9 c10 + (c9^2 + c10^2) b Np^2 h_d^2)`.
pub fn placed_bapu_over_bpau_predicate(cfg: &PowerConfig, n_p: u64, l: f64, h_d: f64) -> f64 {
    let (c9, c10) = (cfg.c9(), cfg.c10());
    let bn = cfg.beta_ref * (n_p as f64).powi(2);
    let (l2, h2) = (l * l, h_d * h_d);
    (c9 - c10) * (((bn - l2) * bn + (bn + l2) * h2) * c9 * c10 + (c9 * c9 + c10 * c10) * bn * h2)
}

pub fn compare_placed(cfg: &PowerConfig, split: ElementSplit, l: f64, heights: Heights) -> Result<PlacedComparison> {
    let bhu = place_bhu(cfg, split, l, heights.h_s)?;
    let bapu = place_bapu(cfg, split, l, heights.h_d)?;
    let bpau = place_bpau(cfg, split, l, heights.h_d)?;
    let g0 = bhu.snr_approx.unwrap_or(f64::NAN);
    let all = [bhu, bapu, bpau];
    let winner = all.iter().fold(all[0], |b, s| if s.snr_true > b.snr_true { *s } else { b }).scheme;
    Ok(PlacedComparison {
        bapu_over_bhu: bapu.snr_approx.unwrap_or(f64::NAN) / g0,
        bpau_over_bhu: bpau.snr_approx.unwrap_or(f64::NAN) / g0,
        bapu_over_bpau_predicate: placed_bapu_over_bpau_predicate(cfg, split.n_p, l, heights.h_d),
        bhu,
        bapu,
        bpau,
        winner,
    })
}

/// Hybrid scheme with closed-form placement followed by closed-form allocation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointBhu {
    pub snr: f64,
    pub split: ElementSplit,
    pub x_star: f64,
}

/// Places the hybrid surface, then picks the best split among the closed-form candidates.
pub fn snr_bhu_joint(cfg: &PowerConfig, l: f64, h_s: f64, n_total: u64) -> Result<JointBhu> {
    if n_total < 2 {
        return Err(domain(format!("need at least two elements, got {n_total}")));
    }
    let x = bhu_x_star(cfg, l);
    let geom = SingleIrsGeometry::new(l, x, h_s)?;
    let g = geom.gains(cfg)?;
    let dep = Deployment::Bhu(g);
    let t = crate::allocation::bhu_active_threshold(cfg, &g);
    let n = n_total as f64;
    let candidates: Vec<u64> = if n <= t {
        vec![n_total - 1]
    } else {
        vec![t.floor(), t.ceil()].into_iter().map(|a| (a.max(1.0) as u64).clamp(1, n_total - 1)).collect()
    };
    let mut best: Option<(ElementSplit, f64)> = None;
    // Larger active counts first so that ties keep the smaller passive count.
    for n_a in candidates.into_iter().rev() {
        let split = ElementSplit::new(n_total - n_a, n_a)?;
        let snr = snr_relaxed(cfg, &dep, split.n_p as f64, split.n_a as f64);
        if best.is_none_or(|(_, b)| snr > b) {
            best = Some((split, snr));
        }
    }
    let (split, snr) = best.expect("at least one candidate");
    Ok(JointBhu { snr, split, x_star: x })
}
