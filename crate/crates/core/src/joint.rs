//! Joint allocation and placement, the brute-force oracle, and passive-only benchmarks.

use std::fmt;

use log::warn;
use rayon::prelude::*;

use crate::allocation::optimized_split;
use crate::error::{domain, Error, Result};
use crate::model::units::rate;
use crate::model::{gains_from_geometry, path_gain, Deployment, ElementSplit, PowerConfig, SchemeKind};
use crate::placement::{
    bhu_placed_snr, grid_points, grid_search_placement, placed_geometry, snr_at_geometry, snr_bhu_joint, Heights,
    PlacementDomain, PlacementSolution, DEFAULT_RESOLUTION,
};
use crate::snr::snr_relaxed;

/// Largest number of (placement, split) pairs the brute-force oracle will evaluate.
pub const BRUTE_FORCE_BUDGET: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlternatingOptions {
    pub max_iters: usize,
    /// Stop once an iteration improves the rate by less than this (bits/s/Hz).
    pub tol: f64,
    /// Grid resolution of the placement step (m).
    pub resolution: f64,
}

impl Default for AlternatingOptions {
    fn default() -> Self {
        Self { max_iters: 50, tol: 1e-9, resolution: DEFAULT_RESOLUTION }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JointOutcome {
    pub split: ElementSplit,
    pub placement: PlacementSolution,
    pub rate: f64,
    pub iterations: usize,
    /// False when the iteration cap was hit first.
    pub converged: bool,
    /// Rate after each iteration.
    pub history: Vec<f64>,
}

/// Alternates placement and allocation until the rate stops improving.
///
/// The hybrid scheme needs a single pass: its closed-form placement does not
/// depend on the split. The two-surface schemes start from `ceil(2N/3)`
/// passive elements; each iteration takes the exact-SNR grid optimum on the
/// closed-form sub-manifold, then the rounded closed-form split for the new
/// gains. Neither step can lower the rate.
pub fn alternate_optimize(
    cfg: &PowerConfig,
    scheme: SchemeKind,
    n_total: u64,
    l: f64,
    heights: Heights,
    opts: AlternatingOptions,
) -> Result<JointOutcome> {
    if opts.max_iters == 0 {
        return Err(domain("max_iters must be at least 1"));
    }
    if !(opts.tol > 0.0) {
        return Err(domain(format!("tolerance must be positive, got {}", opts.tol)));
    }
    if n_total < 2 {
        return Err(domain(format!("need at least two elements, got {n_total}")));
    }
    if scheme == SchemeKind::Bhu {
        let j = snr_bhu_joint(cfg, l, heights.h_s, n_total)?;
        let geometry = placed_geometry(SchemeKind::Bhu, l, heights, j.x_star)?;
        let placement = PlacementSolution {
            scheme,
            x_star: j.x_star,
            snr_approx: Some(bhu_placed_snr(cfg, j.split, l, heights.h_s)),
            snr_true: j.snr,
            geometry,
        };
        let r = rate(j.snr);
        return Ok(JointOutcome { split: j.split, placement, rate: r, iterations: 1, converged: true, history: vec![r] });
    }

    let n_p0 = ((2 * n_total).div_ceil(3)).clamp(1, n_total - 1);
    let mut split = ElementSplit::with_passive(n_total, n_p0)?;
    let mut history = Vec::new();
    let mut best: Option<(ElementSplit, PlacementSolution, f64)> = None;
    let mut converged = false;
    for _ in 0..opts.max_iters {
        let placed = grid_search_placement(cfg, scheme, split, l, heights, opts.resolution, PlacementDomain::Restricted)?;
        let dep = Deployment::new(scheme, gains_from_geometry(&placed.geometry, cfg)?)?;
        let before = rate(placed.snr_true);
        let candidate = optimized_split(cfg, &dep, n_total)?;
        let snr = snr_relaxed(cfg, &dep, candidate.n_p as f64, candidate.n_a as f64);
        if snr > placed.snr_true {
            split = candidate;
        }
        let snr = snr.max(placed.snr_true);
        let r = rate(snr);
        let reference = best.as_ref().map_or(before, |b| b.2);
        history.push(r);
        best = Some((split, PlacementSolution { snr_true: snr, snr_approx: None, ..placed }, r));
        if r - reference < opts.tol {
            converged = true;
            break;
        }
    }
    let (split, placement, r) = best.expect("at least one iteration");
    if !converged {
        warn!("{scheme}: alternating optimization stopped after {} iterations", opts.max_iters);
    }
    Ok(JointOutcome { split, placement, rate: r, iterations: history.len(), converged, history })
}

/// Exhaustive search over every split and every grid placement on the closed-form sub-manifold.
pub fn joint_brute_force(
    cfg: &PowerConfig,
    scheme: SchemeKind,
    n_total: u64,
    l: f64,
    heights: Heights,
    grid_res: f64,
) -> Result<JointOutcome> {
    if !(grid_res > 0.0) {
        return Err(domain(format!("grid resolution must be positive, got {grid_res}")));
    }
    if n_total < 2 {
        return Err(domain(format!("need at least two elements, got {n_total}")));
    }
    let xs = grid_points(l, grid_res);
    let required = (n_total - 1) as f64 * xs.len() as f64;
    if required > BRUTE_FORCE_BUDGET {
        return Err(Error::BudgetExceeded { required, limit: BRUTE_FORCE_BUDGET });
    }
    // (x, n_p, snr); higher SNR wins, then smaller x, then smaller n_p.
    let none = (f64::INFINITY, u64::MAX, f64::NEG_INFINITY);
    let better = |a: (f64, u64, f64), b: (f64, u64, f64)| {
        if b.2 > a.2 || (b.2 == a.2 && (b.0, b.1) < (a.0, a.1)) {
            b
        } else {
            a
        }
    };
    let (x, n_p, _) = xs
        .par_iter()
        .map(|&x| {
            let dep = placed_geometry(scheme, l, heights, x)
                .and_then(|g| gains_from_geometry(&g, cfg))
                .and_then(|g| Deployment::new(scheme, g));
            let Ok(dep) = dep else { return none };
            (1..n_total)
                .map(|n_p| (x, n_p, snr_relaxed(cfg, &dep, n_p as f64, (n_total - n_p) as f64)))
                .fold(none, better)
        })
        .reduce(|| none, better);
    if n_p == u64::MAX {
        return Err(domain("no feasible placement on the grid"));
    }
    let split = ElementSplit::with_passive(n_total, n_p)?;
    let geometry = placed_geometry(scheme, l, heights, x)?;
    let snr = snr_at_geometry(cfg, scheme, &geometry, split)?;
    let placement = PlacementSolution { scheme, x_star: x, snr_approx: None, snr_true: snr, geometry };
    let r = rate(snr);
    Ok(JointOutcome { split, placement, rate: r, iterations: 1, converged: true, history: vec![r] })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Benchmark {
    pub snr: f64,
    pub rate: f64,
}

/// One passive surface of `N` elements directly above the user.
pub fn benchmark_bpu(cfg: &PowerConfig, n_total: u64, l: f64, h_d: f64) -> Result<Benchmark> {
    if n_total < 1 {
        return Err(domain("need at least one element"));
    }
    let e = &cfg.exponents;
    let g1 = path_gain(l.hypot(h_d), e.bi, cfg.beta_ref)?;
    let g2 = path_gain(h_d, e.iu, cfg.beta_ref)?;
    let n = n_total as f64;
    let snr = cfg.p_b * n * n * g1 * g2 / cfg.sigma0_sq;
    Ok(Benchmark { snr, rate: rate(snr) })
}

/// Two passive surfaces above the BS and the user, sharing the elements as evenly as possible.
pub fn benchmark_bppu(cfg: &PowerConfig, n_total: u64, l: f64, h_d: f64) -> Result<Benchmark> {
    if n_total < 2 {
        return Err(domain("need at least two elements"));
    }
    let e = &cfg.exponents;
    let gb = path_gain(h_d, e.b, cfg.beta_ref)?;
    let gi = path_gain(l, e.i, cfg.beta_ref)?;
    let gu = path_gain(h_d, e.u, cfg.beta_ref)?;
    let n1 = (n_total / 2) as f64;
    let n2 = n_total.div_ceil(2) as f64;
    let snr = cfg.p_b * (n1 * n2).powi(2) * gb * gi * gu / cfg.sigma0_sq;
    Ok(Benchmark { snr, rate: rate(snr) })
}

/// A row of the full comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Candidate {
    Scheme(SchemeKind),
    /// Single passive surface.
    Bpu,
    /// Two passive surfaces.
    Bppu,
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::Scheme(s) => s.fmt(f),
            Candidate::Bpu => f.write_str("bpu"),
            Candidate::Bppu => f.write_str("bppu"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonEntry {
    pub candidate: Candidate,
    pub snr: f64,
    pub rate: f64,
    /// Present for the three optimized schemes.
    pub joint: Option<JointOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Hybrid, active-first, passive-first, single passive, double passive.
    pub entries: Vec<ComparisonEntry>,
    pub winner: Candidate,
}

/// Jointly optimized rates of the three schemes next to the passive benchmarks.
pub fn compare_all(cfg: &PowerConfig, n_total: u64, l: f64, heights: Heights, opts: AlternatingOptions) -> Result<Comparison> {
    let joint: Vec<Result<JointOutcome>> = SchemeKind::ALL
        .par_iter()
        .map(|&s| alternate_optimize(cfg, s, n_total, l, heights, opts))
        .collect();
    let mut entries = Vec::with_capacity(5);
    for (s, j) in SchemeKind::ALL.into_iter().zip(joint) {
        let j = j?;
        entries.push(ComparisonEntry { candidate: Candidate::Scheme(s), snr: j.placement.snr_true, rate: j.rate, joint: Some(j) });
    }
    let bpu = benchmark_bpu(cfg, n_total, l, heights.h_d)?;
    entries.push(ComparisonEntry { candidate: Candidate::Bpu, snr: bpu.snr, rate: bpu.rate, joint: None });
    let bppu = benchmark_bppu(cfg, n_total, l, heights.h_d)?;
    entries.push(ComparisonEntry { candidate: Candidate::Bppu, snr: bppu.snr, rate: bppu.rate, joint: None });
    let winner = entries.iter().fold(&entries[0], |b, e| if e.rate > b.rate { e } else { b }).candidate;
    Ok(Comparison { entries, winner })
}
