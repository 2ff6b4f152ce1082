//! Splitting the element budget between passive and active elements.

use log::debug;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::model::units::rate;
use crate::model::{CascadeGains, Deployment, ElementSplit, HybridGains, PowerConfig, RelaxedSplit, SchemeKind};
use crate::snr::{bapu_cubic, bpau_cubic, c1, c2, c6, snr_relaxed};

/// Exhaustive scans above this size run on the rayon pool.
const PARALLEL_SCAN: u64 = 20_000;

/// Active-element count `P_I / (4 P_B beta_BI^2 + 4 sigma_r^2)` maximizing the relaxed hybrid SNR.
pub fn bhu_active_threshold(cfg: &PowerConfig, g: &HybridGains) -> f64 {
    cfg.p_i / (4.0 * cfg.p_b * g.bi + 4.0 * cfg.sigma_r_sq)
}

/// Relaxed optimal hybrid split.
///
/// When the budget is below the threshold every element but one is active;
/// at equality that branch is kept.
pub fn optimal_split_bhu(cfg: &PowerConfig, g: &HybridGains, n_total: f64) -> RelaxedSplit {
    let t = bhu_active_threshold(cfg, g);
    if n_total <= t {
        RelaxedSplit { n_p: 1.0, n_a: n_total - 1.0 }
    } else {
        RelaxedSplit { n_p: n_total - t, n_a: t }
    }
}

/// `g(x) = -c_cub x^3 - 3 c_lin x + 2 N c_lin`.
pub fn allocation_cubic(c_cub: f64, c_lin: f64, n_total: f64, x: f64) -> f64 {
    -c_cub * x * x * x - 3.0 * c_lin * x + 2.0 * n_total * c_lin
}

/// Unique root of `k t^3 + 3 t - 2 = 0`, which lies in `(0, 2/3]`.
fn normalized_root(k: f64) -> f64 {
    let h = |t: f64| (k * t * t + 3.0) * t - 2.0;
    let estimate = if k < 1e-30 {
        2.0 / 3.0
    } else if k > 1e30 {
        (2.0 / k).cbrt()
    } else {
        // Depressed cubic t^3 + p t + q with p = 3/k, q = -2/k. Writing the root as
        // u + v with uv = -p/3 gives t = -q / (u^2 + p/3 + v^2), free of cancellation.
        let (p3, half_q) = (1.0 / k, -1.0 / k);
        let u = (-half_q + (half_q * half_q + p3 * p3 * p3).sqrt()).cbrt();
        let v = -p3 / u;
        2.0 / k / (u * u + p3 + v * v)
    };

    // Bisection polish on a bracket grown around the estimate.
    let (mut lo, mut hi) = (estimate * (1.0 - 1e-12), estimate * (1.0 + 1e-12));
    let mut step = 1e-12;
    while h(lo) > 0.0 && lo > 0.0 {
        step *= 16.0;
        lo = (estimate * (1.0 - step)).max(0.0);
    }
    step = 1e-12;
    while h(hi) < 0.0 && hi < 2.0 / 3.0 {
        step *= 16.0;
        hi = (estimate * (1.0 + step)).min(2.0 / 3.0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if h(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if h(lo).abs() <= h(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Positive root of the allocation cubic, in `(0, 2N/3]`.
pub fn solve_allocation_cubic(c_cub: f64, c_lin: f64, n_total: f64) -> f64 {
    if c_cub <= 0.0 {
        return 2.0 * n_total / 3.0;
    }
    n_total * normalized_root(c_cub * n_total * n_total / c_lin)
}

/// Relaxed optimal split for the active-first scheme.
pub fn optimal_split_bapu(cfg: &PowerConfig, g: &CascadeGains, n_total: f64) -> RelaxedSplit {
    let (c3, c4) = bapu_cubic(cfg, g);
    let n_p = solve_allocation_cubic(c3, c4, n_total);
    RelaxedSplit { n_p, n_a: n_total - n_p }
}

/// Relaxed optimal split for the passive-first scheme.
pub fn optimal_split_bpau(cfg: &PowerConfig, g: &CascadeGains, n_total: f64) -> RelaxedSplit {
    let (c7, c8) = bpau_cubic(cfg, g);
    let n_p = solve_allocation_cubic(c7, c8, n_total);
    RelaxedSplit { n_p, n_a: n_total - n_p }
}

pub fn optimal_split(cfg: &PowerConfig, dep: &Deployment, n_total: f64) -> RelaxedSplit {
    match dep {
        Deployment::Bhu(g) => optimal_split_bhu(cfg, g, n_total),
        Deployment::Bapu(g) => optimal_split_bapu(cfg, g, n_total),
        Deployment::Bpau(g) => optimal_split_bpau(cfg, g, n_total),
    }
}

/// Best of the floor and ceiling neighbours of a relaxed split; ties go to fewer passive elements.
pub fn round_split(relaxed: RelaxedSplit, n_total: u64, snr_fn: impl Fn(ElementSplit) -> f64) -> Result<ElementSplit> {
    if n_total < 2 {
        return Err(domain(format!("need at least two elements, got {n_total}")));
    }
    let clip = |v: f64| (v.max(1.0) as u64).clamp(1, n_total - 1);
    let lo = clip(relaxed.n_p.floor());
    let hi = clip(relaxed.n_p.ceil());
    let a = ElementSplit::with_passive(n_total, lo)?;
    if hi == lo {
        return Ok(a);
    }
    let b = ElementSplit::with_passive(n_total, hi)?;
    Ok(if snr_fn(b) > snr_fn(a) { b } else { a })
}

/// Relaxed optimum rounded against the exact closed form.
pub fn optimized_split(cfg: &PowerConfig, dep: &Deployment, n_total: u64) -> Result<ElementSplit> {
    let relaxed = optimal_split(cfg, dep, n_total as f64);
    round_split(relaxed, n_total, |s| snr_relaxed(cfg, dep, s.n_p as f64, s.n_a as f64))
}

fn better(a: (u64, f64), b: (u64, f64)) -> (u64, f64) {
    if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
        b
    } else {
        a
    }
}

/// Scans every feasible split and returns the SNR maximizer, ties to fewer passive elements.
pub fn exhaustive_split(cfg: &PowerConfig, dep: &Deployment, n_total: u64) -> Result<ElementSplit> {
    if n_total < 2 {
        return Err(domain(format!("need at least two elements, got {n_total}")));
    }
    let eval = |n_p: u64| (n_p, snr_relaxed(cfg, dep, n_p as f64, (n_total - n_p) as f64));
    let start = (0, f64::NEG_INFINITY);
    let (n_p, _) = if n_total > PARALLEL_SCAN {
        (1..n_total).into_par_iter().map(eval).reduce(|| start, better)
    } else {
        (1..n_total).map(eval).fold(start, better)
    };
    ElementSplit::with_passive(n_total, n_p)
}

/// Hybrid SNR at the relaxed optimal split, in closed form.
pub fn snr_opt_allocation_bhu(cfg: &PowerConfig, g: &HybridGains, n_total: f64) -> f64 {
    let (k1, k2) = (c1(cfg, g), c2(cfg, g));
    let f = if n_total <= bhu_active_threshold(cfg, g) {
        k2 * (n_total - 1.0).sqrt() + 1.0
    } else {
        k2 * k2 / 4.0 + n_total
    };
    k1 * f * f
}

/// Cubic-law SNR approximation for the two-surface schemes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxAllocation {
    pub snr: f64,
    /// `c_cub (2N/3)^2 / c_lin`; the approximation needs this to be small.
    pub regime_ratio: f64,
    /// `regime_ratio <= 0.01`.
    pub valid: bool,
}

pub const APPROX_REGIME_LIMIT: f64 = 0.01;

/// `4 c6 N^3 / (27 c_lin)` with its regime check.
pub fn approx_snr_opt_allocation(cfg: &PowerConfig, dep: &Deployment, n_total: f64) -> Result<ApproxAllocation> {
    let (g, (c_cub, c_lin)) = match dep {
        Deployment::Bhu(_) => return Err(domain("the cubic-law approximation applies to two-surface schemes only")),
        Deployment::Bapu(g) => (g, bapu_cubic(cfg, g)),
        Deployment::Bpau(g) => (g, bpau_cubic(cfg, g)),
    };
    let np = 2.0 * n_total / 3.0;
    let regime_ratio = c_cub * np * np / c_lin;
    Ok(ApproxAllocation {
        snr: 4.0 * c6(cfg, g) * n_total.powi(3) / (27.0 * c_lin),
        regime_ratio,
        valid: regime_ratio <= APPROX_REGIME_LIMIT,
    })
}

/// Which distance condition family applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AllocationRegime {
    /// `N` at or below the hybrid threshold (all but one element active).
    AllActive,
    /// `N` above the threshold.
    Interior,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeSelection {
    /// Winner by the exact rate at each scheme's rounded optimal split.
    pub winner: SchemeKind,
    pub regime: AllocationRegime,
    /// Exact rates, indexed like [`SchemeKind::ALL`].
    pub rates: [f64; 3],
    /// Rates of the approximated optimal SNRs.
    pub approx_rates: [f64; 3],
    pub splits: [ElementSplit; 3],
    /// Which distance predicates hold, indexed like [`SchemeKind::ALL`].
    pub predicates: [bool; 3],
    /// Whether a fired predicate names the winner (or none fired).
    pub agrees: bool,
}

fn squared_distance(cfg: &PowerConfig, gain: f64, exponent: f64) -> f64 {
    (cfg.beta_ref / gain).powf(2.0 / exponent)
}

/// Compares the schemes at their optimal allocations.
///
/// The distance predicates are sufficient conditions derived under the
/// small-`N_p` approximation; the exact rates decide the winner.
pub fn best_scheme_by_allocation(
    cfg: &PowerConfig,
    hybrid: &HybridGains,
    cascade: &CascadeGains,
    n_total: u64,
) -> Result<SchemeSelection> {
    let n = n_total as f64;
    let deps = [Deployment::Bhu(*hybrid), Deployment::Bapu(*cascade), Deployment::Bpau(*cascade)];
    let mut splits = [ElementSplit { n_p: 1, n_a: 1 }; 3];
    let mut rates = [0.0; 3];
    for (k, d) in deps.iter().enumerate() {
        splits[k] = optimized_split(cfg, d, n_total)?;
        rates[k] = rate(snr_relaxed(cfg, d, splits[k].n_p as f64, splits[k].n_a as f64));
    }
    let winner = SchemeKind::ALL[(0..3).fold(0, |b, k| if rates[k] > rates[b] { k } else { b })];

    let (k1, k2) = (c1(cfg, hybrid), c2(cfg, hybrid));
    let (_, c4) = bapu_cubic(cfg, cascade);
    let (_, c8) = bpau_cubic(cfg, cascade);
    let k6 = c6(cfg, cascade);
    let regime =
        if n <= bhu_active_threshold(cfg, hybrid) { AllocationRegime::AllActive } else { AllocationRegime::Interior };
    let f = match regime {
        AllocationRegime::AllActive => (k2 * (n - 1.0).sqrt() + 1.0).powi(2),
        AllocationRegime::Interior => (k2 * k2 / 4.0 + n).powi(2),
    };
    let approx_rates = [
        rate(k1 * f),
        rate(4.0 * k6 * n.powi(3) / (27.0 * c4)),
        rate(4.0 * k6 * n.powi(3) / (27.0 * c8)),
    ];

    let PowerConfig { p_b, p_i, sigma0_sq: s0, sigma_r_sq: sr, beta_ref: beta, exponents: e, .. } = *cfg;
    let d_iu2 = squared_distance(cfg, hybrid.iu, e.iu);
    let d_b2 = squared_distance(cfg, cascade.b, e.b);
    let d_u2 = squared_distance(cfg, cascade.u, e.u);
    let n3 = n.powi(3);
    let hybrid_bound = |c_lin: f64| 27.0 * beta * hybrid.bi * p_b * c_lin * f / (4.0 * k6 * n3 * s0) - beta * k2 * k2 * sr;
    let predicates = [
        d_iu2 < hybrid_bound(c4).min(hybrid_bound(c8)),
        d_u2 < (sr * p_i * d_b2 / (s0 * p_b))
            .min(4.0 * beta * cascade.i * cascade.b * p_i * p_b * n3 / (27.0 * k1 * c4 * f)),
        d_b2 < (s0 * p_b * d_u2 / (sr * p_i))
            .min(4.0 * beta * cascade.i * cascade.u * p_i * p_b * n3 / (27.0 * k1 * c8 * f)),
    ];
    let fired: Vec<SchemeKind> = (0..3).filter(|&k| predicates[k]).map(|k| SchemeKind::ALL[k]).collect();
    let agrees = fired.is_empty() || fired.contains(&winner);
    if !agrees {
        debug!("distance predicates {fired:?} disagree with exact winner {winner} at N = {n_total}");
    }
    Ok(SchemeSelection { winner, regime, rates, approx_rates, splits, predicates, agrees })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::units::dbm_to_watts;
    use crate::model::{DoubleIrsGeometry, SingleIrsGeometry};
    use proptest::prelude::*;

    fn fixed_layout() -> (PowerConfig, HybridGains, CascadeGains) {
        let cfg = PowerConfig::default();
        let h = SingleIrsGeometry::from_distances(80.0, 50.0).gains(&cfg).unwrap();
        let c = DoubleIrsGeometry::new(90.0, 5.0, 5.0, 5.0).unwrap().gains(&cfg).unwrap();
        (cfg, h, c)
    }

    /// Active-first SNR written out independently of the library.
    fn gamma_ap(cfg: &PowerConfig, g: &CascadeGains, n_p: f64, n_a: f64) -> f64 {
        let alpha2 = cfg.p_i / (n_a * (cfg.p_b * g.b + cfg.sigma_r_sq));
        let signal = cfg.p_b * g.b * g.i * g.u * alpha2 * (n_a * n_p).powi(2);
        signal / (cfg.sigma_r_sq * g.i * g.u * alpha2 * n_a * n_p * n_p + cfg.sigma0_sq)
    }

    fn gamma_pa(cfg: &PowerConfig, g: &CascadeGains, n_p: f64, n_a: f64) -> f64 {
        let alpha2 = cfg.p_i / (n_a * (cfg.p_b * g.i * g.b * n_p * n_p + cfg.sigma_r_sq));
        let signal = cfg.p_b * g.b * g.i * g.u * alpha2 * (n_a * n_p).powi(2);
        signal / (cfg.sigma_r_sq * g.u * alpha2 * n_a + cfg.sigma0_sq)
    }

    fn argmax_scan(n: u64, f: impl Fn(f64, f64) -> f64) -> u64 {
        let mut best = (1, f64::NEG_INFINITY);
        for n_p in 1..n {
            let v = f(n_p as f64, (n - n_p) as f64);
            if v > best.1 {
                best = (n_p, v);
            }
        }
        best.0
    }

    #[test]
    fn reference_splits_at_100() {
        let (cfg, _, c) = fixed_layout();
        let ap = exhaustive_split(&cfg, &Deployment::Bapu(c), 100).unwrap();
        let pa = exhaustive_split(&cfg, &Deployment::Bpau(c), 100).unwrap();
        assert_eq!((ap.n_p, ap.n_a), (67, 33));
        assert_eq!((pa.n_p, pa.n_a), (67, 33));
        assert_eq!(optimized_split(&cfg, &Deployment::Bapu(c), 100).unwrap(), ap);
        assert_eq!(optimized_split(&cfg, &Deployment::Bpau(c), 100).unwrap(), pa);
    }

    #[test]
    fn exhaustive_matches_independent_scan() {
        let (cfg, _, c) = fixed_layout();
        for n in [2, 37, 100, 600, 1500] {
            let ap = exhaustive_split(&cfg, &Deployment::Bapu(c), n).unwrap();
            let pa = exhaustive_split(&cfg, &Deployment::Bpau(c), n).unwrap();
            assert_eq!(ap.n_p, argmax_scan(n, |p, a| gamma_ap(&cfg, &c, p, a)), "N = {n}");
            assert_eq!(pa.n_p, argmax_scan(n, |p, a| gamma_pa(&cfg, &c, p, a)), "N = {n}");
        }
    }

    #[test]
    fn parallel_scan_is_deterministic() {
        let (cfg, h, c) = fixed_layout();
        for d in [Deployment::Bhu(h), Deployment::Bapu(c), Deployment::Bpau(c)] {
            let a = exhaustive_split(&cfg, &d, 50_001).unwrap();
            let b = exhaustive_split(&cfg, &d, 50_001).unwrap();
            assert_eq!(a, b);
            let seq = argmax_scan(50_001, |p, n_a| snr_relaxed(&cfg, &d, p, n_a));
            assert_eq!(a.n_p, seq);
        }
    }

    #[test]
    fn two_elements() {
        let (cfg, h, _) = fixed_layout();
        assert_eq!(exhaustive_split(&cfg, &Deployment::Bhu(h), 2).unwrap(), ElementSplit { n_p: 1, n_a: 1 });
        assert!(exhaustive_split(&cfg, &Deployment::Bhu(h), 1).is_err());
    }

    #[test]
    fn cubic_limits() {
        assert_eq!(solve_allocation_cubic(0.0, 1.0, 600.0), 400.0);
        assert!(solve_allocation_cubic(1e40, 1.0, 600.0) < 1e-9);
        let x = solve_allocation_cubic(1e-3, 2.0, 50.0);
        assert!(allocation_cubic(1e-3, 2.0, 50.0, x).abs() <= 1e-9 * 2.0 * 50.0 * 2.0);
    }

    #[test]
    fn split_uses_cubic_root() {
        let (cfg, _, c) = fixed_layout();
        let (c3, c4) = bapu_cubic(&cfg, &c);
        assert_eq!(solve_allocation_cubic(c3, c4, 321.0), solve_allocation_cubic(c3, c4, 321.0));
        let r = optimal_split_bapu(&cfg, &c, 321.0);
        assert_eq!(r.n_p, solve_allocation_cubic(c3, c4, 321.0));
    }

    #[test]
    fn passive_first_active_share_grows() {
        let (cfg, _, c) = fixed_layout();
        let frac: Vec<f64> = [1e3, 1e4, 1e5, 1e6].iter().map(|&n| optimal_split_bpau(&cfg, &c, n).n_p / n).collect();
        assert!(frac.windows(2).all(|w| w[1] < w[0]), "{frac:?}");
    }

    #[test]
    fn small_cubic_regime_gives_two_thirds() {
        let (cfg, _, c) = fixed_layout();
        let r = optimal_split_bapu(&cfg, &c, 30.0);
        assert!((r.n_p / 20.0 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn round_split_examples() {
        let f = |s: ElementSplit| -((s.n_p as f64) - 66.6).powi(2);
        let r = round_split(RelaxedSplit { n_p: 66.6, n_a: 33.4 }, 100, f).unwrap();
        assert_eq!(r.n_p, 67);
        let g = |s: ElementSplit| -((s.n_p as f64) - 66.2).powi(2);
        assert_eq!(round_split(RelaxedSplit { n_p: 66.6, n_a: 33.4 }, 100, g).unwrap().n_p, 66);
        assert_eq!(round_split(RelaxedSplit { n_p: 40.0, n_a: 60.0 }, 100, f).unwrap().n_p, 40);
        assert_eq!(round_split(RelaxedSplit { n_p: 0.3, n_a: 99.7 }, 100, f).unwrap().n_p, 1);
        assert_eq!(round_split(RelaxedSplit { n_p: 99.5, n_a: 0.5 }, 100, f).unwrap().n_p, 99);
        assert!(round_split(RelaxedSplit { n_p: 0.5, n_a: 0.5 }, 1, f).is_err());
        // Ties go to fewer passive elements.
        assert_eq!(round_split(RelaxedSplit { n_p: 10.5, n_a: 9.5 }, 20, |_| 1.0).unwrap().n_p, 10);
    }

    #[test]
    fn hybrid_threshold_branches() {
        let (cfg, h, _) = fixed_layout();
        let t = bhu_active_threshold(&cfg, &h);
        let at = optimal_split_bhu(&cfg, &h, t);
        assert_eq!(at.n_p, 1.0);
        let huge = PowerConfig { p_i: 1e6, ..cfg };
        assert_eq!(optimal_split_bhu(&huge, &h, 50.0), RelaxedSplit { n_p: 1.0, n_a: 49.0 });
        // Default powers put the threshold near 2e6, so N = 600 is all-but-one active.
        assert!(t > 1e6);
        let s = optimal_split_bhu(&cfg, &h, 600.0);
        assert_eq!(s, RelaxedSplit { n_p: 1.0, n_a: 599.0 });
        assert_eq!(exhaustive_split(&cfg, &Deployment::Bhu(h), 600).unwrap().n_a, 599);
        // A weaker budget moves the optimum inside.
        let weak = PowerConfig { p_i: dbm_to_watts(-40.0), ..cfg };
        let s = optimal_split_bhu(&weak, &h, 600.0);
        assert!(s.n_a > 1.0 && s.n_a < 599.0, "{s:?}");
        let ex = exhaustive_split(&weak, &Deployment::Bhu(h), 600).unwrap();
        assert!((ex.n_a as f64 - s.n_a).abs() <= 1.0);
    }

    #[test]
    fn hybrid_optimum_formula_matches_substitution() {
        let (cfg, h, _) = fixed_layout();
        let d = Deployment::Bhu(h);
        for p_i_dbm in [-20.0, 8.0, 30.0, 50.0] {
            let cfg = PowerConfig { p_i: dbm_to_watts(p_i_dbm), ..cfg };
            for n in [2.0, 10.0, 600.0, 1e5] {
                let s = optimal_split_bhu(&cfg, &h, n);
                let a = snr_opt_allocation_bhu(&cfg, &h, n);
                let b = snr_relaxed(&cfg, &d, s.n_p, s.n_a);
                assert!(((a - b) / b).abs() < 1e-12, "{p_i_dbm} dBm, N = {n}: {a} vs {b}");
            }
        }
        let n = 1e13;
        assert!((snr_opt_allocation_bhu(&cfg, &h, n) / (n * n) / c1(&cfg, &h) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cubic_law_approximation() {
        let (cfg, _, c) = fixed_layout();
        for d in [Deployment::Bapu(c), Deployment::Bpau(c)] {
            let a = approx_snr_opt_allocation(&cfg, &d, 30.0).unwrap();
            assert!(a.valid, "{}", a.regime_ratio);
            let exact = snr_relaxed(&cfg, &d, 20.0, 10.0);
            assert!((a.snr / exact - 1.0).abs() < 0.02);
            let b = approx_snr_opt_allocation(&cfg, &d, 60.0).unwrap();
            assert!((b.snr / a.snr - 8.0).abs() < 1e-12);
        }
        assert!(approx_snr_opt_allocation(&cfg, &Deployment::Bhu(HybridGains { bi: 1e-6, iu: 1e-6 }), 10.0).is_err());
    }

    #[test]
    fn selection_predicates() {
        let (cfg, h, c) = fixed_layout();
        let near_user = HybridGains { iu: cfg.beta_ref / 0.01, ..h };
        let sel = best_scheme_by_allocation(&cfg, &near_user, &c, 100).unwrap();
        assert!(sel.predicates[0]);
        assert_eq!(sel.winner, SchemeKind::Bhu);

        let geo = DoubleIrsGeometry::new(90.0, 5.0, 0.0, 0.1).unwrap();
        let close_pirs = geo.gains(&cfg).unwrap();
        let sel = best_scheme_by_allocation(&cfg, &h, &close_pirs, 100).unwrap();
        assert!(sel.predicates[1]);
        assert_eq!(sel.winner, SchemeKind::Bapu);
    }

    fn db(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
        (lo..hi).prop_map(|v| 10f64.powf(v / 10.0))
    }

    fn config() -> impl Strategy<Value = PowerConfig> {
        (db(-30.0, 10.0), db(-40.0, 0.0), db(-110.0, -70.0), db(-110.0, -70.0)).prop_map(|(pb, pi, s0, sr)| {
            PowerConfig { p_b: pb, p_i: pi, sigma0_sq: s0, sigma_r_sq: sr, ..PowerConfig::default() }
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn rounding_matches_exhaustive(cfg in config(), g1 in db(-120.0, -40.0), g2 in db(-120.0, -40.0), g3 in db(-120.0, -40.0), n in 2u64..3000) {
            let c = CascadeGains { b: g1, i: g2, u: g3 };
            for d in [Deployment::Bhu(HybridGains { bi: g1, iu: g3 }), Deployment::Bapu(c), Deployment::Bpau(c)] {
                let r = optimized_split(&cfg, &d, n).unwrap();
                let e = exhaustive_split(&cfg, &d, n).unwrap();
                let rr = rate(snr_relaxed(&cfg, &d, r.n_p as f64, r.n_a as f64));
                let re = rate(snr_relaxed(&cfg, &d, e.n_p as f64, e.n_a as f64));
                prop_assert!(rr >= re - 1e-6, "{:?}: {} vs {}", d.scheme(), rr, re);
            }
        }
    }

    proptest! {
        #[test]
        fn cubic_root_properties(c_cub in db(-200.0, 50.0), c_lin in db(-200.0, 50.0), n in 1.0f64..1e7) {
            let x = solve_allocation_cubic(c_cub, c_lin, n);
            prop_assert!(x > 0.0 && x <= 2.0 * n / 3.0 * (1.0 + 1e-15));
            prop_assert!(allocation_cubic(c_cub, c_lin, n, x).abs() <= 1e-9 * 2.0 * n * c_lin);
            prop_assert!(solve_allocation_cubic(c_cub, c_lin, n * 1.1) > x);
        }

        #[test]
        fn cubic_strictly_decreasing(c_cub in db(-200.0, 50.0), c_lin in db(-200.0, 50.0), n in 1.0f64..1e6) {
            prop_assert!(allocation_cubic(c_cub, c_lin, n, 0.0) > 0.0);
            prop_assert!(allocation_cubic(c_cub, c_lin, n, n) < 0.0);
            let mut prev = f64::INFINITY;
            for k in 0..=200 {
                let v = allocation_cubic(c_cub, c_lin, n, n * k as f64 / 200.0);
                prop_assert!(v < prev);
                prev = v;
            }
        }

        #[test]
        fn hybrid_relaxed_optimum_unbeaten(cfg in config(), bi in db(-120.0, -40.0), iu in db(-120.0, -40.0), n in 2u64..5000) {
            let g = HybridGains { bi, iu };
            let d = Deployment::Bhu(g);
            let n = n as f64;
            let s = optimal_split_bhu(&cfg, &g, n);
            let best = snr_relaxed(&cfg, &d, s.n_p, s.n_a);
            let mut prev = f64::NEG_INFINITY;
            let mut falling = false;
            for k in 0..=2000 {
                let n_a = (n - 1.0) * k as f64 / 2000.0;
                let v = snr_relaxed(&cfg, &d, n - n_a, n_a);
                prop_assert!(v <= best * (1.0 + 1e-9));
                if v < prev * (1.0 - 1e-13) {
                    falling = true;
                } else if falling {
                    prop_assert!(v <= prev * (1.0 + 1e-13), "second rise at N_a = {}", n_a);
                }
                prev = v;
            }
        }
    }
}
