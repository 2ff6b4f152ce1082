//! Analyses behind each subcommand. Every number comes from the library.

use std::fmt;
use std::str::FromStr;

use irs_deploy::allocation::{exhaustive_split, optimized_split};
use irs_deploy::asymptotics::{
    asymptotic_snr, estimate_scaling_order, AsymptoticQuery, ScalingPolicy, ScalingVariable, Sweep,
};
use irs_deploy::joint::{benchmark_bppu, benchmark_bpu, compare_all, joint_brute_force, AlternatingOptions, Candidate};
use irs_deploy::model::units::{dbm_to_watts, rate};
use irs_deploy::placement::{
    bhu_dominance, double_dominance, grid_search_placement, placed_geometry, snr_at_geometry, PlacementDomain,
    PlacementSolution, DEFAULT_DOMINANCE,
};
use irs_deploy::{
    alternate_optimize, place, snr_closed_form, vector_snr_oracle, Deployment, ElementSplit, Geometry, PowerConfig,
    SchemeKind,
};
use log::warn;
use rayon::prelude::*;

use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::output::Row;

/// Whether the high-SNR dominance margins hold at `geom`.
pub fn assumptions_ok(cfg: &PowerConfig, scheme: SchemeKind, geom: &Geometry, n_p: u64) -> bool {
    let ratio = match geom {
        Geometry::Single(g) => bhu_dominance(cfg, g),
        Geometry::Double(g) => {
            let (a, p) = double_dominance(cfg, g, n_p);
            if scheme == SchemeKind::Bapu {
                a
            } else {
                p
            }
        }
    };
    ratio >= DEFAULT_DOMINANCE
}

/// The configured fixed geometry of `scheme`.
fn fixed_geometry(sc: &ScenarioConfig, scheme: SchemeKind) -> Result<Geometry> {
    let missing = |what: &str| CliError::Invalid {
        field: what.to_string(),
        reason: format!("{scheme} needs a fixed geometry ({what})"),
    };
    match scheme {
        SchemeKind::Bhu => sc.hybrid_geometry().map(Geometry::Single).ok_or_else(|| missing("x_bi or d_bi/d_iu")),
        _ => sc.double_geometry().map(Geometry::Double).ok_or_else(|| missing("x_b and x_u")),
    }
}

fn deployment(cfg: &PowerConfig, scheme: SchemeKind, geom: &Geometry) -> Result<Deployment> {
    Ok(Deployment::new(scheme, irs_deploy::gains_from_geometry(geom, cfg)?)?)
}

fn split_row(sweep: f64, scheme: impl Into<String>, snr: f64, split: ElementSplit) -> Row {
    let mut row = Row::new(sweep, scheme, snr, rate(snr));
    row.n_p = Some(split.n_p);
    row.n_a = Some(split.n_a);
    row
}

/// Closed-form SNR at the configured geometry and split, beside the vector-channel oracle.
pub fn evaluate(sc: &ScenarioConfig, seed: u64) -> Result<Vec<Row>> {
    let cfg = sc.power();
    let split = sc.require_split()?;
    sc.schemes()
        .into_iter()
        .map(|scheme| {
            let geom = fixed_geometry(sc, scheme)?;
            let dep = deployment(&cfg, scheme, &geom)?;
            let snr = snr_closed_form(&cfg, &dep, split)?.snr;
            let mut row = split_row(sc.n_total as f64, scheme.as_str(), snr, split);
            row.oracle_rate = Some(rate(vector_snr_oracle(&cfg, &dep, split, seed)?));
            row.assumptions_ok = Some(assumptions_ok(&cfg, scheme, &geom, split.n_p));
            Ok(row)
        })
        .collect()
}

/// Rounded closed-form split beside the exhaustive search.
pub fn allocate(sc: &ScenarioConfig) -> Result<Vec<Row>> {
    let cfg = sc.power();
    sc.schemes()
        .into_iter()
        .map(|scheme| {
            let geom = fixed_geometry(sc, scheme)?;
            let dep = deployment(&cfg, scheme, &geom)?;
            let split = optimized_split(&cfg, &dep, sc.n_total)?;
            let best = exhaustive_split(&cfg, &dep, sc.n_total)?;
            let mut row = split_row(sc.n_total as f64, scheme.as_str(), snr_closed_form(&cfg, &dep, split)?.snr, split);
            row.oracle_rate = Some(rate(snr_closed_form(&cfg, &dep, best)?.snr));
            row.oracle_n_p = Some(best.n_p);
            row.assumptions_ok = Some(assumptions_ok(&cfg, scheme, &geom, split.n_p));
            Ok(row)
        })
        .collect()
}

/// Even split `floor(N/2)` passive, the rest active.
pub fn allocate_equal(sc: &ScenarioConfig) -> Result<Vec<Row>> {
    let cfg = sc.power();
    let split = ElementSplit::with_passive(sc.n_total, sc.n_total / 2)?;
    sc.schemes()
        .into_iter()
        .map(|scheme| {
            let geom = fixed_geometry(sc, scheme)?;
            let dep = deployment(&cfg, scheme, &geom)?;
            let snr = snr_closed_form(&cfg, &dep, split)?.snr;
            Ok(split_row(sc.n_total as f64, format!("{scheme}_equal"), snr, split))
        })
        .collect()
}

fn placement_row(sweep: f64, cfg: &PowerConfig, sol: &PlacementSolution, split: ElementSplit) -> Row {
    let mut row = split_row(sweep, sol.scheme.as_str(), sol.snr_true, split);
    row.x_star_m = Some(sol.bs_to_active());
    row.assumptions_ok = Some(assumptions_ok(cfg, sol.scheme, &sol.geometry, split.n_p));
    row
}

/// Closed-form placement beside the grid search on the same sub-manifold.
pub fn place_cmd(sc: &ScenarioConfig, resolution: f64) -> Result<Vec<Row>> {
    let cfg = sc.power();
    let split = sc.require_split()?;
    sc.schemes()
        .into_iter()
        .map(|scheme| {
            let sol = place(&cfg, scheme, split, sc.l, sc.heights())?;
            let grid =
                grid_search_placement(&cfg, scheme, split, sc.l, sc.heights(), resolution, PlacementDomain::Restricted)?;
            let mut row = placement_row(sc.n_total as f64, &cfg, &sol, split);
            row.oracle_rate = Some(grid.rate());
            row.oracle_x_star_m = Some(grid.bs_to_active());
            Ok(row)
        })
        .collect()
}

/// Surfaces at mid-link: hybrid at `L/2`, active surface `L/2` from the BS.
pub fn place_middle(sc: &ScenarioConfig) -> Result<Vec<Row>> {
    let cfg = sc.power();
    let split = sc.require_split()?;
    sc.schemes()
        .into_iter()
        .map(|scheme| {
            let geom = placed_geometry(scheme, sc.l, sc.heights(), sc.l / 2.0)?;
            let snr = snr_at_geometry(&cfg, scheme, &geom, split)?;
            let mut row = split_row(sc.n_total as f64, format!("{scheme}_middle"), snr, split);
            row.x_star_m = Some(sc.l / 2.0);
            row.assumptions_ok = Some(assumptions_ok(&cfg, scheme, &geom, split.n_p));
            Ok(row)
        })
        .collect()
}

/// Alternating joint optimization beside the brute-force oracle.
pub fn joint(sc: &ScenarioConfig, opts: AlternatingOptions) -> Result<Vec<Row>> {
    let cfg = sc.power();
    sc.schemes()
        .into_iter()
        .map(|scheme| {
            let j = alternate_optimize(&cfg, scheme, sc.n_total, sc.l, sc.heights(), opts)?;
            let mut row = placement_row(sc.n_total as f64, &cfg, &j.placement, j.split);
            row.rate = j.rate;
            match joint_brute_force(&cfg, scheme, sc.n_total, sc.l, sc.heights(), opts.resolution) {
                Ok(bf) => {
                    row.oracle_rate = Some(bf.rate);
                    row.oracle_n_p = Some(bf.split.n_p);
                    row.oracle_x_star_m = Some(bf.placement.bs_to_active());
                }
                Err(irs_deploy::Error::BudgetExceeded { required, .. }) => {
                    warn!("{scheme}: brute force skipped, {required:.3e} evaluations needed");
                }
                Err(e) => return Err(e.into()),
            }
            Ok(row)
        })
        .collect()
}

/// Optimized schemes next to the passive benchmarks; returns the rows and the winner.
pub fn compare(sc: &ScenarioConfig, opts: AlternatingOptions) -> Result<(Vec<Row>, Candidate)> {
    let cfg = sc.power();
    let table = compare_all(&cfg, sc.n_total, sc.l, sc.heights(), opts)?;
    let sweep = sc.n_total as f64;
    let rows = table
        .entries
        .iter()
        .map(|e| match &e.joint {
            Some(j) => {
                let mut row = placement_row(sweep, &cfg, &j.placement, j.split);
                row.rate = e.rate;
                row
            }
            None => {
                let mut row = Row::new(sweep, e.candidate.to_string(), e.snr, e.rate);
                row.n_p = Some(sc.n_total);
                row.n_a = Some(0);
                row
            }
        })
        .collect();
    Ok((rows, table.winner))
}

/// Passive-only benchmark rows.
pub fn benchmarks(sc: &ScenarioConfig) -> Result<Vec<Row>> {
    let cfg = sc.power();
    let sweep = sc.n_total as f64;
    let bpu = benchmark_bpu(&cfg, sc.n_total, sc.l, sc.h_d)?;
    let bppu = benchmark_bppu(&cfg, sc.n_total, sc.l, sc.h_d)?;
    Ok([("bpu", bpu), ("bppu", bppu)]
        .into_iter()
        .map(|(name, b)| {
            let mut row = Row::new(sweep, name, b.snr, b.rate);
            row.n_p = Some(sc.n_total);
            row.n_a = Some(0);
            row
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVar {
    N,
    PbDbm,
    PiDbm,
}

impl FromStr for SweepVar {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n" | "n_total" => Ok(SweepVar::N),
            "p_b_dbm" => Ok(SweepVar::PbDbm),
            "p_i_dbm" => Ok(SweepVar::PiDbm),
            _ => Err(CliError::Usage(format!("unknown sweep variable {s:?}; use n, p_b_dbm or p_i_dbm"))),
        }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVar::N => "n",
            SweepVar::PbDbm => "p_b_dbm",
            SweepVar::PiDbm => "p_i_dbm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Analysis {
    Evaluate { seed: u64 },
    Allocate,
    AllocateEqual,
    Place { resolution: f64 },
    PlaceMiddle,
    Joint(AlternatingOptions),
    Compare(AlternatingOptions),
    Benchmarks,
}

impl Analysis {
    pub fn run(&self, sc: &ScenarioConfig) -> Result<Vec<Row>> {
        match *self {
            Analysis::Evaluate { seed } => evaluate(sc, seed),
            Analysis::Allocate => allocate(sc),
            Analysis::AllocateEqual => allocate_equal(sc),
            Analysis::Place { resolution } => place_cmd(sc, resolution),
            Analysis::PlaceMiddle => place_middle(sc),
            Analysis::Joint(o) => joint(sc, o),
            Analysis::Compare(o) => compare(sc, o).map(|(rows, _)| rows),
            Analysis::Benchmarks => benchmarks(sc),
        }
    }

    fn needs_fixed_split(&self) -> bool {
        matches!(self, Analysis::Evaluate { .. } | Analysis::Place { .. } | Analysis::PlaceMiddle)
    }
}

/// `steps` evenly spaced values from `from` to `to` inclusive.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        n => (0..n).map(|k| from + (to - from) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Runs `analysis` at every sweep point; rows keep the input order.
pub fn sweep(sc: &ScenarioConfig, var: SweepVar, values: &[f64], analysis: Analysis) -> Result<Vec<Row>> {
    if var == SweepVar::N && analysis.needs_fixed_split() {
        return Err(CliError::Usage("sweeping n needs an analysis that chooses its own split".into()));
    }
    let points = values
        .iter()
        .map(|&v| {
            let mut s = sc.clone();
            match var {
                SweepVar::N => {
                    if !(v.is_finite() && v >= 2.0) {
                        return Err(CliError::Usage(format!("element count {v} must be at least 2")));
                    }
                    s.n_total = v.round() as u64;
                    s.n_p = None;
                    s.n_a = None;
                }
                SweepVar::PbDbm => s.p_b_dbm = v,
                SweepVar::PiDbm => s.p_i_dbm = v,
            }
            s.validate()?;
            Ok((v, s))
        })
        .collect::<Result<Vec<_>>>()?;
    let blocks: Vec<Result<Vec<Row>>> = points
        .par_iter()
        .map(|(v, s)| {
            analysis.run(s).map(|rows| {
                rows.into_iter()
                    .map(|mut r| {
                        r.sweep_value = *v;
                        r
                    })
                    .collect()
            })
        })
        .collect();
    let mut out = Vec::new();
    for b in blocks {
        out.extend(b?);
    }
    Ok(out)
}

pub const ASYMPTOTIC_HEADER: [&str; 9] =
    ["scheme", "variable", "kind", "limit_value", "slope", "tail_slope", "residual", "power_law_ok", "points"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticArgs {
    pub variable: ScalingVariable,
    pub epsilon: f64,
    /// Element count, or power in dBm.
    pub from: f64,
    pub to: f64,
    pub points: usize,
    pub optimized: bool,
}

/// Limiting form and fitted slope per scheme.
///
/// Uses the configured fixed geometry when present, otherwise the closed-form
/// placement for the configured split (or two thirds passive).
pub fn asymptotic(sc: &ScenarioConfig, args: AsymptoticArgs) -> Result<Vec<Vec<String>>> {
    use crate::output::fmt_num;
    let cfg = sc.power();
    let split = match sc.split() {
        Some(s) => s,
        None => ElementSplit::with_passive(sc.n_total, (2 * sc.n_total).div_ceil(3).min(sc.n_total - 1))?,
    };
    let (from, to) = match args.variable {
        ScalingVariable::N => (args.from, args.to),
        _ => (dbm_to_watts(args.from), dbm_to_watts(args.to)),
    };
    let sweep = Sweep { from, to, points: args.points };
    sc.schemes()
        .into_iter()
        .map(|scheme| {
            let geom = match fixed_geometry(sc, scheme) {
                Ok(g) => g,
                Err(_) => place(&cfg, scheme, split, sc.l, sc.heights())?.geometry,
            };
            let dep = deployment(&cfg, scheme, &geom)?;
            let query = AsymptoticQuery::new(scheme, args.variable, args.epsilon)?;
            let form = asymptotic_snr(&query, &cfg, &dep, Some(split))?;
            let policy = match (args.optimized, args.variable) {
                (true, _) => ScalingPolicy::OptimizedAllocation { n_total: sc.n_total as f64 },
                (false, ScalingVariable::N) => ScalingPolicy::FixedFraction(args.epsilon),
                (false, _) => ScalingPolicy::FixedSplit(split),
            };
            let est = estimate_scaling_order(&cfg, &dep, args.variable, sweep, policy)?;
            Ok(vec![
                scheme.to_string(),
                args.variable.to_string(),
                form.kind.to_string(),
                fmt_num(form.value),
                fmt_num(est.slope),
                fmt_num(est.tail_slope),
                fmt_num(est.residual),
                est.power_law_ok.to_string(),
                est.points.len().to_string(),
            ])
        })
        .collect()
}
