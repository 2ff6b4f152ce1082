//! Data series behind each numerical figure.

use std::fmt;
use std::str::FromStr;

use irs_deploy::placement::DEFAULT_RESOLUTION;
use irs_deploy::AlternatingOptions;

use crate::commands::{linspace, sweep, Analysis, SweepVar};
use crate::config::ScenarioConfig;
use crate::error::{CliError, Result};
use crate::output::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Passive/active split versus total elements.
    Fig3,
    /// Rate versus total elements, optimized and equal splits.
    Fig4,
    /// Optimized BS-to-active distance versus amplification power.
    Fig5,
    /// Rate versus amplification power, optimized and mid-link placement.
    Fig6,
    /// Jointly optimized rate versus total elements.
    Fig7,
    /// Jointly optimized rate versus amplification power.
    Fig8,
    /// Jointly optimized rate versus transmit power.
    Fig9,
}

impl Figure {
    pub const ALL: [Figure; 7] =
        [Figure::Fig3, Figure::Fig4, Figure::Fig5, Figure::Fig6, Figure::Fig7, Figure::Fig8, Figure::Fig9];
}

impl FromStr for Figure {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| CliError::Usage(format!("unknown figure {s:?}; use fig3 to fig9")))
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = Figure::ALL.iter().position(|x| x == self).unwrap() + 3;
        write!(f, "fig{n}")
    }
}

/// Fixed surfaces: hybrid 80 m from the BS and 50 m from the user, the pair 5 m in from each end.
fn fixed_layout() -> ScenarioConfig {
    ScenarioConfig {
        d_bi: Some(80.0),
        d_iu: Some(50.0),
        x_b: Some(5.0),
        x_u: Some(5.0),
        ..ScenarioConfig::default()
    }
}

/// 500 passive and 200 active elements, surfaces free to move.
fn placement_layout() -> ScenarioConfig {
    ScenarioConfig { n_total: 700, n_p: Some(500), n_a: Some(200), ..ScenarioConfig::default() }
}

/// Base scenario of `fig` before user overrides.
pub fn base_scenario(fig: Figure) -> ScenarioConfig {
    match fig {
        Figure::Fig3 | Figure::Fig4 => fixed_layout(),
        Figure::Fig5 | Figure::Fig6 => placement_layout(),
        Figure::Fig7 | Figure::Fig8 | Figure::Fig9 => ScenarioConfig::default(),
    }
}

/// Rows of `fig` on top of `base`, in sweep order.
pub fn reproduce(fig: Figure, base: &ScenarioConfig) -> Result<Vec<Row>> {
    let joint = Analysis::Joint(AlternatingOptions { resolution: 0.1, ..AlternatingOptions::default() });
    let place = Analysis::Place { resolution: DEFAULT_RESOLUTION };
    let n_grid = |step: f64, to: f64| linspace(step, to, (to / step).round() as usize);
    let (var, values, analyses): (SweepVar, Vec<f64>, Vec<Analysis>) = match fig {
        Figure::Fig3 => (SweepVar::N, n_grid(50.0, 1000.0), vec![Analysis::Allocate]),
        Figure::Fig4 => (SweepVar::N, n_grid(50.0, 1000.0), vec![Analysis::Allocate, Analysis::AllocateEqual]),
        Figure::Fig5 => (SweepVar::PiDbm, linspace(0.0, 20.0, 21), vec![place]),
        Figure::Fig6 => (SweepVar::PiDbm, linspace(0.0, 20.0, 11), vec![place, Analysis::PlaceMiddle]),
        Figure::Fig7 => (SweepVar::N, n_grid(100.0, 1000.0), vec![joint, Analysis::Benchmarks]),
        Figure::Fig8 => (SweepVar::PiDbm, linspace(0.0, 20.0, 11), vec![joint, Analysis::Benchmarks]),
        Figure::Fig9 => (SweepVar::PbDbm, linspace(10.0, 40.0, 13), vec![joint, Analysis::Benchmarks]),
    };
    let mut base = base.clone();
    if fig == Figure::Fig3 {
        base.scheme = None;
    }
    let per_analysis = analyses
        .iter()
        .map(|a| sweep(&base, var, &values, *a))
        .collect::<Result<Vec<_>>>()?;
    // Interleave so that each sweep point's rows stay together.
    let mut out = Vec::new();
    for v in &values {
        for rows in &per_analysis {
            out.extend(rows.iter().filter(|r| r.sweep_value == *v).cloned());
        }
    }
    if fig == Figure::Fig3 {
        out.retain(|r| r.scheme != "bhu");
    }
    Ok(out)
}
