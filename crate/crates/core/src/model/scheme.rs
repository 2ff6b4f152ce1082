use std::fmt;
use std::str::FromStr;

use crate::error::{domain, Result};
use crate::model::{CascadeGains, HybridGains, PathGains};

/// The three deployment schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeKind {
    /// BS, hybrid surface, user.
    Bhu,
    /// BS, active surface, passive surface, user.
    Bapu,
    /// BS, passive surface, active surface, user.
    Bpau,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 3] = [SchemeKind::Bhu, SchemeKind::Bapu, SchemeKind::Bpau];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeKind::Bhu => "bhu",
            SchemeKind::Bapu => "bapu",
            SchemeKind::Bpau => "bpau",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bhu" => Ok(SchemeKind::Bhu),
            "bapu" => Ok(SchemeKind::Bapu),
            "bpau" => Ok(SchemeKind::Bpau),
            other => Err(format!("unknown scheme `{other}` (expected bhu, bapu or bpau)")),
        }
    }
}

/// A scheme together with the link gains it is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Deployment {
    Bhu(HybridGains),
    Bapu(CascadeGains),
    Bpau(CascadeGains),
}

impl Deployment {
    /// Pairs a scheme with gains of the matching shape.
    pub fn new(scheme: SchemeKind, gains: PathGains) -> Result<Self> {
        match (scheme, gains) {
            (SchemeKind::Bhu, PathGains::Hybrid(g)) => Ok(Deployment::Bhu(g)),
            (SchemeKind::Bapu, PathGains::Cascade(g)) => Ok(Deployment::Bapu(g)),
            (SchemeKind::Bpau, PathGains::Cascade(g)) => Ok(Deployment::Bpau(g)),
            (s, _) => Err(domain(format!("{s} needs {} gains", if s == SchemeKind::Bhu { "single-surface" } else { "two-surface" }))),
        }
    }

    pub fn scheme(&self) -> SchemeKind {
        match self {
            Deployment::Bhu(_) => SchemeKind::Bhu,
            Deployment::Bapu(_) => SchemeKind::Bapu,
            Deployment::Bpau(_) => SchemeKind::Bpau,
        }
    }

    pub fn gains(&self) -> PathGains {
        match *self {
            Deployment::Bhu(g) => PathGains::Hybrid(g),
            Deployment::Bapu(g) | Deployment::Bpau(g) => PathGains::Cascade(g),
        }
    }
}

/// Integer split of the element budget into passive and active elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ElementSplit {
    pub n_p: u64,
    pub n_a: u64,
}

impl ElementSplit {
    pub fn new(n_p: u64, n_a: u64) -> Result<Self> {
        if n_p == 0 || n_a == 0 {
            return Err(domain(format!("split needs at least one element of each kind, got ({n_p}, {n_a})")));
        }
        Ok(Self { n_p, n_a })
    }

    /// The split with `n_p` passive elements out of `n_total`.
    pub fn with_passive(n_total: u64, n_p: u64) -> Result<Self> {
        Self::new(n_p, n_total.saturating_sub(n_p))
    }

    pub fn total(&self) -> u64 {
        self.n_p + self.n_a
    }

    pub fn relaxed(&self) -> RelaxedSplit {
        RelaxedSplit { n_p: self.n_p as f64, n_a: self.n_a as f64 }
    }
}

/// Real-valued split used by the relaxed allocation problems.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxedSplit {
    pub n_p: f64,
    pub n_a: f64,
}

impl RelaxedSplit {
    pub fn total(&self) -> f64 {
        self.n_p + self.n_a
    }
}
