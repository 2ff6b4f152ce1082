//! Rate analysis for wireless links assisted by reflecting surfaces.
//!
//! Three deployments are modeled: a single hybrid surface mixing passive and
//! active elements, and two separate surfaces traversed active-first or
//! passive-first. The crate provides closed-form SNRs, element allocation,
//! placement, joint optimization, scaling analysis, and brute-force or
//! vector-channel oracles for each closed form.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod asymptotics;
pub mod error;
pub mod joint;
pub mod model;
pub mod oracle;
pub mod placement;
pub mod snr;

pub use error::{Error, Result};
pub use model::*;
pub use oracle::{vector_snr_oracle, OracleReport, VectorOracle};
pub use snr::{amp_factor, check_favorable_power, compare_pair, snr_closed_form, DerivedConstants, EvalResult};
pub use joint::{alternate_optimize, compare_all, joint_brute_force, AlternatingOptions, Candidate, JointOutcome};
pub use placement::{place, Heights, PlacementSolution};
pub use asymptotics::{asymptotic_snr, estimate_scaling_order, AsymptoticQuery, ScalingVariable};
