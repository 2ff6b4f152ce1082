//! Physical model: units, power budget, geometry, path gains, array responses.

mod array;
mod geometry;
mod power;
mod scheme;
pub mod units;

pub use array::{steering_vector, ArrayLayout, DEFAULT_WAVELENGTH};
pub use geometry::{
    gains_from_geometry, path_gain, CascadeGains, DoubleIrsGeometry, Geometry, HybridGains,
    PathGains, SingleIrsGeometry,
};
pub use power::{Exponents, PowerConfig};
pub use scheme::{Deployment, ElementSplit, RelaxedSplit, SchemeKind};
