use crate::error::{domain, Error, Result};
use crate::model::PowerConfig;

/// Squared amplitude gain `beta_ref / d^exponent` of a line-of-sight link.
pub fn path_gain(d: f64, exponent: f64, beta_ref: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(domain(format!("link distance must be positive, got {d}")));
    }
    Ok(beta_ref / d.powf(exponent))
}

fn checked_gain(name: &'static str, g: f64) -> Result<f64> {
    if g > 0.0 && g <= 1.0 {
        Ok(g)
    } else {
        Err(domain(format!("{name} gain must lie in (0, 1], got {g}")))
    }
}

/// One hybrid surface between BS and user.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleIrsGeometry {
    /// Horizontal BS-user separation (m).
    pub l: f64,
    /// Horizontal BS-surface distance (m).
    pub x_bi: f64,
    /// Surface height (m).
    pub h_s: f64,
    pub override_d_bi: Option<f64>,
    pub override_d_iu: Option<f64>,
}

impl SingleIrsGeometry {
    pub fn new(l: f64, x_bi: f64, h_s: f64) -> Result<Self> {
        if !(l >= 0.0 && l.is_finite()) {
            return Err(Error::InvalidConfig { field: "l", reason: format!("must be non-negative, got {l}") });
        }
        if !(0.0..=l).contains(&x_bi) {
            return Err(Error::InvalidConfig { field: "x_bi", reason: format!("must lie in [0, {l}], got {x_bi}") });
        }
        if !(h_s >= 0.0 && h_s.is_finite()) {
            return Err(Error::InvalidConfig { field: "h_s", reason: format!("must be non-negative, got {h_s}") });
        }
        Ok(Self { l, x_bi, h_s, override_d_bi: None, override_d_iu: None })
    }

    /// A geometry given directly by its two link distances.
    pub fn from_distances(d_bi: f64, d_iu: f64) -> Self {
        Self { l: 0.0, x_bi: 0.0, h_s: 0.0, override_d_bi: Some(d_bi), override_d_iu: Some(d_iu) }
    }

    /// `(d_BI, d_IU)`.
    pub fn distances(&self) -> (f64, f64) {
        let d_bi = self.override_d_bi.unwrap_or_else(|| self.x_bi.hypot(self.h_s));
        let d_iu = self.override_d_iu.unwrap_or_else(|| (self.l - self.x_bi).hypot(self.h_s));
        (d_bi, d_iu)
    }

    pub fn gains(&self, cfg: &PowerConfig) -> Result<HybridGains> {
        let (d_bi, d_iu) = self.distances();
        let e = &cfg.exponents;
        HybridGains::new(path_gain(d_bi, e.bi, cfg.beta_ref)?, path_gain(d_iu, e.iu, cfg.beta_ref)?)
    }
}

/// Two surfaces on the BS-user line at a common height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoubleIrsGeometry {
    /// Horizontal BS-user separation (m).
    pub l: f64,
    /// Horizontal BS to first-surface distance (m).
    pub x_b: f64,
    /// Horizontal second-surface to user distance (m).
    pub x_u: f64,
    /// Height of both surfaces (m).
    pub h_d: f64,
}

impl DoubleIrsGeometry {
    pub fn new(l: f64, x_b: f64, x_u: f64, h_d: f64) -> Result<Self> {
        let bad = |field, v: f64| Error::InvalidConfig { field, reason: format!("must be non-negative, got {v}") };
        if !(l >= 0.0 && l.is_finite()) {
            return Err(bad("l", l));
        }
        if !(x_b >= 0.0) {
            return Err(bad("x_b", x_b));
        }
        if !(x_u >= 0.0) {
            return Err(bad("x_u", x_u));
        }
        if !(h_d >= 0.0 && h_d.is_finite()) {
            return Err(bad("h_d", h_d));
        }
        // Tolerate rounding when grid points land on x_b + x_u = L.
        if x_b + x_u > l * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig {
                field: "x_b",
                reason: format!("x_b + x_u = {} exceeds l = {l}", x_b + x_u),
            });
        }
        Ok(Self { l, x_b, x_u, h_d })
    }

    /// `(d_B, d_I, d_U)`.
    pub fn distances(&self) -> (f64, f64, f64) {
        (
            self.x_b.hypot(self.h_d),
            (self.l - self.x_b - self.x_u).max(0.0),
            self.x_u.hypot(self.h_d),
        )
    }

    pub fn gains(&self, cfg: &PowerConfig) -> Result<CascadeGains> {
        let (d_b, d_i, d_u) = self.distances();
        if d_i <= 0.0 {
            return Err(domain("the two surfaces are co-located (d_I = 0)"));
        }
        let e = &cfg.exponents;
        CascadeGains::new(
            path_gain(d_b, e.b, cfg.beta_ref)?,
            path_gain(d_i, e.i, cfg.beta_ref)?,
            path_gain(d_u, e.u, cfg.beta_ref)?,
        )
    }
}

/// Squared gains of the BS-surface and surface-user links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridGains {
    pub bi: f64,
    pub iu: f64,
}

impl HybridGains {
    pub fn new(bi: f64, iu: f64) -> Result<Self> {
        Ok(Self { bi: checked_gain("BS-surface", bi)?, iu: checked_gain("surface-user", iu)? })
    }
}

/// Squared gains of the BS-first, inter-surface and second-user links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CascadeGains {
    pub b: f64,
    pub i: f64,
    pub u: f64,
}

impl CascadeGains {
    pub fn new(b: f64, i: f64, u: f64) -> Result<Self> {
        Ok(Self {
            b: checked_gain("BS-surface", b)?,
            i: checked_gain("inter-surface", i)?,
            u: checked_gain("surface-user", u)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathGains {
    Hybrid(HybridGains),
    Cascade(CascadeGains),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Geometry {
    Single(SingleIrsGeometry),
    Double(DoubleIrsGeometry),
}

pub fn gains_from_geometry(geom: &Geometry, cfg: &PowerConfig) -> Result<PathGains> {
    match geom {
        Geometry::Single(g) => g.gains(cfg).map(PathGains::Hybrid),
        Geometry::Double(g) => g.gains(cfg).map(PathGains::Cascade),
    }
}
