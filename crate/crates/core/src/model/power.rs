use crate::error::{Error, Result};
use crate::model::units::{db_to_linear, dbm_to_watts};

/// Path-loss exponents of the five links.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    /// BS to hybrid surface.
    pub bi: f64,
    /// Hybrid surface to user.
    pub iu: f64,
    /// BS to the first of two surfaces.
    pub b: f64,
    /// Between the two surfaces.
    pub i: f64,
    /// Second surface to user.
    pub u: f64,
}

impl Default for Exponents {
    fn default() -> Self {
        Self { bi: 2.0, iu: 2.0, b: 2.0, i: 2.0, u: 2.0 }
    }
}

impl Exponents {
    fn all(&self) -> [(&'static str, f64); 5] {
        [
            ("exp_bi", self.bi),
            ("exp_iu", self.iu),
            ("exp_b", self.b),
            ("exp_i", self.i),
            ("exp_u", self.u),
        ]
    }
}

/// Power budget and noise levels, all in linear units (watts).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerConfig {
    /// BS transmit power.
    pub p_b: f64,
    /// Amplification power budget of the active elements.
    pub p_i: f64,
    /// Receiver noise power.
    pub sigma0_sq: f64,
    /// Amplification noise power per active element.
    pub sigma_r_sq: f64,
    /// Path gain at the 1 m reference distance.
    pub beta_ref: f64,
    pub exponents: Exponents,
    /// Optional cap on the per-element amplitude.
    pub alpha_max: Option<f64>,
}

impl Default for PowerConfig {
    /// 20 dBm transmit power, 8 dBm amplification budget, -80 dBm noise, -43 dB reference gain.
    fn default() -> Self {
        Self {
            p_b: dbm_to_watts(20.0),
            p_i: dbm_to_watts(8.0),
            sigma0_sq: dbm_to_watts(-80.0),
            sigma_r_sq: dbm_to_watts(-80.0),
            beta_ref: db_to_linear(-43.0),
            exponents: Exponents::default(),
            alpha_max: None,
        }
    }
}

impl PowerConfig {
    /// Builds a validated config with default exponents and no amplitude cap.
    pub fn new(p_b: f64, p_i: f64, sigma0_sq: f64, sigma_r_sq: f64, beta_ref: f64) -> Result<Self> {
        let cfg = Self {
            p_b,
            p_i,
            sigma0_sq,
            sigma_r_sq,
            beta_ref,
            exponents: Exponents::default(),
            alpha_max: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every field invariant.
    ///
    /// The amplification budget may be zero, which reduces every active
    /// surface to a silent one.
    pub fn validate(&self) -> Result<()> {
        positive("p_b", self.p_b)?;
        positive("sigma0_sq", self.sigma0_sq)?;
        positive("sigma_r_sq", self.sigma_r_sq)?;
        if !(self.p_i.is_finite() && self.p_i >= 0.0) {
            return Err(invalid("p_i", format!("must be finite and non-negative, got {}", self.p_i)));
        }
        if !(self.beta_ref > 0.0 && self.beta_ref <= 1.0) {
            return Err(invalid("beta_ref", format!("must lie in (0, 1], got {}", self.beta_ref)));
        }
        for (name, e) in self.exponents.all() {
            if !(e.is_finite() && e >= 1.0) {
                return Err(invalid(name, format!("must be at least 1, got {e}")));
            }
        }
        if let Some(a) = self.alpha_max {
            positive("alpha_max", a)?;
        }
        Ok(())
    }

    /// `sigma0^2 * P_B`.
    pub fn c9(&self) -> f64 {
        self.sigma0_sq * self.p_b
    }

    /// `sigma_r^2 * P_I`.
    pub fn c10(&self) -> f64 {
        self.sigma_r_sq * self.p_i
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be finite and positive, got {v}")))
    }
}

fn invalid(field: &'static str, reason: String) -> Error {
    Error::InvalidConfig { field, reason }
}
