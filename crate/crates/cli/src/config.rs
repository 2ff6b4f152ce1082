//! Line-oriented `key = value` scenario files.

use irs_deploy::model::units::{db_to_linear, dbm_to_watts};
use irs_deploy::{
    DoubleIrsGeometry, ElementSplit, Exponents, Heights, PowerConfig, SchemeKind, SingleIrsGeometry,
};

use crate::error::{CliError, Result};

pub const KEYS: [&str; 23] = [
    "p_b_dbm", "p_i_dbm", "noise0_dbm", "noise_r_dbm", "beta_ref_db", "exp_bi", "exp_iu", "exp_b", "exp_i",
    "exp_u", "alpha_max", "l", "h_s", "h_d", "x_bi", "x_b", "x_u", "d_bi", "d_iu", "n_total", "n_p", "n_a",
    "scheme",
];

/// A scenario in presentation units (dBm, dB, metres) with reference defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub p_b_dbm: f64,
    pub p_i_dbm: f64,
    pub noise0_dbm: f64,
    pub noise_r_dbm: f64,
    pub beta_ref_db: f64,
    pub exponents: Exponents,
    pub alpha_max: Option<f64>,
    /// BS-user horizontal distance (m).
    pub l: f64,
    pub h_s: f64,
    pub h_d: f64,
    pub x_bi: Option<f64>,
    pub x_b: Option<f64>,
    pub x_u: Option<f64>,
    pub d_bi: Option<f64>,
    pub d_iu: Option<f64>,
    pub n_total: u64,
    pub n_p: Option<u64>,
    pub n_a: Option<u64>,
    /// `None` runs all three schemes.
    pub scheme: Option<SchemeKind>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            p_b_dbm: 20.0,
            p_i_dbm: 8.0,
            noise0_dbm: -80.0,
            noise_r_dbm: -80.0,
            beta_ref_db: -43.0,
            exponents: Exponents::default(),
            alpha_max: None,
            l: 90.0,
            h_s: 10.0,
            h_d: 5.0,
            x_bi: None,
            x_b: None,
            x_u: None,
            d_bi: None,
            d_iu: None,
            n_total: 700,
            n_p: None,
            n_a: None,
            scheme: None,
        }
    }
}

/// Parses a scenario file on top of the defaults and validates the result.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut n_total_set = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(CliError::Parse { line, reason: format!("expected `key = value`, got {content:?}") });
        };
        let key = key.trim();
        n_total_set |= key == "n_total";
        cfg.set(key, value.trim()).map_err(|reason| CliError::Parse { line, reason })?;
    }
    cfg.reconcile_split(n_total_set)?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    /// Applies `key=value` overrides, then re-validates.
    pub fn with_overrides<'a>(mut self, pairs: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut n_total_set = false;
        for pair in pairs {
            let (key, value) =
                pair.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value, got {pair:?}")))?;
            let key = key.trim();
            n_total_set |= key == "n_total";
            self.set(key, value.trim()).map_err(CliError::Usage)?;
        }
        self.reconcile_split(n_total_set)?;
        self.validate()?;
        Ok(self)
    }

    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = || value.parse::<f64>().map_err(|_| format!("{key}: expected a number, got {value:?}"));
        let count = || value.parse::<u64>().map_err(|_| format!("{key}: expected a non-negative integer, got {value:?}"));
        match key {
            "p_b_dbm" => self.p_b_dbm = num()?,
            "p_i_dbm" => self.p_i_dbm = num()?,
            "noise0_dbm" => self.noise0_dbm = num()?,
            "noise_r_dbm" => self.noise_r_dbm = num()?,
            "beta_ref_db" => self.beta_ref_db = num()?,
            "exp_bi" => self.exponents.bi = num()?,
            "exp_iu" => self.exponents.iu = num()?,
            "exp_b" => self.exponents.b = num()?,
            "exp_i" => self.exponents.i = num()?,
            "exp_u" => self.exponents.u = num()?,
            "alpha_max" => self.alpha_max = Some(num()?),
            "l" => self.l = num()?,
            "h_s" => self.h_s = num()?,
            "h_d" => self.h_d = num()?,
            "x_bi" => self.x_bi = Some(num()?),
            "x_b" => self.x_b = Some(num()?),
            "x_u" => self.x_u = Some(num()?),
            "d_bi" => self.d_bi = Some(num()?),
            "d_iu" => self.d_iu = Some(num()?),
            "n_total" => self.n_total = count()?,
            "n_p" => self.n_p = Some(count()?),
            "n_a" => self.n_a = Some(count()?),
            "scheme" => {
                self.scheme = match value {
                    "all" => None,
                    s => Some(s.parse().map_err(|_| format!("scheme: expected bhu, bapu, bpau or all, got {s:?}"))?),
                }
            }
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Fills in whichever of `n_total`, `n_p`, `n_a` follows from the others.
    fn reconcile_split(&mut self, n_total_set: bool) -> Result<()> {
        match (self.n_p, self.n_a) {
            (Some(p), Some(a)) if !n_total_set => self.n_total = p + a,
            (Some(p), Some(a)) if p + a != self.n_total => {
                return Err(invalid("n_total", format!("{} differs from n_p + n_a = {}", self.n_total, p + a)));
            }
            (Some(p), None) if p < self.n_total => self.n_a = Some(self.n_total - p),
            (None, Some(a)) if a < self.n_total => self.n_p = Some(self.n_total - a),
            (Some(_), None) => return Err(invalid("n_p", format!("must be below n_total = {}", self.n_total))),
            (None, Some(_)) => return Err(invalid("n_a", format!("must be below n_total = {}", self.n_total))),
            _ => {}
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.power().validate().map_err(|e| match e {
            irs_deploy::Error::InvalidConfig { field, reason } => invalid(presentation_name(field), reason),
            other => CliError::Model(other),
        })?;
        for (name, v) in [("p_b_dbm", self.p_b_dbm), ("noise0_dbm", self.noise0_dbm), ("noise_r_dbm", self.noise_r_dbm)] {
            if !v.is_finite() {
                return Err(invalid(name, format!("must be finite, got {v}")));
            }
        }
        if self.p_i_dbm.is_nan() || self.p_i_dbm == f64::INFINITY {
            return Err(invalid("p_i_dbm", format!("must be finite or -inf, got {}", self.p_i_dbm)));
        }
        if !(self.l > 0.0 && self.l.is_finite()) {
            return Err(invalid("l", format!("must be positive, got {}", self.l)));
        }
        for (name, v) in [("h_s", self.h_s), ("h_d", self.h_d)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be non-negative, got {v}")));
            }
        }
        for (name, v) in [("x_bi", self.x_bi), ("x_b", self.x_b), ("x_u", self.x_u)] {
            if let Some(v) = v {
                if !(0.0..=self.l).contains(&v) {
                    return Err(invalid(name, format!("must lie in [0, {}], got {v}", self.l)));
                }
            }
        }
        if let (Some(b), Some(u)) = (self.x_b, self.x_u) {
            if b + u >= self.l {
                return Err(invalid("x_u", format!("x_b + x_u = {} must stay below l = {}", b + u, self.l)));
            }
        }
        for (name, v) in [("d_bi", self.d_bi), ("d_iu", self.d_iu)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(name, format!("must be positive, got {v}")));
                }
            }
        }
        if self.d_bi.is_some() != self.d_iu.is_some() {
            return Err(invalid("d_iu", "d_bi and d_iu must be given together".into()));
        }
        if self.n_total < 2 {
            return Err(invalid("n_total", format!("must be at least 2, got {}", self.n_total)));
        }
        for (name, v) in [("n_p", self.n_p), ("n_a", self.n_a)] {
            if v == Some(0) {
                return Err(invalid(name, "must be at least 1".into()));
            }
        }
        Ok(())
    }

    /// Linear-unit power settings.
    pub fn power(&self) -> PowerConfig {
        PowerConfig {
            p_b: dbm_to_watts(self.p_b_dbm),
            p_i: dbm_to_watts(self.p_i_dbm),
            sigma0_sq: dbm_to_watts(self.noise0_dbm),
            sigma_r_sq: dbm_to_watts(self.noise_r_dbm),
            beta_ref: db_to_linear(self.beta_ref_db),
            exponents: self.exponents,
            alpha_max: self.alpha_max,
        }
    }

    pub fn heights(&self) -> Heights {
        Heights { h_s: self.h_s, h_d: self.h_d }
    }

    pub fn split(&self) -> Option<ElementSplit> {
        Some(ElementSplit { n_p: self.n_p?, n_a: self.n_a? })
    }

    /// Split given in the file, or an error naming what is missing.
    pub fn require_split(&self) -> Result<ElementSplit> {
        self.split().ok_or_else(|| invalid("n_p", "this analysis needs n_p or n_a".into()))
    }

    /// Fixed hybrid surface from distances or from `x_bi`.
    pub fn hybrid_geometry(&self) -> Option<SingleIrsGeometry> {
        if let (Some(a), Some(b)) = (self.d_bi, self.d_iu) {
            return Some(SingleIrsGeometry::from_distances(a, b));
        }
        Some(SingleIrsGeometry { l: self.l, x_bi: self.x_bi?, h_s: self.h_s, override_d_bi: None, override_d_iu: None })
    }

    /// Fixed two-surface layout from `x_b` and `x_u`.
    pub fn double_geometry(&self) -> Option<DoubleIrsGeometry> {
        Some(DoubleIrsGeometry { l: self.l, x_b: self.x_b?, x_u: self.x_u?, h_d: self.h_d })
    }

    pub fn schemes(&self) -> Vec<SchemeKind> {
        self.scheme.map_or_else(|| SchemeKind::ALL.to_vec(), |s| vec![s])
    }
}

fn invalid(field: &str, reason: String) -> CliError {
    CliError::Invalid { field: field.to_string(), reason }
}

fn presentation_name(field: &str) -> &str {
    match field {
        "p_b" => "p_b_dbm",
        "p_i" => "p_i_dbm",
        "sigma0_sq" => "noise0_dbm",
        "sigma_r_sq" => "noise_r_dbm",
        "beta_ref" => "beta_ref_db",
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse_config("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.power(), PowerConfig::default());
    }

    #[test]
    fn override_one_key() {
        let cfg = parse_config("p_b_dbm = 30\n").unwrap();
        assert!((cfg.power().p_b - 1.0).abs() < 1e-12);
        assert_eq!(ScenarioConfig { p_b_dbm: 20.0, ..cfg }, ScenarioConfig::default());
    }

    #[test]
    fn comments_and_blank_lines() {
        let cfg = parse_config("# scenario\n\n  l = 120   # metres\nscheme = bapu\n").unwrap();
        assert_eq!(cfg.l, 120.0);
        assert_eq!(cfg.scheme, Some(SchemeKind::Bapu));
    }

    #[test]
    fn zero_elements_rejected() {
        match parse_config("n_total = 0") {
            Err(CliError::Invalid { field, .. }) => assert_eq!(field, "n_total"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn malformed_lines_report_line_numbers() {
        match parse_config("l = 90\nthis is not a pair\n") {
            Err(CliError::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        match parse_config("\n\nfrequency = 3.5e9") {
            Err(CliError::Parse { line, reason }) => {
                assert_eq!(line, 3);
                assert!(reason.contains("unknown key"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config("l = ninety"), Err(CliError::Parse { line: 1, .. })));
    }

    #[test]
    fn split_is_completed() {
        let cfg = parse_config("n_p = 67\nn_a = 33").unwrap();
        assert_eq!(cfg.n_total, 100);
        let cfg = parse_config("n_total = 100\nn_p = 67").unwrap();
        assert_eq!(cfg.split(), Some(ElementSplit { n_p: 67, n_a: 33 }));
        assert!(parse_config("n_total = 100\nn_p = 60\nn_a = 30").is_err());
        assert!(parse_config("n_total = 100\nn_p = 100").is_err());
    }

    #[test]
    fn validation_names_the_field() {
        let cases = [
            ("beta_ref_db = 3", "beta_ref_db"),
            ("exp_i = 0.5", "exp_i"),
            ("x_bi = 200", "x_bi"),
            ("x_b = 50\nx_u = 50", "x_u"),
            ("h_d = -1", "h_d"),
            ("d_bi = 80", "d_iu"),
            ("alpha_max = 0", "alpha_max"),
        ];
        for (text, want) in cases {
            match parse_config(text) {
                Err(CliError::Invalid { field, .. }) => assert_eq!(field, want, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn silent_amplifier_allowed() {
        let cfg = parse_config("p_i_dbm = -inf").unwrap();
        assert_eq!(cfg.power().p_i, 0.0);
    }

    #[test]
    fn overrides_apply_after_file() {
        let cfg = parse_config("n_total = 100").unwrap().with_overrides(["n_total=600", "scheme=bpau"]).unwrap();
        assert_eq!(cfg.n_total, 600);
        assert_eq!(cfg.schemes(), vec![SchemeKind::Bpau]);
        assert!(matches!(cfg.clone().with_overrides(["nope"]), Err(CliError::Usage(_))));
    }

    #[test]
    fn geometry_sources() {
        let cfg = parse_config("d_bi = 80\nd_iu = 50\nx_b = 5\nx_u = 5").unwrap();
        assert_eq!(cfg.hybrid_geometry().unwrap().distances(), (80.0, 50.0));
        assert_eq!(cfg.double_geometry().unwrap().distances().1, 80.0);
        assert!(ScenarioConfig::default().hybrid_geometry().is_none());
    }
}
