//! CSV rows shared by every analysis.

use std::io::Write;

use crate::error::Result;

pub const HEADER: [&str; 11] = [
    "sweep_value",
    "scheme",
    "n_p",
    "n_a",
    "x_star_m",
    "snr_linear",
    "rate_bps_hz",
    "oracle_rate_bps_hz",
    "assumptions_ok",
    "oracle_n_p",
    "oracle_x_star_m",
];

/// One scheme at one sweep point. `x_star_m` is the BS-to-active (or hybrid) surface distance.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub scheme: String,
    pub n_p: Option<u64>,
    pub n_a: Option<u64>,
    pub x_star_m: Option<f64>,
    pub snr: f64,
    pub rate: f64,
    pub oracle_rate: Option<f64>,
    pub assumptions_ok: Option<bool>,
    pub oracle_n_p: Option<u64>,
    pub oracle_x_star_m: Option<f64>,
}

impl Row {
    pub fn new(sweep_value: f64, scheme: impl Into<String>, snr: f64, rate: f64) -> Self {
        Self {
            sweep_value,
            scheme: scheme.into(),
            n_p: None,
            n_a: None,
            x_star_m: None,
            snr,
            rate,
            oracle_rate: None,
            assumptions_ok: None,
            oracle_n_p: None,
            oracle_x_star_m: None,
        }
    }

    fn record(&self) -> [String; 11] {
        let opt_num = |v: Option<f64>| v.map(fmt_num).unwrap_or_default();
        let opt_int = |v: Option<u64>| v.map(|n| n.to_string()).unwrap_or_default();
        [
            fmt_num(self.sweep_value),
            self.scheme.clone(),
            opt_int(self.n_p),
            opt_int(self.n_a),
            opt_num(self.x_star_m),
            fmt_num(self.snr),
            fmt_num(self.rate),
            opt_num(self.oracle_rate),
            self.assumptions_ok.map(|b| b.to_string()).unwrap_or_default(),
            opt_int(self.oracle_n_p),
            opt_num(self.oracle_x_star_m),
        ]
    }
}

/// Twelve significant digits, plain notation for moderate magnitudes, trailing zeros dropped.
pub fn fmt_num(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let exp = v.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_fraction(format!("{v:.decimals$}"))
    } else {
        let s = format!("{v:.11e}");
        let (mantissa, exponent) = s.split_once('e').expect("scientific format");
        format!("{}e{exponent}", trim_fraction(mantissa.to_string()))
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// Writes the header and rows as LF-terminated CSV.
pub fn write_rows(out: impl Write, rows: &[Row]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}

/// Writes an arbitrary table, formatting nothing.
pub fn write_table(out: impl Write, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formatting() {
        assert_eq!(fmt_num(100.0), "100");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(-2.25), "-2.25");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(123456.789012345), "123456.789012");
        assert_eq!(fmt_num(1e-9), "1e-9");
        assert_eq!(fmt_num(6.02214076e23), "6.02214076e23");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
    }

    #[test]
    fn twelve_digits_round_trip_at_test_tolerance() {
        for v in [std::f64::consts::PI, 1.2345678901234e-7, 9.87654321e15, 15.326342117] {
            let back: f64 = fmt_num(v).parse().unwrap();
            assert!((back - v).abs() <= 1e-11 * v.abs());
        }
    }

    #[test]
    fn csv_layout() {
        let mut row = Row::new(100.0, "bapu", 1234.5, 10.27);
        row.n_p = Some(67);
        row.n_a = Some(33);
        row.assumptions_ok = Some(true);
        let mut buf = Vec::new();
        write_rows(&mut buf, &[row]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), HEADER.join(","));
        assert_eq!(lines.next().unwrap(), "100,bapu,67,33,,1234.5,10.27,,true,,");
        assert!(!text.contains('\r'));
    }
}
