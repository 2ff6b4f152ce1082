//! Conversions between logarithmic and linear units.

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(v: f64) -> f64 {
    10f64.powf(v / 10.0) * 1e-3
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * (w * 1e3).log10()
}

/// Converts a dB ratio to a linear ratio.
pub fn db_to_linear(v: f64) -> f64 {
    10f64.powf(v / 10.0)
}

/// Achievable rate in bits/s/Hz for a linear SNR.
pub fn rate(snr: f64) -> f64 {
    snr.ln_1p() / std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        ((a - b) / b).abs() < 1e-12
    }

    #[test]
    fn dbm_examples() {
        assert!(close(dbm_to_watts(0.0), 1e-3));
        assert!(close(dbm_to_watts(20.0), 0.1));
        assert!(close(dbm_to_watts(-80.0), 1e-11));
        assert!(close(dbm_to_watts(30.0), 1.0));
    }

    #[test]
    fn round_trip() {
        for v in [-90.0, -3.5, 0.0, 8.0, 47.0] {
            assert!((watts_to_dbm(dbm_to_watts(v)) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_matches_log2() {
        for g in [0.0, 1e-9, 0.5, 3.0, 1e12] {
            assert!((rate(g) - (1.0 + g).log2()).abs() < 1e-12);
        }
    }
}
