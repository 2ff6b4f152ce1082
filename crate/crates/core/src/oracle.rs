//! Vector-channel SNR evaluation used to check the closed forms.
//!
//! Channels are built from steering vectors at pseudo-random angles, the
//! surfaces apply phase-alignment beamforming with a common active amplitude,
//! and the SNR is evaluated from the raw signal and noise quotients.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::Result;
use crate::model::{steering_vector, ArrayLayout, Deployment, ElementSplit, PowerConfig};
use crate::snr::amp_factor;

/// SNR and amplification power observed in the vector model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleReport {
    pub snr: f64,
    /// Total power radiated by the active elements; equals `P_I` at the optimal amplitude.
    pub amplification_power: f64,
}

/// Vector-model evaluator with a deterministic angle stream.
#[derive(Debug, Clone, Copy)]
pub struct VectorOracle {
    seed: u64,
    passive: Option<ArrayLayout>,
    active: Option<ArrayLayout>,
}

type CVec = Vec<Complex64>;

struct Angles(ChaCha8Rng);

impl Angles {
    fn next(&mut self) -> (f64, f64) {
        let az = self.0.gen_range(-FRAC_PI_2..FRAC_PI_2);
        let el = self.0.gen_range(0.0..PI);
        (az, el)
    }

    fn phase(&mut self) -> Complex64 {
        Complex64::from_polar(1.0, self.0.gen_range(-PI..PI))
    }

    /// Link of squared gain `gain` arriving at (or leaving) `layout`.
    fn link(&mut self, gain: f64, layout: &ArrayLayout) -> CVec {
        let (az, el) = self.next();
        let c = self.phase() * gain.sqrt();
        steering_vector(az, el, layout).into_iter().map(|z| c * z).collect()
    }

    fn steer(&mut self, layout: &ArrayLayout) -> CVec {
        let (az, el) = self.next();
        steering_vector(az, el, layout)
    }
}

/// Phases that make `conj(out_n) * e^{j phi_n} * inc_n` real and positive.
fn align(out: &[Complex64], inc: &[Complex64], amplitude: f64) -> CVec {
    out.iter()
        .zip(inc)
        .map(|(o, i)| Complex64::from_polar(amplitude, o.arg() - i.arg()))
        .collect()
}

/// `x^H diag(psi) y`.
fn reflect(x: &[Complex64], psi: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(psi).zip(y).map(|((a, p), b)| a.conj() * p * b).sum()
}

/// Squared norm of `x^H diag(psi)`.
fn row_energy(x: &[Complex64], psi: &[Complex64]) -> f64 {
    x.iter().zip(psi).map(|(a, p)| (a.conj() * p).norm_sqr()).sum()
}

fn energy(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Dense rank-one inter-surface channel `gain * a_r a_t^H`, row-major.
struct RankOne {
    rows: usize,
    cols: usize,
    data: CVec,
}

impl RankOne {
    fn new(coef: Complex64, a_r: &[Complex64], a_t: &[Complex64]) -> Self {
        let data = a_r.iter().flat_map(|r| a_t.iter().map(move |t| coef * r * t.conj())).collect();
        Self { rows: a_r.len(), cols: a_t.len(), data }
    }

    /// `H x`.
    fn apply(&self, x: &[Complex64]) -> CVec {
        (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].iter().zip(x).map(|(h, v)| h * v).sum())
            .collect()
    }

    /// `y^H H` as a row vector.
    fn left(&self, y: &[Complex64]) -> CVec {
        (0..self.cols)
            .map(|c| (0..self.rows).map(|r| y[r].conj() * self.data[r * self.cols + c]).sum::<Complex64>().conj())
            .collect()
    }
}

impl VectorOracle {
    pub fn new(seed: u64) -> Self {
        Self { seed, passive: None, active: None }
    }

    /// Overrides the default linear layouts; each must match its sub-surface size.
    pub fn with_layouts(mut self, passive: ArrayLayout, active: ArrayLayout) -> Self {
        self.passive = Some(passive);
        self.active = Some(active);
        self
    }

    pub fn evaluate(&self, cfg: &PowerConfig, dep: &Deployment, split: ElementSplit) -> Result<OracleReport> {
        let alpha = amp_factor(cfg, dep, split)?;
        let lp = self.passive.unwrap_or_else(|| ArrayLayout::linear(split.n_p as usize));
        let la = self.active.unwrap_or_else(|| ArrayLayout::linear(split.n_a as usize));
        assert_eq!(lp.len() as u64, split.n_p, "passive layout size mismatch");
        assert_eq!(la.len() as u64, split.n_a, "active layout size mismatch");
        let mut rng = Angles(ChaCha8Rng::seed_from_u64(self.seed));
        let PowerConfig { p_b, sigma0_sq: s0, sigma_r_sq: sr, .. } = *cfg;

        let (signal, amp_noise, amp_power) = match dep {
            Deployment::Bhu(g) => {
                // Both sub-surfaces share the surface position, hence the link directions.
                let (az1, el1) = rng.next();
                let (az2, el2) = rng.next();
                let (p1, p2) = (rng.phase() * g.bi.sqrt(), rng.phase() * g.iu.sqrt());
                let chan = |az, el, c: Complex64, l: &ArrayLayout| -> CVec {
                    steering_vector(az, el, l).into_iter().map(|z| c * z).collect()
                };
                let bi_p = chan(az1, el1, p1, &lp);
                let iu_p = chan(az2, el2, p2, &lp);
                let bi_a = chan(az1, el1, p1, &la);
                let iu_a = chan(az2, el2, p2, &la);
                let psi_p = align(&iu_p, &bi_p, 1.0);
                let psi_a = align(&iu_a, &bi_a, alpha);
                let s = reflect(&iu_a, &psi_a, &bi_a) + reflect(&iu_p, &psi_p, &bi_p);
                let forwarded: CVec = psi_a.iter().zip(&bi_a).map(|(p, h)| p * h).collect();
                (s, row_energy(&iu_a, &psi_a), p_b * energy(&forwarded) + sr * energy(&psi_a))
            }
            Deployment::Bapu(g) => {
                let h_ba = rng.link(g.b, &la);
                let a_r = rng.steer(&lp);
                let a_t = rng.steer(&la);
                let h_ap = RankOne::new(rng.phase() * g.i.sqrt(), &a_r, &a_t);
                let h_pu = rng.link(g.u, &lp);
                let psi_a = align(&a_t, &h_ba, alpha);
                let psi_p = align(&h_pu, &a_r, 1.0);
                // Row vector h_PU^H Psi_p H_AP, stored conjugated.
                let pu_p: CVec = h_pu.iter().zip(&psi_p).map(|(h, p)| (h.conj() * p).conj()).collect();
                let back = h_ap.left(&pu_p);
                let s = reflect(&back, &psi_a, &h_ba);
                let forwarded: CVec = psi_a.iter().zip(&h_ba).map(|(p, h)| p * h).collect();
                (s, row_energy(&back, &psi_a), p_b * energy(&forwarded) + sr * energy(&psi_a))
            }
            Deployment::Bpau(g) => {
                let h_bp = rng.link(g.b, &lp);
                let a_r = rng.steer(&la);
                let a_t = rng.steer(&lp);
                let h_pa = RankOne::new(rng.phase() * g.i.sqrt(), &a_r, &a_t);
                let h_au = rng.link(g.u, &la);
                let psi_p = align(&a_t, &h_bp, 1.0);
                let psi_a = align(&h_au, &a_r, alpha);
                let after_p: CVec = psi_p.iter().zip(&h_bp).map(|(p, h)| p * h).collect();
                let incident = h_pa.apply(&after_p);
                let s = reflect(&h_au, &psi_a, &incident);
                let forwarded: CVec = psi_a.iter().zip(&incident).map(|(p, h)| p * h).collect();
                (s, row_energy(&h_au, &psi_a), p_b * energy(&forwarded) + sr * energy(&psi_a))
            }
        };
        Ok(OracleReport { snr: p_b * signal.norm_sqr() / (sr * amp_noise + s0), amplification_power: amp_power })
    }
}

/// Vector-model SNR with default linear layouts.
pub fn vector_snr_oracle(cfg: &PowerConfig, dep: &Deployment, split: ElementSplit, angle_seed: u64) -> Result<f64> {
    VectorOracle::new(angle_seed).evaluate(cfg, dep, split).map(|r| r.snr)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::units::dbm_to_watts;
    use crate::model::{CascadeGains, DoubleIrsGeometry, HybridGains, SingleIrsGeometry};
    use crate::snr::snr_closed_form;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn matches_reference_split() {
        let cfg = PowerConfig::default();
        let c = DoubleIrsGeometry::new(90.0, 5.0, 5.0, 5.0).unwrap().gains(&cfg).unwrap();
        let s = ElementSplit::new(67, 33).unwrap();
        let d = Deployment::Bapu(c);
        let want = snr_closed_form(&cfg, &d, s).unwrap().snr;
        assert!(rel(vector_snr_oracle(&cfg, &d, s, 7).unwrap(), want) < 1e-9);
    }

    #[test]
    fn seed_invariance() {
        let cfg = PowerConfig::default();
        let h = SingleIrsGeometry::from_distances(80.0, 50.0).gains(&cfg).unwrap();
        let d = Deployment::Bhu(h);
        let s = ElementSplit::new(50, 25).unwrap();
        let a = vector_snr_oracle(&cfg, &d, s, 1).unwrap();
        let b = vector_snr_oracle(&cfg, &d, s, 99).unwrap();
        assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn planar_layouts_agree() {
        let cfg = PowerConfig::default();
        let c = DoubleIrsGeometry::new(90.0, 5.0, 5.0, 5.0).unwrap().gains(&cfg).unwrap();
        let s = ElementSplit::new(24, 12).unwrap();
        for d in [Deployment::Bapu(c), Deployment::Bpau(c)] {
            let r = VectorOracle::new(3)
                .with_layouts(ArrayLayout::planar(6, 4), ArrayLayout::planar(3, 4))
                .evaluate(&cfg, &d, s)
                .unwrap();
            assert!(rel(r.snr, snr_closed_form(&cfg, &d, s).unwrap().snr) < 1e-9);
        }
    }

    fn gain() -> impl Strategy<Value = f64> {
        (-120.0f64..-40.0).prop_map(|db| 10f64.powf(db / 10.0))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn oracle_matches_and_spends_budget(
            pb in 0.0f64..40.0, pi in -10.0f64..30.0, s0 in -100.0f64..-70.0, sr in -100.0f64..-70.0,
            g1 in gain(), g2 in gain(), g3 in gain(), n_p in 1u64..80, n_a in 1u64..80, seed in any::<u64>(),
        ) {
            let cfg = PowerConfig {
                p_b: dbm_to_watts(pb), p_i: dbm_to_watts(pi),
                sigma0_sq: dbm_to_watts(s0), sigma_r_sq: dbm_to_watts(sr), ..PowerConfig::default()
            };
            let s = ElementSplit::new(n_p, n_a).unwrap();
            let c = CascadeGains { b: g1, i: g2, u: g3 };
            for d in [Deployment::Bhu(HybridGains { bi: g1, iu: g3 }), Deployment::Bapu(c), Deployment::Bpau(c)] {
                let r = VectorOracle::new(seed).evaluate(&cfg, &d, s).unwrap();
                prop_assert!(rel(r.snr, snr_closed_form(&cfg, &d, s).unwrap().snr) < 1e-9);
                prop_assert!(rel(r.amplification_power, cfg.p_i) < 1e-9);
            }
        }
    }
}
