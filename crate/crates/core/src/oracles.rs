//! Closed-form Einstein profiles used as independent references.
//!
//! Each oracle is stated at a base Einstein constant and rescaled to any
//! other `λ` by the homothety `f -> c f`, `t -> c t`, `λ -> λ/c^2`.

use crate::odes::FrameState;
use crate::triple::Triple;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_3, FRAC_PI_4, PI, SQRT_2};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleKind {
    /// Round `S^4` in the `SU(2)` frame: `f_i = sin t`, `λ = 3`, `T = π`.
    RoundSu2,
    /// Round `S^4` in the `SO(3)` frame: `f = 4(sin t, sin(π/3 - t), sin(π/3 + t))`, `λ = 3`.
    RoundSo3,
    /// Fubini–Study in Berger form: `f_1 = f_2 = sin t`, `f_3 = sin t cos t`, `λ = 6`.
    FubiniStudySu2,
    /// Fubini–Study in the `SO(3)` frame: `f = 2(sin t, cos t, cos 2t)`, `λ = 6`.
    FubiniStudySo3,
    /// `S^2 × S^2`: `f = 2√2 (cos(t/√2), 1, sin(t/√2))`, `λ = 1`.
    ProductS2S2,
    /// Fubini–Study with reversed orientation in the Hitchin `k = 2` frame:
    /// `f = 2(sin 2t, sin(π/4 - t), cos(π/4 - t))`, `λ = 6`.
    HitchinTwo,
}

impl OracleKind {
    pub const ALL: [OracleKind; 6] = [
        OracleKind::RoundSu2,
        OracleKind::RoundSo3,
        OracleKind::FubiniStudySu2,
        OracleKind::FubiniStudySo3,
        OracleKind::ProductS2S2,
        OracleKind::HitchinTwo,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            OracleKind::RoundSu2 => "round_su2",
            OracleKind::RoundSo3 => "round_so3",
            OracleKind::FubiniStudySu2 => "fubini_study_su2",
            OracleKind::FubiniStudySo3 => "fubini_study_so3",
            OracleKind::ProductS2S2 => "product_s2xs2",
            OracleKind::HitchinTwo => "hitchin_k2",
        }
    }

    fn base_lambda(&self) -> f64 {
        match self {
            OracleKind::RoundSu2 | OracleKind::RoundSo3 => 3.0,
            OracleKind::FubiniStudySu2 | OracleKind::FubiniStudySo3 | OracleKind::HitchinTwo => 6.0,
            OracleKind::ProductS2S2 => 1.0,
        }
    }

    fn base_length(&self) -> f64 {
        match self {
            OracleKind::RoundSu2 => PI,
            OracleKind::RoundSo3 => FRAC_PI_3,
            OracleKind::FubiniStudySu2 => PI / 2.0,
            OracleKind::FubiniStudySo3 | OracleKind::HitchinTwo => FRAC_PI_4,
            OracleKind::ProductS2S2 => PI / SQRT_2,
        }
    }

    fn base(&self, t: f64) -> (Triple, Triple) {
        let (s, c) = (t.sin(), t.cos());
        match self {
            OracleKind::RoundSu2 => (Triple::splat(s), Triple::splat(c)),
            OracleKind::RoundSo3 => (
                Triple::new(4.0 * s, 4.0 * (FRAC_PI_3 - t).sin(), 4.0 * (FRAC_PI_3 + t).sin()),
                Triple::new(4.0 * c, -4.0 * (FRAC_PI_3 - t).cos(), 4.0 * (FRAC_PI_3 + t).cos()),
            ),
            OracleKind::FubiniStudySu2 => (Triple::new(s, s, s * c), Triple::new(c, c, (2.0 * t).cos())),
            OracleKind::FubiniStudySo3 => (
                Triple::new(2.0 * s, 2.0 * c, 2.0 * (2.0 * t).cos()),
                Triple::new(2.0 * c, -2.0 * s, -4.0 * (2.0 * t).sin()),
            ),
            OracleKind::ProductS2S2 => {
                let r = 2.0 * SQRT_2;
                let x = t / SQRT_2;
                (Triple::new(r * x.cos(), r, r * x.sin()), Triple::new(-2.0 * x.sin(), 0.0, 2.0 * x.cos()))
            }
            OracleKind::HitchinTwo => (
                Triple::new(2.0 * (2.0 * t).sin(), 2.0 * (FRAC_PI_4 - t).sin(), 2.0 * (FRAC_PI_4 - t).cos()),
                Triple::new(4.0 * (2.0 * t).cos(), -2.0 * (FRAC_PI_4 - t).cos(), 2.0 * (FRAC_PI_4 - t).sin()),
            ),
        }
    }

    /// Homothety factor from the base gauge to Einstein constant `lambda`.
    fn scale(&self, lambda: f64) -> f64 {
        (self.base_lambda() / lambda).sqrt()
    }

    /// Total length at Einstein constant `lambda`.
    pub fn length(&self, lambda: f64) -> f64 {
        self.scale(lambda) * self.base_length()
    }

    /// Profile at Einstein constant `lambda`.
    pub fn state(&self, t: f64, lambda: f64) -> FrameState {
        let c = self.scale(lambda);
        let (f, df) = self.base(t / c);
        FrameState::new(t, f * c, df)
    }
}

/// The six relabelings of `(1, 2, 3)`.
pub const PERMUTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// `sup_t |f(t) - f_oracle(t)|` over `samples`, with the oracle labels
/// permuted by `perm`; `f_oracle` is evaluated at the same `λ`.
pub fn sup_distance(samples: &[FrameState], oracle: OracleKind, lambda: f64, perm: [usize; 3]) -> f64 {
    samples
        .iter()
        .map(|s| s.f.dist_inf(oracle.state(s.t, lambda).f.permute(perm)))
        .fold(0.0, f64::max)
}

/// Smallest distance to `oracle` over all labelings and both orientations
/// of the interval, at equal `λ`. A length mismatch counts as distance.
pub fn min_distance(samples: &[FrameState], t_total: f64, oracle: OracleKind, lambda: f64) -> f64 {
    let t_o = oracle.length(lambda);
    let common: Vec<FrameState> = samples.iter().filter(|s| s.t < t_o).copied().collect();
    let reversed: Vec<FrameState> = samples
        .iter()
        .filter(|s| t_total - s.t < t_o && s.t <= t_total)
        .map(|s| FrameState::new(t_total - s.t, s.f, -s.df))
        .collect();
    let best = PERMUTATIONS
        .iter()
        .flat_map(|&p| [sup_distance(&common, oracle, lambda, p), sup_distance(&reversed, oracle, lambda, p)])
        .fold(f64::INFINITY, f64::min);
    best.max((t_total - t_o).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::odes::{constraint_residual, frame_rhs, lr_from_frame, EinsteinParams};

    #[test]
    fn every_oracle_is_einstein() {
        for o in OracleKind::ALL {
            for lambda in [1.0, 3.0, 6.0] {
                let p = EinsteinParams::new(lambda).unwrap();
                let t_total = o.length(lambda);
                for m in 1..20 {
                    let t = t_total * m as f64 / 20.0;
                    let st = o.state(t, lambda);
                    let sh = lr_from_frame(&st).unwrap();
                    assert!(constraint_residual(sh.l, sh.r, &p).abs() < 1e-10, "{} at {t}", o.name());
                    let h = 1e-4;
                    let fd = (o.state(t + h, lambda).df - o.state(t - h, lambda).df) * (0.5 / h);
                    let dd = frame_rhs(&st, &p).unwrap();
                    assert!(fd.dist_inf(dd) < 1e-6 * (1.0 + dd.max_abs()), "{} at {t}", o.name());
                    let fdf = (o.state(t + h, lambda).f - o.state(t - h, lambda).f) * (0.5 / h);
                    assert!(fdf.dist_inf(st.df) < 1e-6);
                }
            }
        }
    }

    #[test]
    fn distance_controls() {
        let lambda = 3.0;
        let o = OracleKind::RoundSu2;
        let t_total = o.length(lambda);
        let samples: Vec<FrameState> = (1..50).map(|m| o.state(t_total * m as f64 / 50.0, lambda)).collect();
        assert!(min_distance(&samples, t_total, o, lambda) < 1e-14);
        assert!(min_distance(&samples, t_total, OracleKind::FubiniStudySu2, lambda) > 1e-2);
        let fs = OracleKind::FubiniStudySu2;
        let tf = fs.length(lambda);
        let rev: Vec<FrameState> = (1..50)
            .map(|m| {
                let t = tf * m as f64 / 50.0;
                let s = fs.state(tf - t, lambda);
                FrameState::new(t, s.f.permute([2, 0, 1]), -s.df)
            })
            .collect();
        assert!(min_distance(&rev, tf, fs, lambda) < 1e-14);
    }
}
