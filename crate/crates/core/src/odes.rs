//! Right-hand sides, algebraic identities and residuals of the Einstein
//! system for a diagonal cohomogeneity-one metric
//!
//! ```text
//! g = dt^2 + f_1(t)^2 σ_1^2 + f_2(t)^2 σ_2^2 + f_3(t)^2 σ_3^2,   dσ_i = -2 σ_j ∧ σ_k.
//! ```
//!
//! All functions are pure. The integrator evolves `(f, f')` only; every other
//! quantity here (`L`, `R`, `A`, `B`, `a`, `b`, the gap variables) is recomputed
//! algebraically and its own evolution equation is used for cross-checks.

use crate::triple::Triple;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("length f{index} = {value} is not positive")]
    NonPositiveLength { index: usize, value: f64 },
    #[error("non-finite input")]
    NonFinite,
    #[error("Einstein constant must be positive, got {0}")]
    NonPositiveLambda(f64),
}

/// Diagonal metric profile at one value of the arc-length parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameState {
    pub t: f64,
    pub f: Triple,
    pub df: Triple,
}

impl FrameState {
    pub fn new(t: f64, f: Triple, df: Triple) -> Self {
        FrameState { t, f, df }
    }

    /// Checks that every length is strictly positive and all entries finite.
    pub fn check_regular(&self) -> Result<(), OdeError> {
        if !(self.t.is_finite() && self.f.is_finite() && self.df.is_finite()) {
            return Err(OdeError::NonFinite);
        }
        for i in 0..3 {
            if self.f[i] <= 0.0 {
                return Err(OdeError::NonPositiveLength { index: i + 1, value: self.f[i] });
            }
        }
        Ok(())
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.f[0], self.f[1], self.f[2], self.df[0], self.df[1], self.df[2]]
    }

    pub fn from_array(t: f64, y: &[f64; 6]) -> Self {
        FrameState { t, f: Triple::new(y[0], y[1], y[2]), df: Triple::new(y[3], y[4], y[5]) }
    }
}

/// Einstein constant of `Ric(g) = λ g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EinsteinParams {
    pub lambda: f64,
}

impl EinsteinParams {
    pub fn new(lambda: f64) -> Result<Self, OdeError> {
        if !lambda.is_finite() {
            return Err(OdeError::NonFinite);
        }
        if lambda <= 0.0 {
            return Err(OdeError::NonPositiveLambda(lambda));
        }
        Ok(EinsteinParams { lambda })
    }
}

/// Logarithmic derivatives, shape ratios and mean curvature of a principal orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeOperators {
    pub l: Triple,
    pub r: Triple,
    pub s: f64,
}

/// `L_i = f_i'/f_i`, `R_i = f_i/(f_j f_k)`, `S = Σ L_i`.
pub fn lr_from_frame(state: &FrameState) -> Result<ShapeOperators, OdeError> {
    state.check_regular()?;
    let f = state.f;
    let l = state.df.zip_map(f, |d, x| d / x);
    let r = Triple::from_cyclic(|i, j, k| f[i] / (f[j] * f[k]));
    Ok(ShapeOperators { l, r, s: l.sum() })
}

/// `L_i' = -S L_i + 2R_i^2 - 2(R_j - R_k)^2 - λ` and `R_i' = R_i (L_i - L_j - L_k)`.
pub fn lr_rhs(l: Triple, r: Triple, p: &EinsteinParams) -> (Triple, Triple) {
    let s = l.sum();
    let dl = Triple::from_cyclic(|i, j, k| {
        -s * l[i] + 2.0 * r[i] * r[i] - 2.0 * (r[j] - r[k]).powi(2) - p.lambda
    });
    let dr = Triple::from_cyclic(|i, j, k| r[i] * (l[i] - l[j] - l[k]));
    (dl, dr)
}

/// Second-order form used by the integrator: `f_i'' = f_i (L_i' + L_i^2)`.
pub fn frame_rhs(state: &FrameState, p: &EinsteinParams) -> Result<Triple, OdeError> {
    let sh = lr_from_frame(state)?;
    let (dl, _) = lr_rhs(sh.l, sh.r, p);
    Ok(Triple::from_cyclic(|i, _, _| state.f[i] * (dl[i] + sh.l[i] * sh.l[i])))
}

/// `(-Σ R_i^2 + 2 Σ_{i<j} R_i R_j - Σ_{i<j} L_i L_j) - λ`; zero on Einstein solutions.
pub fn constraint_residual(l: Triple, r: Triple, p: &EinsteinParams) -> f64 {
    let rr = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    let rx = r[0] * r[1] + r[1] * r[2] + r[0] * r[2];
    let lx = l[0] * l[1] + l[1] * l[2] + l[0] * l[2];
    (-rr + 2.0 * rx - lx) - p.lambda
}

/// Connection coefficients on `Λ²₊` and `Λ²₋`:
/// `A_i = L_i + R_j + R_k - R_i`, `B_i = L_i - R_j - R_k + R_i`.
pub fn ab_coeffs(l: Triple, r: Triple) -> (Triple, Triple) {
    let a = Triple::from_cyclic(|i, j, k| l[i] + r[j] + r[k] - r[i]);
    let b = Triple::from_cyclic(|i, j, k| l[i] - r[j] - r[k] + r[i]);
    (a, b)
}

/// `A_i' = (R_j + R_k - 3R_i) A_i - A_i^2 + A_j A_k`,
/// `B_i' = (3R_i - R_j - R_k) B_i - B_i^2 + B_j B_k`.
pub fn ab_rhs(a: Triple, b: Triple, r: Triple) -> (Triple, Triple) {
    let da = Triple::from_cyclic(|i, j, k| (r[j] + r[k] - 3.0 * r[i]) * a[i] - a[i] * a[i] + a[j] * a[k]);
    let db = Triple::from_cyclic(|i, j, k| (3.0 * r[i] - r[j] - r[k]) * b[i] - b[i] * b[i] + b[j] * b[k]);
    (da, db)
}

/// Eigenvalues of the curvature operator on `Λ²₊` (`a`) and `Λ²₋` (`b`) in the
/// invariant frame: `a_i = 2R_i A_i - A_j A_k`, `b_i = -2R_i B_i - B_j B_k`.
pub fn curv_eigs(r: Triple, a: Triple, b: Triple) -> (Triple, Triple) {
    let ea = Triple::from_cyclic(|i, j, k| 2.0 * r[i] * a[i] - a[j] * a[k]);
    let eb = Triple::from_cyclic(|i, j, k| -2.0 * r[i] * b[i] - b[j] * b[k]);
    (ea, eb)
}

/// Second Bianchi identity for the eigenvalues:
/// `a_i' = -A_j (a_i - a_k) - A_k (a_i - a_j)` and likewise for `b` with `B`.
pub fn curv_eigs_rhs(ea: Triple, eb: Triple, a: Triple, b: Triple) -> (Triple, Triple) {
    let da = Triple::from_cyclic(|i, j, k| -a[j] * (ea[i] - ea[k]) - a[k] * (ea[i] - ea[j]));
    let db = Triple::from_cyclic(|i, j, k| -b[j] * (eb[i] - eb[k]) - b[k] * (eb[i] - eb[j]));
    (da, db)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GapKind {
    /// `F_2 = a_1 - a_2`, `F_3 = a_1 - a_3`, driven by `A`.
    F,
    /// `E_1 = b_2 - b_1`, `E_3 = b_2 - b_3`, driven by `B`.
    E,
}

/// Pair of eigenvalue differences on one of the two blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapState {
    pub kind: GapKind,
    pub g1: f64,
    pub g2: f64,
}

impl GapState {
    /// `F` gaps from `a`, or `E` gaps from `b`.
    pub fn from_eigs(kind: GapKind, eig: Triple) -> Self {
        match kind {
            GapKind::F => GapState { kind, g1: eig[0] - eig[1], g2: eig[0] - eig[2] },
            GapKind::E => GapState { kind, g1: eig[1] - eig[0], g2: eig[1] - eig[2] },
        }
    }
}

/// Linear nonautonomous 2×2 system for the gaps. `coeff` is `A` for the
/// `F` system and `B` for the `E` system.
///
/// ```text
/// F_2' = (A_1 - A_2) F_3 - (A_1 + 2A_3) F_2      E_1' = (B_2 - B_1) E_3 - (B_2 + 2B_3) E_1
/// F_3' = (A_1 - A_3) F_2 - (A_1 + 2A_2) F_3      E_3' = (B_2 - B_3) E_1 - (2B_1 + B_2) E_3
/// ```
pub fn gap_rhs(g: GapState, coeff: Triple) -> (f64, f64) {
    let c = coeff;
    match g.kind {
        GapKind::F => (
            (c[0] - c[1]) * g.g2 - (c[0] + 2.0 * c[2]) * g.g1,
            (c[0] - c[2]) * g.g1 - (c[0] + 2.0 * c[1]) * g.g2,
        ),
        GapKind::E => (
            (c[1] - c[0]) * g.g2 - (c[1] + 2.0 * c[2]) * g.g1,
            (c[1] - c[2]) * g.g1 - (2.0 * c[0] + c[1]) * g.g2,
        ),
    }
}

/// Ordered pairs `(i, j)` used by [`uij_residual`] and the ratio checks.
pub const RATIO_PAIRS: [(usize, usize); 3] = [(0, 1), (1, 2), (2, 0)];

/// Residual of `u_ij'' + S u_ij' = 4 (f_i²-f_j²)(f_i²+f_j²-f_k²) / (f_i² f_j² f_k²)`
/// for `u_ij = log(f_i/f_j)` at the pairs of [`RATIO_PAIRS`].
pub fn uij_residual(state: &FrameState, ddf: Triple) -> Result<Triple, OdeError> {
    let sh = lr_from_frame(state)?;
    let f = state.f;
    let mut out = Triple::ZERO;
    for (n, &(i, j)) in RATIO_PAIRS.iter().enumerate() {
        let k = 3 - i - j;
        let (fi2, fj2, fk2) = (f[i] * f[i], f[j] * f[j], f[k] * f[k]);
        let du = sh.l[i] - sh.l[j];
        let ddu = (ddf[i] / f[i] - sh.l[i] * sh.l[i]) - (ddf[j] / f[j] - sh.l[j] * sh.l[j]);
        let rhs = 4.0 * (fi2 - fj2) * (fi2 + fj2 - fk2) / (fi2 * fj2 * fk2);
        out[n] = ddu + sh.s * du - rhs;
    }
    Ok(out)
}

/// Every derived quantity at a single sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameDiagnostics {
    pub l: Triple,
    pub r: Triple,
    /// Connection coefficients `A` on `Λ²₊`.
    pub a_coef: Triple,
    /// Connection coefficients `B` on `Λ²₋`.
    pub b_coef: Triple,
    /// Curvature eigenvalues `a` on `Λ²₊`.
    pub a_eig: Triple,
    /// Curvature eigenvalues `b` on `Λ²₋`.
    pub b_eig: Triple,
    pub constraint: f64,
}

impl FrameDiagnostics {
    pub fn compute(state: &FrameState, p: &EinsteinParams) -> Result<Self, OdeError> {
        let sh = lr_from_frame(state)?;
        let (a_coef, b_coef) = ab_coeffs(sh.l, sh.r);
        let (a_eig, b_eig) = curv_eigs(sh.r, a_coef, b_coef);
        Ok(FrameDiagnostics {
            l: sh.l,
            r: sh.r,
            a_coef,
            b_coef,
            a_eig,
            b_eig,
            constraint: constraint_residual(sh.l, sh.r, p),
        })
    }
}

/// Solves the constraint for `f_3'` given `f`, `f_1'`, `f_2'` (requires
/// `L_1 + L_2 ≠ 0`). Used to seed Einstein trajectories from arbitrary data.
pub fn complete_constraint(f: Triple, df1: f64, df2: f64, p: &EinsteinParams) -> Option<Triple> {
    let l1 = df1 / f[0];
    let l2 = df2 / f[1];
    if (l1 + l2).abs() < 1e-12 {
        return None;
    }
    let r = Triple::from_cyclic(|i, j, k| f[i] / (f[j] * f[k]));
    let rr = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
    let rx = r[0] * r[1] + r[1] * r[2] + r[0] * r[2];
    let target = -rr + 2.0 * rx - p.lambda;
    let l3 = (target - l1 * l2) / (l1 + l2);
    Some(Triple::new(df1, df2, l3 * f[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn p(lambda: f64) -> EinsteinParams {
        EinsteinParams { lambda }
    }

    fn assert_triple(got: Triple, want: Triple, tol: f64) {
        assert!(got.dist_inf(want) <= tol, "got {got:?}, want {want:?}");
    }

    #[test]
    fn lr_from_frame_examples() {
        let s = FrameState::new(0.0, Triple::splat(1.0), Triple::ZERO);
        let sh = lr_from_frame(&s).unwrap();
        assert_eq!(sh.l, Triple::ZERO);
        assert_eq!(sh.r, Triple::splat(1.0));
        assert_eq!(sh.s, 0.0);

        let t = FRAC_PI_2;
        let s = FrameState::new(t, Triple::splat(t.sin()), Triple::splat(t.cos()));
        let sh = lr_from_frame(&s).unwrap();
        assert_triple(sh.l, Triple::ZERO, 1e-15);
        assert_triple(sh.r, Triple::splat(1.0), 1e-15);

        let s = FrameState::new(0.0, Triple::new(2.0, 1.0, 1.0), Triple::ZERO);
        assert_eq!(lr_from_frame(&s).unwrap().r, Triple::new(2.0, 0.5, 0.5));
    }

    #[test]
    fn lr_from_frame_rejects_collapsed_length() {
        let s = FrameState::new(0.0, Triple::new(1.0, 0.0, 1.0), Triple::ZERO);
        assert_eq!(
            lr_from_frame(&s),
            Err(OdeError::NonPositiveLength { index: 2, value: 0.0 })
        );
    }

    #[test]
    fn lr_rhs_examples() {
        let (dl, dr) = lr_rhs(Triple::ZERO, Triple::splat(1.0), &p(3.0));
        assert_eq!(dl, Triple::splat(-1.0));
        assert_eq!(dr, Triple::ZERO);

        let (dl, dr) = lr_rhs(Triple::ZERO, Triple::ZERO, &p(0.0));
        assert_eq!((dl, dr), (Triple::ZERO, Triple::ZERO));

        let (dl, dr) = lr_rhs(Triple::ZERO, Triple::new(1.0, 0.0, 0.0), &p(0.0));
        assert_eq!(dl, Triple::new(2.0, -2.0, -2.0));
        assert_eq!(dr, Triple::ZERO);
    }

    #[test]
    fn frame_rhs_round_profile() {
        let s = FrameState::new(FRAC_PI_2, Triple::splat(1.0), Triple::ZERO);
        assert_triple(frame_rhs(&s, &p(3.0)).unwrap(), Triple::splat(-1.0), 1e-15);
        let bad = FrameState::new(0.0, Triple::new(1.0, 1.0, -1.0), Triple::ZERO);
        assert!(frame_rhs(&bad, &p(3.0)).is_err());
    }

    /// Independent transcription of the second-order system with every term
    /// expanded in `f`, `f'`.
    fn frame_rhs_expanded(s: &FrameState, lambda: f64) -> Triple {
        let (f, d) = (s.f, s.df);
        let prod2 = (f[0] * f[1] * f[2]).powi(2);
        let mean = d[0] / f[0] + d[1] / f[1] + d[2] / f[2];
        let mut out = Triple::ZERO;
        for i in 0..3 {
            let (j, k) = ((i + 1) % 3, (i + 2) % 3);
            let pot = 2.0 * f[i].powi(4) - 2.0 * (f[j] * f[j] - f[k] * f[k]).powi(2);
            out[i] = -mean * d[i] + d[i] * d[i] / f[i] + f[i] * pot / prod2 - lambda * f[i];
        }
        out
    }

    #[test]
    fn constraint_examples() {
        assert!(constraint_residual(Triple::ZERO, Triple::splat(1.0), &p(3.0)).abs() < 1e-15);
        let fs = constraint_residual(Triple::new(1.0, 1.0, 0.0), Triple::new(2.0, 2.0, 1.0), &p(6.0));
        assert!(fs.abs() < 1e-15);
        assert_eq!(constraint_residual(Triple::new(1.0, 0.0, 0.0), Triple::ZERO, &p(0.0)), 0.0);
    }

    #[test]
    fn fubini_study_frame_at_quarter_pi() {
        // f1 = f2 = sin t, f3 = sin t cos t.
        let t = FRAC_PI_4;
        let (s, c) = (t.sin(), t.cos());
        let state = FrameState::new(
            t,
            Triple::new(s, s, s * c),
            Triple::new(c, c, c * c - s * s),
        );
        let sh = lr_from_frame(&state).unwrap();
        assert_triple(sh.l, Triple::new(1.0, 1.0, 0.0), 1e-14);
        assert_triple(sh.r, Triple::new(2.0, 2.0, 1.0), 1e-14);
    }

    #[test]
    fn ab_coeff_examples() {
        let (a, b) = ab_coeffs(Triple::ZERO, Triple::splat(1.0));
        assert_eq!(a, Triple::splat(1.0));
        assert_eq!(b, Triple::splat(-1.0));

        let (a, b) = ab_coeffs(Triple::new(1.0, 1.0, 0.0), Triple::new(2.0, 2.0, 1.0));
        assert_eq!(a, Triple::new(2.0, 2.0, 3.0));
        assert_eq!(b, Triple::new(0.0, 0.0, -3.0));

        let (a, b) = ab_coeffs(Triple::new(1.0, 0.0, 0.0), Triple::ZERO);
        assert_eq!(a, Triple::new(1.0, 0.0, 0.0));
        assert_eq!(b, Triple::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn ab_rhs_examples() {
        let (da, db) = ab_rhs(Triple::splat(1.0), Triple::splat(-1.0), Triple::splat(1.0));
        assert_eq!(da, Triple::splat(-1.0));
        assert_eq!(db, Triple::splat(-1.0));
        let (da, _) = ab_rhs(Triple::ZERO, Triple::splat(0.3), Triple::new(0.2, 1.5, -0.7));
        assert_eq!(da, Triple::ZERO);
    }

    #[test]
    fn curv_eigs_examples() {
        let (ea, eb) = curv_eigs(Triple::splat(1.0), Triple::splat(1.0), Triple::splat(-1.0));
        assert_eq!(ea, Triple::splat(1.0));
        assert_eq!(eb, Triple::splat(1.0));

        for &t in &[0.3, 1.0, 2.2, 2.9] {
            let (s, c) = (f64::sin(t), f64::cos(t));
            let r = Triple::splat(1.0 / s);
            let a = Triple::splat((1.0 + c) / s);
            let b = Triple::splat((c - 1.0) / s);
            let (ea, eb) = curv_eigs(r, a, b);
            assert_triple(ea, Triple::splat(1.0), 1e-12);
            assert_triple(eb, Triple::splat(1.0), 1e-12);
        }
    }

    #[test]
    fn curv_eigs_rhs_examples() {
        let (da, _) = curv_eigs_rhs(Triple::splat(1.0), Triple::splat(1.0), Triple::new(3.0, -2.0, 0.5), Triple::ZERO);
        assert_eq!(da, Triple::ZERO);
        let (da, _) = curv_eigs_rhs(Triple::new(2.0, 1.0, 1.0), Triple::ZERO, Triple::new(0.0, 1.0, 1.0), Triple::ZERO);
        assert_eq!(da[0], -2.0);
    }

    #[test]
    fn gap_rhs_examples() {
        let z = GapState { kind: GapKind::F, g1: 0.0, g2: 0.0 };
        assert_eq!(gap_rhs(z, Triple::new(1.0, 2.0, 3.0)), (0.0, 0.0));
        let g = GapState { kind: GapKind::F, g1: 1.0, g2: 1.0 };
        assert_eq!(gap_rhs(g, Triple::splat(1.0)), (-3.0, -3.0));
        let e = GapState { kind: GapKind::E, g1: 1.0, g2: 1.0 };
        assert_eq!(gap_rhs(e, Triple::splat(1.0)), (-3.0, -3.0));
    }

    #[test]
    fn gap_state_from_eigs() {
        let g = GapState::from_eigs(GapKind::F, Triple::new(3.0, 1.0, 2.0));
        assert_eq!((g.g1, g.g2), (2.0, 1.0));
        let g = GapState::from_eigs(GapKind::E, Triple::new(3.0, 1.0, 2.0));
        assert_eq!((g.g1, g.g2), (-2.0, -1.0));
    }

    #[test]
    fn uij_residual_symmetric_and_fubini_study() {
        let s = FrameState::new(0.4, Triple::splat(0.7), Triple::splat(0.2));
        let dd = frame_rhs(&s, &p(3.0)).unwrap();
        assert_eq!(uij_residual(&s, dd).unwrap(), Triple::ZERO);

        for &t in &[0.2, 0.6, 1.0, 1.4] {
            let (sn, c) = (f64::sin(t), f64::cos(t));
            let st = FrameState::new(t, Triple::new(sn, sn, sn * c), Triple::new(c, c, c * c - sn * sn));
            let dd = Triple::new(-sn, -sn, -4.0 * sn * c);
            assert!(uij_residual(&st, dd).unwrap().max_abs() < 1e-10);
        }
    }

    #[test]
    fn uij_residual_negative_control() {
        let st = FrameState::new(0.5, Triple::new(1.0, 1.3, 0.8), Triple::new(0.1, -0.2, 0.4));
        let dd = Triple::new(0.3, 0.0, -0.1);
        assert!(uij_residual(&st, dd).unwrap().max_abs() > 1e-3);
    }

    #[test]
    fn complete_constraint_zeroes_residual() {
        let f = Triple::new(0.9, 1.2, 0.7);
        let df = complete_constraint(f, 0.3, -0.5, &p(3.0)).unwrap();
        let sh = lr_from_frame(&FrameState::new(0.0, f, df)).unwrap();
        assert!(constraint_residual(sh.l, sh.r, &p(3.0)).abs() < 1e-12);
    }

    fn triple_strategy(lo: f64, hi: f64) -> impl Strategy<Value = Triple> {
        (lo..hi, lo..hi, lo..hi).prop_map(|(a, b, c)| Triple::new(a, b, c))
    }

    proptest! {
        #[test]
        fn frame_rhs_agrees_with_expanded_form(f in triple_strategy(0.2, 3.0), df in triple_strategy(-2.0, 2.0), lambda in 0.5..6.0f64) {
            let s = FrameState::new(0.0, f, df);
            let a = frame_rhs(&s, &p(lambda)).unwrap();
            let b = frame_rhs_expanded(&s, lambda);
            let scale = 1.0 + a.max_abs();
            prop_assert!(a.dist_inf(b) <= 1e-12 * scale);
        }

        #[test]
        fn cyclic_equivariance(f in triple_strategy(0.2, 3.0), df in triple_strategy(-2.0, 2.0), lambda in 0.5..6.0f64) {
            let p = p(lambda);
            let s = FrameState::new(0.0, f, df);
            let sr = FrameState::new(0.0, f.rotate(), df.rotate());
            let d = FrameDiagnostics::compute(&s, &p).unwrap();
            let dr = FrameDiagnostics::compute(&sr, &p).unwrap();
            let tol = 1e-12;
            prop_assert!(d.l.rotate().dist_inf(dr.l) <= tol);
            prop_assert!(d.r.rotate().dist_inf(dr.r) <= tol);
            prop_assert!(d.a_coef.rotate().dist_inf(dr.a_coef) <= tol);
            prop_assert!(d.b_coef.rotate().dist_inf(dr.b_coef) <= tol);
            prop_assert!(d.a_eig.rotate().dist_inf(dr.a_eig) <= tol * (1.0 + d.a_eig.max_abs()));
            prop_assert!(d.b_eig.rotate().dist_inf(dr.b_eig) <= tol * (1.0 + d.b_eig.max_abs()));
            prop_assert!((d.constraint - dr.constraint).abs() <= tol * (1.0 + d.constraint.abs()));
            let (dl, drr) = lr_rhs(d.l, d.r, &p);
            let (dl2, drr2) = lr_rhs(dr.l, dr.r, &p);
            prop_assert!(dl.rotate().dist_inf(dl2) <= tol * (1.0 + dl.max_abs()));
            prop_assert!(drr.rotate().dist_inf(drr2) <= tol * (1.0 + drr.max_abs()));
            let dd = frame_rhs(&s, &p).unwrap();
            let ddr = frame_rhs(&sr, &p).unwrap();
            prop_assert!(dd.rotate().dist_inf(ddr) <= tol * (1.0 + dd.max_abs()));
        }

        #[test]
        fn scale_covariance(f in triple_strategy(0.2, 3.0), df in triple_strategy(-2.0, 2.0), lambda in 0.5..6.0f64, c in 0.3..4.0f64) {
            // f -> c f, t -> c t (so f' is unchanged), λ -> λ/c².
            let s = FrameState::new(0.0, f, df);
            let sc = FrameState::new(0.0, f * c, df);
            let d = FrameDiagnostics::compute(&s, &p(lambda)).unwrap();
            let dc = FrameDiagnostics::compute(&sc, &p(lambda / (c * c))).unwrap();
            let tol = 1e-11;
            prop_assert!((d.l * (1.0 / c)).dist_inf(dc.l) <= tol * (1.0 + d.l.max_abs()));
            prop_assert!((d.r * (1.0 / c)).dist_inf(dc.r) <= tol * (1.0 + d.r.max_abs()));
            prop_assert!((d.a_coef * (1.0 / c)).dist_inf(dc.a_coef) <= tol * (1.0 + d.a_coef.max_abs()));
            prop_assert!((d.b_coef * (1.0 / c)).dist_inf(dc.b_coef) <= tol * (1.0 + d.b_coef.max_abs()));
            prop_assert!((d.a_eig * (1.0 / (c * c))).dist_inf(dc.a_eig) <= tol * (1.0 + d.a_eig.max_abs()));
            prop_assert!((d.b_eig * (1.0 / (c * c))).dist_inf(dc.b_eig) <= tol * (1.0 + d.b_eig.max_abs()));
            prop_assert!((d.constraint / (c * c) - dc.constraint).abs() <= tol * (1.0 + d.constraint.abs()));
            let u = |x: Triple| Triple::new((x[0] / x[1]).ln(), (x[1] / x[2]).ln(), (x[2] / x[0]).ln());
            prop_assert!(u(f).dist_inf(u(f * c)) <= 1e-12);
        }
    }
}
