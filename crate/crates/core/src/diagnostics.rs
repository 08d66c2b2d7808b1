//! Numeric certificates computed from a converged [`SolutionReport`].

use crate::boundary::{DiagramId, Side};
use crate::odes::{
    ab_coeffs, ab_rhs, constraint_residual, curv_eigs, curv_eigs_rhs, gap_rhs, lr_from_frame, EinsteinParams,
    FrameDiagnostics, FrameState, GapKind, GapState, OdeError,
};
use crate::shooting::SolutionReport;
use crate::triple::Triple;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagError {
    #[error("{constant} is not defined for diagram {diagram}")]
    Undefined { constant: &'static str, diagram: String },
    #[error("end value missing at the {0:?} end")]
    MissingEndValue(Side),
    #[error("characteristic numbers are not supported for {0}")]
    Unsupported(String),
    #[error("finite-difference step {h} too large: estimated error {estimate:e} exceeds {tol:e}")]
    StepTooLarge { h: f64, estimate: f64, tol: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

// ---------------------------------------------------------------------------
// Scale-invariant constants

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct InvariantConstants {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub delta: Option<f64>,
    pub theta_k: Option<f64>,
}

impl InvariantConstants {
    /// `(name, value)` for every defined constant, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        [("alpha", self.alpha), ("beta", self.beta), ("delta", self.delta), ("theta_k", self.theta_k)]
            .into_iter()
            .filter_map(|(n, v)| v.map(|v| (n, v)))
            .collect()
    }
}

fn end_h(sr: &SolutionReport, side: Side) -> Result<f64, DiagError> {
    sr.end_value(side).ok_or(DiagError::MissingEndValue(side))
}

/// `α = λh²` at the left end, `β = λq²` at the right end, `δ = 8 − λq²`
/// and `Θ_k = 4 + 8/k`, each read from the germ end values.
pub fn invariant_constants(sr: &SolutionReport) -> Result<InvariantConstants, DiagError> {
    let lambda = sr.lambda;
    let mut c = InvariantConstants::default();
    match sr.diagram.id {
        DiagramId::So3S4 => c.alpha = Some(lambda * end_h(sr, Side::Left)?.powi(2)),
        DiagramId::So3Cp2 => c.beta = Some(lambda * end_h(sr, Side::Right)?.powi(2)),
        DiagramId::So3Hitchin(k) => {
            c.beta = Some(lambda * end_h(sr, Side::Right)?.powi(2));
            c.theta_k = Some(4.0 + 8.0 / k as f64);
        }
        DiagramId::So3S2xS2 => c.delta = Some(8.0 - lambda * end_h(sr, Side::Left)?.powi(2)),
        id => {
            return Err(DiagError::Undefined { constant: "invariant constants", diagram: id.to_string() });
        }
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// Cones

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Block {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
    Zero,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub block: Block,
    pub signs: [Sign; 3],
}

impl ConeSpec {
    pub fn new(block: Block, signs: [Sign; 3]) -> Option<Self> {
        signs.iter().any(|s| *s != Sign::Free).then_some(ConeSpec { block, signs })
    }

    /// `{A_1 ≥ 0, A_2 ≤ 0, A_3 ≤ 0}`.
    pub fn c_a() -> Self {
        ConeSpec { block: Block::A, signs: [Sign::Pos, Sign::Neg, Sign::Neg] }
    }

    /// `{εB_1 ≥ 0, εB_2 ≥ 0, B_3 ≤ 0}` with `ε = ±1`.
    pub fn c_eps(eps: f64) -> Self {
        let s = if eps >= 0.0 { Sign::Pos } else { Sign::Neg };
        ConeSpec { block: Block::B, signs: [s, s, Sign::Neg] }
    }

    /// `{B_1 ≥ 0, B_2 ≤ 0, B_3 ≥ 0}`.
    pub fn c_b() -> Self {
        ConeSpec { block: Block::B, signs: [Sign::Pos, Sign::Neg, Sign::Pos] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub satisfied: bool,
    /// Minimum signed distance to the cone boundary; negative when violated.
    pub worst_margin: f64,
    pub location: f64,
    pub samples: usize,
}

fn coef(d: &FrameDiagnostics, b: Block) -> Triple {
    match b {
        Block::A => d.a_coef,
        Block::B => d.b_coef,
    }
}

/// Checks the sign pattern on every stored sample with `t` in `window`.
/// `Zero` entries have margin `zero_tol − |x|`; sign entries are satisfied
/// when the margin is at least `−zero_tol`.
pub fn cone_monitor(sr: &SolutionReport, c: ConeSpec, window: (f64, f64), zero_tol: f64) -> ConeReport {
    let mut worst = f64::INFINITY;
    let mut loc = f64::NAN;
    let mut n = 0;
    for s in sr.samples.iter().filter(|s| s.state.t >= window.0 && s.state.t <= window.1) {
        n += 1;
        let x = coef(&s.diag, c.block);
        for i in 0..3 {
            let m = match c.signs[i] {
                Sign::Pos => x[i],
                Sign::Neg => -x[i],
                Sign::Zero => zero_tol - x[i].abs(),
                Sign::Free => continue,
            };
            if m < worst {
                worst = m;
                loc = s.state.t;
            }
        }
    }
    ConeReport { satisfied: n > 0 && worst >= -zero_tol, worst_margin: worst, location: loc, samples: n }
}

// ---------------------------------------------------------------------------
// Kähler detection

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KahlerLabel {
    pub block: Block,
    /// Zero-based indices of the two designated coefficients.
    pub i: usize,
    pub j: usize,
}

impl KahlerLabel {
    pub const ALL: [KahlerLabel; 6] = [
        KahlerLabel { block: Block::A, i: 0, j: 1 },
        KahlerLabel { block: Block::A, i: 1, j: 2 },
        KahlerLabel { block: Block::A, i: 2, j: 0 },
        KahlerLabel { block: Block::B, i: 0, j: 1 },
        KahlerLabel { block: Block::B, i: 1, j: 2 },
        KahlerLabel { block: Block::B, i: 2, j: 0 },
    ];

    /// Labeling under which the diagram's expected Kähler form is parallel.
    pub fn for_diagram(id: DiagramId) -> Option<Self> {
        match id {
            DiagramId::So3Cp2 | DiagramId::Su2Cp2 => Some(KahlerLabel { block: Block::B, i: 0, j: 1 }),
            DiagramId::So3S2xS2 => Some(KahlerLabel { block: Block::A, i: 0, j: 1 }),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        let b = match self.block {
            Block::A => "A",
            Block::B => "B",
        };
        format!("{b}{}{}", self.i + 1, self.j + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KahlerReport {
    pub label: String,
    pub is_kahler: bool,
    pub sup_i: f64,
    pub sup_j: f64,
}

impl KahlerReport {
    pub fn sup(&self) -> f64 {
        self.sup_i.max(self.sup_j)
    }
}

pub const KAHLER_TOL: f64 = 1e-6;

pub fn kahler_detector(sr: &SolutionReport, label: KahlerLabel, tol: f64) -> KahlerReport {
    let (mut si, mut sj) = (0.0f64, 0.0f64);
    for s in &sr.samples {
        let x = coef(&s.diag, label.block);
        si = si.max(x[label.i].abs());
        sj = sj.max(x[label.j].abs());
    }
    KahlerReport { label: label.name(), is_kahler: si < tol && sj < tol, sup_i: si, sup_j: sj }
}

/// The labeling whose designated coefficients come closest to vanishing.
pub fn best_kahler_label(sr: &SolutionReport, tol: f64) -> KahlerReport {
    KahlerLabel::ALL
        .iter()
        .map(|&l| kahler_detector(sr, l, tol))
        .min_by(|a, b| a.sup().total_cmp(&b.sup()))
        .expect("non-empty label set")
}

// ---------------------------------------------------------------------------
// Eigenvalue gaps

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenGapReport {
    pub a_spread: f64,
    pub b_spread: f64,
    pub a_left: Triple,
    pub a_right: Triple,
    pub b_left: Triple,
    pub b_right: Triple,
}

pub fn eigen_gap_report(sr: &SolutionReport) -> EigenGapReport {
    let first = sr.samples.first().expect("solution has samples").diag;
    let last = sr.samples.last().expect("solution has samples").diag;
    let (mut sa, mut sb) = (0.0f64, 0.0f64);
    for s in &sr.samples {
        sa = sa.max(s.diag.a_eig.spread());
        sb = sb.max(s.diag.b_eig.spread());
    }
    EigenGapReport {
        a_spread: sa,
        b_spread: sb,
        a_left: first.a_eig,
        a_right: last.a_eig,
        b_left: first.b_eig,
        b_right: last.b_eig,
    }
}

// ---------------------------------------------------------------------------
// Characteristic numbers

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|m| {
            let mut x = (PI * (m as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Normalization of the Gauss–Bonnet integrand.
pub const KAPPA_CHI: f64 = 1.0 / (8.0 * PI * PI);
/// Normalization of the signature integrand. Negative because the frame
/// orientation makes the Kähler form of Fubini–Study lie in `Λ²₋`.
pub const KAPPA_TAU: f64 = -1.0 / (12.0 * PI * PI);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    pub chi: f64,
    pub tau: f64,
    pub chi_expected: i64,
    pub tau_expected: i64,
    /// Change in `chi`/`tau` between `n` and `2n` nodes per panel.
    pub quadrature_delta: f64,
}

/// `(χ, τ)` of the smooth closed manifold carried by each diagram.
pub fn expected_topology(id: DiagramId) -> Option<(i64, i64)> {
    match id {
        DiagramId::Su2S4 | DiagramId::So3S4 | DiagramId::So3Hitchin(1) => Some((2, 0)),
        DiagramId::Su2Cp2 | DiagramId::So3Cp2 => Some((3, 1)),
        DiagramId::Su2Cp2Bar | DiagramId::So3S2xS2 => Some((4, 0)),
        DiagramId::So3Hitchin(_) => None,
    }
}

fn densities(st: &FrameState, lambda: f64) -> (f64, f64) {
    let Ok(sh) = lr_from_frame(st) else { return (0.0, 0.0) };
    let (a, b) = ab_coeffs(sh.l, sh.r);
    let (ea, eb) = curv_eigs(sh.r, a, b);
    let w = lambda / 3.0;
    let wa: f64 = (0..3).map(|i| (ea[i] - w).powi(2)).sum();
    let wb: f64 = (0..3).map(|i| (eb[i] - w).powi(2)).sum();
    let vol = st.f.product();
    ((wa + wb + 2.0 * lambda * lambda / 3.0) * vol, (wa - wb) * vol)
}

fn panels(sr: &SolutionReport) -> Vec<(f64, f64)> {
    let b = &sr.branches;
    let mut out = Vec::new();
    let germ_panels = 8;
    for m in 0..germ_panels {
        let x = b.eps_left / germ_panels as f64;
        out.push((m as f64 * x, (m + 1) as f64 * x));
    }
    for s in b.left.segments.iter().chain(b.right.segments.iter()) {
        out.push((s.t0.min(s.t1()), s.t0.max(s.t1())));
    }
    for m in 0..germ_panels {
        let x = b.eps_right / germ_panels as f64;
        out.push((sr.t_total - (m + 1) as f64 * x, sr.t_total - m as f64 * x));
    }
    out
}

fn integrate_numbers(sr: &SolutionReport, nodes: &[(f64, f64)]) -> (f64, f64) {
    let (mut chi, mut tau) = (0.0, 0.0);
    for (a, b) in panels(sr) {
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        for &(x, w) in nodes {
            let (dc, dt) = densities(&sr.profile(c + h * x), sr.lambda);
            chi += w * h * dc;
            tau += w * h * dt;
        }
    }
    let v = sr.diagram.orbit_volume;
    (KAPPA_CHI * v * chi, KAPPA_TAU * v * tau)
}

/// Gauss–Bonnet and signature integrals by composite Gauss–Legendre
/// quadrature over each germ panel and each accepted integrator step.
pub fn characteristic_numbers(sr: &SolutionReport) -> Result<TopologyReport, DiagError> {
    let (chi_e, tau_e) = expected_topology(sr.diagram.id).ok_or_else(|| DiagError::Unsupported(sr.diagram.id.to_string()))?;
    let (c1, t1) = integrate_numbers(sr, &gauss_legendre(8));
    let (c2, t2) = integrate_numbers(sr, &gauss_legendre(16));
    Ok(TopologyReport {
        chi: c2,
        tau: t2,
        chi_expected: chi_e,
        tau_expected: tau_e,
        quadrature_delta: (c2 - c1).abs().max((t2 - t1).abs()),
    })
}

// ---------------------------------------------------------------------------
// Ratio maximum principle

/// Ordered pairs `(i, j)` (one-based) whose ratio `f_i/f_j` is asserted to
/// stay at most 1 on the given diagram.
pub fn ratio_bound_set(id: DiagramId) -> Vec<(usize, usize)> {
    match id {
        DiagramId::Su2S4 => vec![(1, 2), (2, 1), (2, 3), (3, 2), (3, 1), (1, 3)],
        DiagramId::Su2Cp2 => vec![(1, 2), (2, 1), (3, 1), (3, 2)],
        DiagramId::Su2Cp2Bar => vec![(1, 2), (1, 3), (2, 3), (3, 2)],
        _ => Vec::new(),
    }
}

pub const ALL_ORDERED_PAIRS: [(usize, usize); 6] = [(1, 2), (2, 1), (2, 3), (3, 2), (3, 1), (1, 3)];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    /// One-based `(i, j)` for `u_ij = log(f_i/f_j)`.
    pub pair: (usize, usize),
    pub sup_u: f64,
    pub t_at_sup: f64,
    /// The supremum is attained away from the ends.
    pub interior: bool,
    /// Residual of `u'' + S u' = 4(f_i²-f_j²)(f_i²+f_j²-f_k²)/(f_i²f_j²f_k²)`
    /// with `u''` from finite differences of the profile.
    pub residual: f64,
}

fn u_of(sr: &SolutionReport, t: f64, i: usize, j: usize) -> f64 {
    let f = sr.profile(t).f;
    (f[i] / f[j]).ln()
}

fn du_of(sr: &SolutionReport, t: f64, i: usize, j: usize) -> f64 {
    let st = sr.profile(t);
    st.df[i] / st.f[i] - st.df[j] / st.f[j]
}

/// Residual of the ratio equation at `t` for zero-based `(i, j)`. The
/// difference step shrinks like `d^1.5` with the distance `d` to the nearer
/// end, where `u` behaves like `log d`.
pub fn ratio_equation_residual(sr: &SolutionReport, t: f64, i: usize, j: usize) -> f64 {
    let k = 3 - i - j;
    let dist = t.min(sr.t_total - t);
    let h = 1e-3f64.min(1e-2 * dist.powf(1.5));
    let d = |h: f64| (du_of(sr, t + h, i, j) - du_of(sr, t - h, i, j)) / (2.0 * h);
    let ddu = (4.0 * d(0.5 * h) - d(h)) / 3.0;
    let st = sr.profile(t);
    let f = st.f;
    let s = (0..3).map(|n| st.df[n] / f[n]).sum::<f64>();
    let (fi2, fj2, fk2) = (f[i] * f[i], f[j] * f[j], f[k] * f[k]);
    let rhs = 4.0 * (fi2 - fj2) * (fi2 + fj2 - fk2) / (fi2 * fj2 * fk2);
    ddu + s * du_of(sr, t, i, j) - rhs
}

/// Locates `sup u_ij` on a uniform grid refined by golden-section search and
/// evaluates the ratio equation there. The search and the residual stay
/// `edge` away from the ends.
pub fn max_principle_check(sr: &SolutionReport, pairs: &[(usize, usize)], grid: usize, edge: f64) -> Vec<RatioReport> {
    let (lo, hi) = (edge, sr.t_total - edge);
    pairs
        .iter()
        .map(|&(pi, pj)| {
            let (i, j) = (pi - 1, pj - 1);
            let dt = (hi - lo) / grid as f64;
            let (mut best, mut tb) = (f64::NEG_INFINITY, lo);
            for m in 0..=grid {
                let t = lo + dt * m as f64;
                let u = u_of(sr, t, i, j);
                if u > best {
                    best = u;
                    tb = t;
                }
            }
            let (mut a, mut b) = ((tb - dt).max(lo), (tb + dt).min(hi));
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                let x1 = b - g * (b - a);
                let x2 = a + g * (b - a);
                if u_of(sr, x1, i, j) >= u_of(sr, x2, i, j) {
                    b = x2;
                } else {
                    a = x1;
                }
            }
            let tm = 0.5 * (a + b);
            let um = u_of(sr, tm, i, j);
            if um > best {
                best = um;
                tb = tm;
            }
            let interior = tb > lo + dt && tb < hi - dt;
            RatioReport {
                pair: (pi, pj),
                sup_u: best,
                t_at_sup: tb,
                interior,
                residual: ratio_equation_residual(sr, tb, i, j),
            }
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Independent finite-difference curvature

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdCurvature {
    pub a_eig: Triple,
    pub b_eig: Triple,
    pub constraint: f64,
}

fn fd_curvature_at(f: &dyn Fn(f64) -> Triple, t: f64, h: f64, lambda: f64) -> Result<FdCurvature, DiagError> {
    let f0 = f(t);
    let df = (f(t + h) - f(t - h)) * (0.5 / h);
    let st = FrameState::new(t, f0, df);
    let sh = lr_from_frame(&st)?;
    let (a, b) = ab_coeffs(sh.l, sh.r);
    let (a_eig, b_eig) = curv_eigs(sh.r, a, b);
    let p = EinsteinParams { lambda };
    Ok(FdCurvature { a_eig, b_eig, constraint: constraint_residual(sh.l, sh.r, &p) })
}

fn fd_gap(x: &FdCurvature, y: &FdCurvature) -> f64 {
    x.a_eig.dist_inf(y.a_eig).max(x.b_eig.dist_inf(y.b_eig)).max((x.constraint - y.constraint).abs())
}

/// Recomputes `a`, `b` and the constraint from `f` alone, with `f'` from
/// centered differences of step `h`. The error is estimated against step
/// `h/2`; an estimate above `tol` is an error.
pub fn fd_curvature_oracle(
    f: &dyn Fn(f64) -> Triple,
    t: f64,
    h: f64,
    lambda: f64,
    tol: f64,
) -> Result<FdCurvature, DiagError> {
    let c1 = fd_curvature_at(f, t, h, lambda)?;
    let c2 = fd_curvature_at(f, t, 0.5 * h, lambda)?;
    let estimate = fd_gap(&c1, &c2) * 4.0 / 3.0;
    if !(estimate <= tol) {
        return Err(DiagError::StepTooLarge { h, estimate, tol });
    }
    Ok(c1)
}

// ---------------------------------------------------------------------------
// Derived-equation cross-validation

/// Every quantity whose evolution equation is cross-checked.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedValues {
    pub a_coef: Triple,
    pub b_coef: Triple,
    pub a_eig: Triple,
    pub b_eig: Triple,
    pub gaps: [f64; 4],
}

impl DerivedValues {
    pub fn from_state(st: &FrameState) -> Result<Self, OdeError> {
        let sh = lr_from_frame(st)?;
        let (a, b) = ab_coeffs(sh.l, sh.r);
        let (ea, eb) = curv_eigs(sh.r, a, b);
        let fg = GapState::from_eigs(GapKind::F, ea);
        let eg = GapState::from_eigs(GapKind::E, eb);
        Ok(DerivedValues { a_coef: a, b_coef: b, a_eig: ea, b_eig: eb, gaps: [fg.g1, fg.g2, eg.g1, eg.g2] })
    }

    /// Analytic derivatives from `ab_rhs`, `curv_eigs_rhs` and `gap_rhs`.
    pub fn rates(st: &FrameState) -> Result<Self, OdeError> {
        let sh = lr_from_frame(st)?;
        let v = Self::from_state(st)?;
        let (da, db) = ab_rhs(v.a_coef, v.b_coef, sh.r);
        let (dea, deb) = curv_eigs_rhs(v.a_eig, v.b_eig, v.a_coef, v.b_coef);
        let (f1, f2) = gap_rhs(GapState::from_eigs(GapKind::F, v.a_eig), v.a_coef);
        let (e1, e3) = gap_rhs(GapState::from_eigs(GapKind::E, v.b_eig), v.b_coef);
        Ok(DerivedValues { a_coef: da, b_coef: db, a_eig: dea, b_eig: deb, gaps: [f1, f2, e1, e3] })
    }

    fn families(&self) -> [Vec<f64>; 6] {
        [
            self.a_coef.as_array().to_vec(),
            self.b_coef.as_array().to_vec(),
            self.a_eig.as_array().to_vec(),
            self.b_eig.as_array().to_vec(),
            self.gaps[..2].to_vec(),
            self.gaps[2..].to_vec(),
        ]
    }
}

pub const FAMILY_NAMES: [&str; 6] = ["A", "B", "a", "b", "F", "E"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FamilyConsistency {
    pub err_h: f64,
    pub err_half: f64,
    pub slope: f64,
}

/// Compares centered differences (steps `h`, `h/2`) of each derived family
/// along `sampler` against its analytic rate at `t`.
pub fn derived_equation_check(
    sampler: &dyn Fn(f64) -> FrameState,
    t: f64,
    h: f64,
) -> Result<[FamilyConsistency; 6], OdeError> {
    let exact = DerivedValues::rates(&sampler(t))?.families();
    let fd = |h: f64| -> Result<[Vec<f64>; 6], OdeError> {
        let p = DerivedValues::from_state(&sampler(t + h))?.families();
        let m = DerivedValues::from_state(&sampler(t - h))?.families();
        Ok(std::array::from_fn(|n| p[n].iter().zip(&m[n]).map(|(x, y)| (x - y) / (2.0 * h)).collect()))
    };
    let d1 = fd(h)?;
    let d2 = fd(0.5 * h)?;
    let err = |d: &[f64], e: &[f64]| d.iter().zip(e).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    Ok(std::array::from_fn(|n| {
        let e1 = err(&d1[n], &exact[n]);
        let e2 = err(&d2[n], &exact[n]);
        FamilyConsistency { err_h: e1, err_half: e2, slope: (e1 / e2).log2() }
    }))
}
