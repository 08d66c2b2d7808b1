//! Two-end shooting: germ parameters and total length `T` are tuned until
//! the left and right integrations agree in `(f, f')` at `t = θT`.

use crate::boundary::{germ_eval, series_solve, BoundaryError, DiagramId, GroupDiagram, SeriesGerm, Side};
use crate::integrator::{drift_of, integrate, DriftReport, IntegrateError, IntegratorConfig, Sample, Termination, Trajectory};
use crate::odes::{EinsteinParams, FrameDiagnostics, FrameState, RATIO_PAIRS};
use crate::triple::Triple;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error("inadmissible unknowns: {0}")]
    Inadmissible(String),
    #[error("shooting setup: {0}")]
    Setup(String),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error("no convergence after {iterations} iterations, best |r|inf = {residual:e}")]
    NonConvergence { best: Vec<f64>, residual: f64, iterations: usize },
    #[error("match residual is not finite at the guess")]
    NonFiniteStart,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingConfig {
    pub lambda: f64,
    /// Match point as a fraction of `T`.
    pub theta: f64,
    pub germ_order: usize,
    pub germ_radius: f64,
    /// Germ residual bound used to choose the start offset.
    pub germ_tol: f64,
    pub integrator: IntegratorConfig,
    pub max_iter: usize,
    /// Convergence bound on the sup-norm of the match residual.
    pub tol: f64,
    /// Relative forward-difference step.
    pub fd_step: f64,
}

impl Default for ShootingConfig {
    fn default() -> Self {
        ShootingConfig {
            lambda: 3.0,
            theta: 0.5,
            germ_order: crate::boundary::DEFAULT_GERM_ORDER,
            germ_radius: crate::boundary::DEFAULT_GERM_RADIUS,
            germ_tol: 1e-12,
            integrator: IntegratorConfig::default(),
            max_iter: 60,
            tol: 1e-9,
            fd_step: 1e-7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShootingProblem {
    pub diagram: GroupDiagram,
    pub cfg: ShootingConfig,
}

/// Differences `(f, f')_left - (f, f')_right` at the match point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResidual(pub [f64; 6]);

impl MatchResidual {
    pub fn sup(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |m, x| if x.is_finite() { m.max(x.abs()) } else { f64::INFINITY })
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }
}

/// Both germs and both integrations for one unknown vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branches {
    pub left_germ: SeriesGerm,
    pub right_germ: SeriesGerm,
    pub eps_left: f64,
    pub eps_right: f64,
    pub t_total: f64,
    pub t_match: f64,
    pub left: Trajectory,
    pub right: Trajectory,
}

impl ShootingProblem {
    pub fn new(diagram: GroupDiagram, cfg: ShootingConfig) -> Result<Self, ShootError> {
        if !(cfg.theta > 0.0 && cfg.theta < 1.0) {
            return Err(ShootError::Setup(format!("theta = {} outside (0, 1)", cfg.theta)));
        }
        EinsteinParams::new(cfg.lambda).map_err(|e| ShootError::Setup(e.to_string()))?;
        // Six match conditions, one of them implied by the conserved constraint.
        if diagram.unknown_count() != 5 {
            return Err(ShootError::Setup(format!(
                "{} has {} unknowns, expected 5 = 6 match conditions - 1 constraint",
                diagram.id,
                diagram.unknown_count()
            )));
        }
        Ok(ShootingProblem { diagram, cfg })
    }

    pub fn for_diagram(id: DiagramId) -> Result<Self, ShootError> {
        Self::new(GroupDiagram::new(id)?, ShootingConfig::default())
    }

    pub fn unknown_names(&self) -> Vec<String> {
        let mut out: Vec<String> = self.diagram.left.free_params.iter().map(|n| format!("left.{n}")).collect();
        out.extend(self.diagram.right.free_params.iter().map(|n| format!("right.{n}")));
        out.push("T".into());
        out
    }

    pub fn n_unknowns(&self) -> usize {
        self.diagram.unknown_count()
    }

    fn split<'a>(&self, u: &'a [f64]) -> (&'a [f64], &'a [f64], f64) {
        let nl = self.diagram.left.free_params.len();
        let nr = self.diagram.right.free_params.len();
        (&u[..nl], &u[nl..nl + nr], u[nl + nr])
    }

    pub fn check_admissible(&self, u: &[f64]) -> Result<(), ShootError> {
        if u.len() != self.n_unknowns() {
            return Err(ShootError::Inadmissible(format!("expected {} unknowns, got {}", self.n_unknowns(), u.len())));
        }
        if let Some(x) = u.iter().find(|x| !x.is_finite()) {
            return Err(ShootError::Inadmissible(format!("non-finite entry {x}")));
        }
        let (l, r, t) = self.split(u);
        if !(t > 0.0) {
            return Err(ShootError::Inadmissible(format!("T = {t} must be positive")));
        }
        for (side, vals) in [(Side::Left, l), (Side::Right, r)] {
            let end = self.diagram.end(side);
            for (name, v) in end.free_params.iter().zip(vals) {
                if name == "h" && !(*v > 0.0) {
                    return Err(ShootError::Inadmissible(format!("{side:?} h = {v} must be positive")));
                }
            }
        }
        Ok(())
    }

    fn params(&self) -> EinsteinParams {
        EinsteinParams { lambda: self.cfg.lambda }
    }

    /// Builds both germs and integrates both ends to the match point.
    pub fn shoot(&self, u: &[f64]) -> Result<Branches, ShootError> {
        self.check_admissible(u)?;
        let (l, r, t_total) = self.split(u);
        let c = &self.cfg;
        let t_match = c.theta * t_total;
        let radius = c.germ_radius.min(0.4 * t_match).min(0.4 * (t_total - t_match));
        let mut lg = series_solve(&self.diagram.left, l, c.lambda, c.germ_order)?;
        let mut rg = series_solve(&self.diagram.right, r, c.lambda, c.germ_order)?;
        lg.radius = radius;
        rg.radius = radius;
        let eps_l = lg.choose_offset(c.germ_tol)?;
        let eps_r = rg.choose_offset(c.germ_tol)?;
        let p = self.params();
        let sl = germ_eval(&lg, eps_l)?;
        let sr = germ_eval(&rg, eps_r)?;
        let start_l = FrameState::new(eps_l, sl.f, sl.df);
        let start_r = FrameState::new(t_total - eps_r, sr.f, -sr.df);
        let left = integrate(start_l, 1.0, t_match, &c.integrator, &p)?;
        let right = integrate(start_r, -1.0, t_match, &c.integrator, &p)?;
        Ok(Branches { left_germ: lg, right_germ: rg, eps_left: eps_l, eps_right: eps_r, t_total, t_match, left, right })
    }

    fn residual_of(b: &Branches) -> MatchResidual {
        let ok = |t: &Trajectory| matches!(t.termination, Termination::ReachedTarget);
        if !(ok(&b.left) && ok(&b.right)) {
            return MatchResidual([f64::NAN; 6]);
        }
        let a = b.left.last().unwrap().state.to_array();
        let c = b.right.last().unwrap().state.to_array();
        MatchResidual(std::array::from_fn(|n| a[n] - c[n]))
    }
}

/// Match residual at `u`; integration events yield non-finite entries.
pub fn match_residual(pr: &ShootingProblem, u: &[f64]) -> Result<MatchResidual, ShootError> {
    match pr.shoot(u) {
        Ok(b) => Ok(ShootingProblem::residual_of(&b)),
        Err(ShootError::Inadmissible(m)) => Err(ShootError::Inadmissible(m)),
        Err(ShootError::Boundary(BoundaryError::OffsetNotFound { .. })) | Err(ShootError::Integrate(_)) => {
            Ok(MatchResidual([f64::NAN; 6]))
        }
        Err(e) => Err(e),
    }
}

fn penalized(pr: &ShootingProblem, u: &[f64]) -> Option<DVector<f64>> {
    match match_residual(pr, u) {
        Ok(r) if r.is_finite() => Some(DVector::from_row_slice(&r.0)),
        _ => None,
    }
}

fn jacobian(pr: &ShootingProblem, u: &[f64], r0: &DVector<f64>) -> Option<DMatrix<f64>> {
    let n = u.len();
    let mut j = DMatrix::zeros(6, n);
    for k in 0..n {
        let step = pr.cfg.fd_step * (1.0 + u[k].abs());
        let mut up = u.to_vec();
        up[k] += step;
        let col = match penalized(pr, &up) {
            Some(r) => (r - r0) / step,
            None => {
                up[k] = u[k] - step;
                (r0 - penalized(pr, &up)?) / step
            }
        };
        j.set_column(k, &col);
    }
    Some(j)
}

/// Singular values of the match Jacobian, largest first.
pub fn jacobian_singular_values(pr: &ShootingProblem, u: &[f64]) -> Option<Vec<f64>> {
    let r0 = penalized(pr, u)?;
    let j = jacobian(pr, u, &r0)?;
    let mut sv: Vec<f64> = j.svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Some(sv)
}

/// First finite-residual point among `guess` with `T` rescaled by
/// `1, 0.95, 1.05, 0.9, ...` (the left branch does not depend on `T`; a
/// shorter or longer interval moves the match point back into the range
/// reached by both branches).
fn restore_feasibility(pr: &ShootingProblem, guess: &[f64]) -> Option<(Vec<f64>, DVector<f64>)> {
    let n = guess.len();
    let mut factors = vec![1.0];
    for k in 1..=10 {
        let d = 0.05 * k as f64;
        factors.push(1.0 - d);
        factors.push(1.0 + d);
    }
    factors.into_iter().find_map(|c| {
        let mut u = guess.to_vec();
        u[n - 1] *= c;
        penalized(pr, &u).map(|r| (u, r))
    })
}

/// Damped Gauss–Newton on the match residual.
pub fn solve(pr: &ShootingProblem, guess: &[f64]) -> Result<SolutionReport, ShootError> {
    pr.check_admissible(guess)?;
    let (mut u, mut r) = restore_feasibility(pr, guess).ok_or(ShootError::NonFiniteStart)?;
    let mut iterations = 0;
    while r.amax() >= pr.cfg.tol {
        if iterations >= pr.cfg.max_iter {
            return Err(ShootError::NonConvergence { best: u, residual: r.amax(), iterations });
        }
        iterations += 1;
        let Some(j) = jacobian(pr, &u, &r) else {
            return Err(ShootError::NonConvergence { best: u, residual: r.amax(), iterations });
        };
        let svd = j.svd(true, true);
        let delta = svd.solve(&(-&r), 1e-12).expect("svd with u and v");
        let norm0 = r.norm();
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let trial: Vec<f64> = u.iter().zip(delta.iter()).map(|(a, d)| a + alpha * d).collect();
            if pr.check_admissible(&trial).is_ok() {
                if let Some(rt) = penalized(pr, &trial) {
                    if rt.norm() < norm0 {
                        accepted = Some((trial, rt));
                        break;
                    }
                }
            }
            alpha *= 0.5;
        }
        match accepted {
            Some((nu, nr)) => {
                u = nu;
                r = nr;
            }
            None => return Err(ShootError::NonConvergence { best: u, residual: r.amax(), iterations }),
        }
    }
    let branches = pr.shoot(&u)?;
    let sv = jacobian_singular_values(pr, &u).unwrap_or_default();
    Ok(SolutionReport::assemble(pr, u, r.amax(), iterations, branches, sv))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub u: Vec<f64>,
    /// Sup-norm of the match residual (infinite after an event).
    pub residual: f64,
}

/// Cartesian grid from per-unknown `(lo, hi, count)` ranges.
pub fn grid_from_box(ranges: &[(f64, f64, usize)]) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for &(lo, hi, n) in ranges {
        let vals: Vec<f64> = if n <= 1 {
            vec![0.5 * (lo + hi)]
        } else {
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        };
        out = out
            .into_iter()
            .flat_map(|p| vals.iter().map(move |v| {
                let mut q = p.clone();
                q.push(*v);
                q
            }))
            .collect();
    }
    if ranges.is_empty() {
        Vec::new()
    } else {
        out
    }
}

/// Residual map over `grid`, evaluated on at most `jobs` worker threads.
/// Output order matches the grid.
pub fn scan(pr: &ShootingProblem, grid: &[Vec<f64>], jobs: usize) -> Vec<ScanPoint> {
    let eval = |u: &Vec<f64>| {
        let residual = match match_residual(pr, u) {
            Ok(r) => r.sup(),
            Err(_) => f64::INFINITY,
        };
        ScanPoint { u: u.clone(), residual }
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build();
    match pool {
        Ok(pool) => pool.install(|| grid.par_iter().map(eval).collect()),
        Err(_) => grid.iter().map(eval).collect(),
    }
}

/// Distinct converged solutions obtained by polishing the `seeds` best scan
/// points; solutions closer than `merge_tol` (relative) are merged.
pub fn basins(pr: &ShootingProblem, points: &[ScanPoint], seeds: usize, merge_tol: f64, jobs: usize) -> Vec<SolutionReport> {
    let mut order: Vec<&ScanPoint> = points.iter().filter(|p| p.residual.is_finite()).collect();
    order.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let starts: Vec<Vec<f64>> = order.iter().take(seeds).map(|p| p.u.clone()).collect();
    let run = |u: &Vec<f64>| solve(pr, u).ok();
    let solved: Vec<Option<SolutionReport>> = match rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build() {
        Ok(pool) => pool.install(|| starts.par_iter().map(run).collect()),
        Err(_) => starts.iter().map(run).collect(),
    };
    let mut out: Vec<SolutionReport> = Vec::new();
    for s in solved.into_iter().flatten() {
        let dup = out.iter().any(|o| {
            o.unknowns.iter().zip(&s.unknowns).all(|(a, b)| (a - b).abs() <= merge_tol * (1.0 + a.abs()))
        });
        if !dup {
            out.push(s);
        }
    }
    out
}

/// Shipped initial guess at `λ = 3`, built from the closed-form solutions
/// where they exist and from development runs otherwise.
pub fn default_guess(id: DiagramId) -> Vec<f64> {
    let s3 = 3f64.sqrt();
    match id {
        DiagramId::Su2S4 => vec![-1.0 / 6.0, -1.0 / 6.0, -1.0 / 6.0, -1.0 / 6.0, PI],
        DiagramId::So3S4 | DiagramId::So3Hitchin(1) => vec![2.0 * s3, -16.0 * s3, 2.0 * s3, -16.0 * s3, PI / 3.0],
        DiagramId::Su2Cp2 => vec![-1.0 / 12.0, -1.0 / 3.0, SQRT_2, 0.0, PI / SQRT_2],
        DiagramId::So3Cp2 => vec![2.0 * SQRT_2, 12.0, 2.0, -8.0 * SQRT_2, PI / (2.0 * SQRT_2)],
        DiagramId::Su2Cp2Bar => vec![1.07, 0.0, 1.07, 0.0, 1.885],
        DiagramId::So3S2xS2 => {
            let h = 2.0 * SQRT_2 / s3;
            vec![h, -4.0, h, 4.0, PI / 6f64.sqrt()]
        }
        DiagramId::So3Hitchin(2) => vec![2.0, -8.0 * SQRT_2, 2.0 * SQRT_2, -12.0, PI / (2.0 * SQRT_2)],
        DiagramId::So3Hitchin(_) => vec![1.453, -7.18, 2.58, -6.2, 1.161],
    }
}

/// Power of `c` by which an unknown scales under `f -> c f`, `t -> c t`:
/// `h` and `T` are lengths, `cI_N` multiplies `s^N` in `f_I`, and `p_N`,
/// `d_N` multiply `s^N` in a sum or difference of squares.
pub fn unknown_weight(name: &str) -> Option<i32> {
    let base = name.rsplit('.').next()?;
    if base == "h" || base == "T" {
        return Some(1);
    }
    let (head, n) = base.split_once('_')?;
    let n: i32 = n.parse().ok()?;
    match head.as_bytes().first()? {
        b'c' => Some(1 - n),
        b'p' | b'd' => Some(2 - n),
        _ => None,
    }
}

/// Unknowns of the homothetic solution with factor `c`.
pub fn scale_unknowns(names: &[String], u: &[f64], c: f64) -> Vec<f64> {
    names.iter().zip(u).map(|(n, &x)| x * c.powi(unknown_weight(n).unwrap_or(0))).collect()
}

/// [`default_guess`] carried to the problem's Einstein constant.
pub fn default_guess_for(pr: &ShootingProblem) -> Vec<f64> {
    let c = (3.0 / pr.cfg.lambda).sqrt();
    scale_unknowns(&pr.unknown_names(), &default_guess(pr.diagram.id), c)
}

/// Default scan box around the shipped guess: `±25%` (or `±0.5` for
/// entries near zero), three points per unknown.
pub fn default_scan_box(id: DiagramId) -> Vec<(f64, f64, usize)> {
    if id == DiagramId::Su2Cp2Bar {
        return vec![(0.5, 1.4, 4), (-0.2, 0.2, 3), (0.5, 1.4, 4), (-0.2, 0.2, 3), (1.0, 3.0, 5)];
    }
    default_guess(id)
        .iter()
        .map(|&g| {
            let w = if g.abs() < 0.5 { 0.5 } else { 0.25 * g.abs() };
            (g - w, g + w, 3)
        })
        .collect()
}

/// [`default_scan_box`] carried to the problem's Einstein constant.
pub fn default_scan_box_for(pr: &ShootingProblem) -> Vec<(f64, f64, usize)> {
    let c = (3.0 / pr.cfg.lambda).sqrt();
    let names = pr.unknown_names();
    default_scan_box(pr.diagram.id)
        .into_iter()
        .zip(&names)
        .map(|((lo, hi, n), name)| {
            let w = c.powi(unknown_weight(name).unwrap_or(0));
            (lo * w, hi * w, n)
        })
        .collect()
}

/// Converged closed metric with its assembled profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub diagram: GroupDiagram,
    pub lambda: f64,
    pub unknown_names: Vec<String>,
    pub unknowns: Vec<f64>,
    pub t_total: f64,
    pub residual: f64,
    pub iterations: usize,
    pub jacobian_singular_values: Vec<f64>,
    pub branches: Branches,
    /// Samples over `(0, T)` in increasing `t`: germ, left run, right run, germ.
    pub samples: Vec<Sample>,
    pub theta: f64,
}

const GERM_SAMPLES: usize = 16;

impl SolutionReport {
    fn assemble(pr: &ShootingProblem, u: Vec<f64>, residual: f64, iterations: usize, b: Branches, sv: Vec<f64>) -> Self {
        let p = EinsteinParams { lambda: pr.cfg.lambda };
        let mut samples = Vec::new();
        let push = |samples: &mut Vec<Sample>, st: FrameState| {
            if let Ok(diag) = FrameDiagnostics::compute(&st, &p) {
                samples.push(Sample { state: st, diag });
            }
        };
        for n in 1..GERM_SAMPLES {
            let s = b.eps_left * n as f64 / GERM_SAMPLES as f64;
            let (f, df, _) = b.left_germ.eval_all(s);
            push(&mut samples, FrameState::new(s, f, df));
        }
        samples.extend(b.left.samples.iter().copied());
        samples.extend(b.right.samples.iter().rev().skip(1).copied());
        for n in (1..GERM_SAMPLES).rev() {
            let s = b.eps_right * n as f64 / GERM_SAMPLES as f64;
            let (f, df, _) = b.right_germ.eval_all(s);
            push(&mut samples, FrameState::new(b.t_total - s, f, -df));
        }
        SolutionReport {
            diagram: pr.diagram.clone(),
            lambda: pr.cfg.lambda,
            unknown_names: pr.unknown_names(),
            t_total: b.t_total,
            unknowns: u,
            residual,
            iterations,
            jacobian_singular_values: sv,
            branches: b,
            samples,
            theta: pr.cfg.theta,
        }
    }

    /// Profile `(f, f')` at any `t ∈ [0, T]`; lengths vanish at collapsing ends.
    pub fn profile(&self, t: f64) -> FrameState {
        let b = &self.branches;
        let t = t.clamp(0.0, self.t_total);
        if t <= b.eps_left {
            let (f, df, _) = b.left_germ.eval_all(t);
            return FrameState::new(t, f, df);
        }
        let s = self.t_total - t;
        if s <= b.eps_right {
            let (f, df, _) = b.right_germ.eval_all(s);
            return FrameState::new(t, f, -df);
        }
        let tr = if t <= b.t_match { &b.left } else { &b.right };
        tr.dense_state(t).unwrap_or_else(|| {
            let other = if t <= b.t_match { &b.right } else { &b.left };
            other.dense_state(t).expect("t inside the integrated range")
        })
    }

    /// `n` equally spaced interior samples `t_m = T m/(n+1)`.
    pub fn uniform_profile(&self, n: usize) -> Vec<FrameState> {
        (1..=n).map(|m| self.profile(self.t_total * m as f64 / (n + 1) as f64)).collect()
    }

    pub fn drift(&self) -> DriftReport {
        drift_of(self.samples.iter().map(|s| &s.diag), self.lambda).unwrap_or(DriftReport {
            constraint: f64::NAN,
            trace_a: f64::NAN,
            trace_b: f64::NAN,
        })
    }

    pub fn jacobian_rank(&self, rel_tol: f64) -> usize {
        let smax = self.jacobian_singular_values.first().copied().unwrap_or(0.0);
        self.jacobian_singular_values.iter().filter(|&&s| s > rel_tol * smax).count()
    }

    /// Limit of the non-collapsing lengths at one end (`h`), from the germ.
    pub fn end_value(&self, side: Side) -> Option<f64> {
        match side {
            Side::Left => self.branches.left_germ.end_value,
            Side::Right => self.branches.right_germ.end_value,
        }
    }

    /// The homothetic solution `f -> c f`, `t -> c t`, `λ -> λ/c²`.
    pub fn homothety(&self, c: f64) -> SolutionReport {
        let lambda = self.lambda / (c * c);
        let p = EinsteinParams { lambda };
        let scale_state = |s: &FrameState| FrameState::new(c * s.t, s.f * c, s.df);
        let scale_samples = |v: &[Sample]| -> Vec<Sample> {
            v.iter()
                .map(|s| {
                    let st = scale_state(&s.state);
                    Sample { state: st, diag: FrameDiagnostics::compute(&st, &p).expect("regular sample") }
                })
                .collect()
        };
        let scale_traj = |t: &Trajectory| -> Trajectory {
            let segments = t
                .segments
                .iter()
                .map(|seg| {
                    let mut s = *seg;
                    s.t0 *= c;
                    s.h *= c;
                    for r in s.r.iter_mut() {
                        for v in r.iter_mut().take(3) {
                            *v *= c;
                        }
                    }
                    s
                })
                .collect();
            Trajectory { samples: scale_samples(&t.samples), segments, termination: t.termination, lambda, direction: t.direction }
        };
        let scale_germ = |g: &SeriesGerm| -> SeriesGerm {
            let mut g = g.clone();
            for co in g.coeffs.iter_mut() {
                for (n, x) in co.iter_mut().enumerate() {
                    *x *= c.powi(1 - n as i32);
                }
            }
            g.lambda = lambda;
            g.end_value = g.end_value.map(|h| h * c);
            g.radius *= c;
            g
        };
        let b = &self.branches;
        let branches = Branches {
            left_germ: scale_germ(&b.left_germ),
            right_germ: scale_germ(&b.right_germ),
            eps_left: c * b.eps_left,
            eps_right: c * b.eps_right,
            t_total: c * b.t_total,
            t_match: c * b.t_match,
            left: scale_traj(&b.left),
            right: scale_traj(&b.right),
        };
        SolutionReport {
            lambda,
            unknowns: scale_unknowns(&self.unknown_names, &self.unknowns, c),
            t_total: c * self.t_total,
            branches,
            samples: scale_samples(&self.samples),
            ..self.clone()
        }
    }

    /// `sup_t |f_{σ(i)}(T - t) - f_i(t)|` over `n` interior points.
    pub fn reflection_defect(&self, perm: [usize; 3], n: usize) -> f64 {
        (1..=n)
            .map(|m| {
                let t = self.t_total * m as f64 / (n + 1) as f64;
                let a = self.profile(t).f;
                let b = self.profile(self.t_total - t).f.permute(perm);
                a.dist_inf(b)
            })
            .fold(0.0, f64::max)
    }
}

/// Pairs `(i, j)` (one-based) among `(1,2), (2,3), (3,1)` with
/// `sup_t |log(f_i/f_j)| < tol` over the interior samples.
pub fn detect_equal_pairs(sr: &SolutionReport, tol: f64) -> Vec<(usize, usize)> {
    let interior: Vec<Triple> = sr.uniform_profile(400).iter().map(|s| s.f).collect();
    RATIO_PAIRS
        .iter()
        .filter(|&&(i, j)| interior.iter().all(|f| (f[i] / f[j]).ln().abs() < tol))
        .map(|&(i, j)| (i + 1, j + 1))
        .collect()
}
