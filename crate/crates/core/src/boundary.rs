//! Group-diagram catalog, singular-orbit germs and indicial analysis.
//!
//! Each end of the orbit interval is one of two kinds:
//!
//! * a *nut*: all three directions collapse with unit slope, `f_i = s C_i(s^2)`,
//!   `C_i(0) = 1`;
//! * a *circle*: one direction `c` collapses with slope `ρ`, `f_c = s C(s^2)`,
//!   `C(0) = ρ`, and the remaining pair `(i, j)` satisfies
//!   `f_i^2 + f_j^2 = P(s^2)`, `f_i^2 - f_j^2 = s^e Q(s^2)` with `P(0) = 2h^2`.
//!
//! Coefficients of `C`, `P`, `Q` are fixed order by order by substituting the
//! ansatz into the second-order system. Coefficients left undetermined at
//! their order become the free parameters of the end.

use crate::odes::{frame_rhs, EinsteinParams, FrameState};
use crate::series::Laurent;
use crate::triple::Triple;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundaryError {
    #[error("unknown diagram id `{0}`")]
    UnknownDiagram(String),
    #[error("Hitchin diagram needs k >= 1, got {0}")]
    BadHitchinIndex(i64),
    #[error("germ order {0} is below the minimum of 4")]
    OrderTooLow(usize),
    #[error("expected {expected} free parameter values, got {got}")]
    FreeParamCount { expected: usize, got: usize },
    #[error("end value h = {0} must be positive")]
    NonPositiveEndValue(f64),
    #[error("germ data inconsistent at residual order {order}: residual {residual:e}")]
    Inconsistent { order: i32, residual: f64 },
    #[error("resonance at residual order {order}: undetermined coefficient `{slot}` not declared free")]
    Resonance { order: i32, slot: String },
    #[error("germ evaluated at s = {s} outside (0, {radius}]")]
    OutsideValidity { s: f64, radius: f64 },
    #[error("no start offset in [{floor}, {radius}] achieves germ residual {tol:e}")]
    OffsetNotFound { radius: f64, floor: f64, tol: f64 },
    #[error("indicial matrix has complex eigenvalues")]
    ComplexEigenvalues,
    #[error("decay check needs at least {need} samples, got {got}")]
    InsufficientSamples { need: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagramId {
    Su2S4,
    So3S4,
    Su2Cp2,
    So3Cp2,
    Su2Cp2Bar,
    So3S2xS2,
    So3Hitchin(u32),
}

impl DiagramId {
    pub fn parse(id: &str, k: Option<i64>) -> Result<Self, BoundaryError> {
        let d = match id.to_ascii_lowercase().replace('-', "_").as_str() {
            "su2_s4" => DiagramId::Su2S4,
            "so3_s4" => DiagramId::So3S4,
            "su2_cp2" => DiagramId::Su2Cp2,
            "so3_cp2" => DiagramId::So3Cp2,
            "su2_cp2bar" => DiagramId::Su2Cp2Bar,
            "so3_s2xs2" => DiagramId::So3S2xS2,
            "so3_hitchin" => {
                let k = k.unwrap_or(1);
                if k < 1 || k > u32::MAX as i64 {
                    return Err(BoundaryError::BadHitchinIndex(k));
                }
                DiagramId::So3Hitchin(k as u32)
            }
            _ => return Err(BoundaryError::UnknownDiagram(id.to_string())),
        };
        Ok(d)
    }

    pub fn name(&self) -> &'static str {
        match self {
            DiagramId::Su2S4 => "su2_s4",
            DiagramId::So3S4 => "so3_s4",
            DiagramId::Su2Cp2 => "su2_cp2",
            DiagramId::So3Cp2 => "so3_cp2",
            DiagramId::Su2Cp2Bar => "su2_cp2bar",
            DiagramId::So3S2xS2 => "so3_s2xs2",
            DiagramId::So3Hitchin(_) => "so3_hitchin",
        }
    }

    pub fn hitchin_k(&self) -> Option<u32> {
        match self {
            DiagramId::So3Hitchin(k) => Some(*k),
            _ => None,
        }
    }
}

impl fmt::Display for DiagramId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramId::So3Hitchin(k) => write!(f, "so3_hitchin(k={k})"),
            d => f.write_str(d.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EndKind {
    Nut,
    Circle {
        collapse: usize,
        slope: f64,
        pair: (usize, usize),
        /// Vanishing order of `f_i^2 - f_j^2` in `s`.
        exponent: u32,
    },
}

/// Parity pattern of the non-collapsing directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Parity {
    /// Every `f_i` is odd in `s`.
    OddLengths,
    /// `f_i^2 + f_j^2` even, `f_i^2 - f_j^2 = s^e × (even)`.
    PairSplit { pair: (usize, usize), exponent: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndCondition {
    pub side: Side,
    pub kind: EndKind,
    pub collapsing: Vec<usize>,
    /// Collapse slope per direction, zero for non-collapsing ones.
    pub slopes: Triple,
    pub parity: Parity,
    /// Names of the free germ parameters, discovered by [`series_solve`].
    pub free_params: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupDiagram {
    pub id: DiagramId,
    pub left: EndCondition,
    pub right: EndCondition,
    /// Volume of the principal orbit when `σ_1, σ_2, σ_3` are orthonormal.
    pub orbit_volume: f64,
}

fn circle(side: Side, collapse: usize, slope: f64, pair: (usize, usize), exponent: u32) -> EndCondition {
    let mut slopes = Triple::ZERO;
    slopes[collapse] = slope;
    let kind = EndKind::Circle { collapse, slope, pair, exponent };
    let mut end = EndCondition {
        side,
        kind,
        collapsing: vec![collapse],
        slopes,
        parity: Parity::PairSplit { pair, exponent },
        free_params: Vec::new(),
    };
    end.free_params = discover_free_params(&end);
    end
}

fn nut(side: Side) -> EndCondition {
    let mut end = EndCondition {
        side,
        kind: EndKind::Nut,
        collapsing: vec![0, 1, 2],
        slopes: Triple::splat(1.0),
        parity: Parity::OddLengths,
        free_params: Vec::new(),
    };
    end.free_params = discover_free_params(&end);
    end
}

impl GroupDiagram {
    pub fn new(id: DiagramId) -> Result<Self, BoundaryError> {
        use Side::{Left, Right};
        let pi2 = PI * PI;
        let (left, right, v) = match id {
            DiagramId::Su2S4 => (nut(Left), nut(Right), 2.0 * pi2),
            DiagramId::So3S4 => (circle(Left, 0, 4.0, (1, 2), 1), circle(Right, 1, 4.0, (0, 2), 1), pi2 / 4.0),
            DiagramId::Su2Cp2 => (nut(Left), circle(Right, 2, 1.0, (0, 1), 4), 2.0 * pi2),
            DiagramId::So3Cp2 => (circle(Left, 0, 2.0, (1, 2), 2), circle(Right, 2, 4.0, (0, 1), 1), pi2 / 2.0),
            DiagramId::Su2Cp2Bar => (circle(Left, 0, 1.0, (1, 2), 4), circle(Right, 0, 1.0, (1, 2), 4), 2.0 * pi2),
            DiagramId::So3S2xS2 => (circle(Left, 2, 2.0, (0, 1), 2), circle(Right, 0, 2.0, (1, 2), 2), pi2),
            DiagramId::So3Hitchin(k) => {
                if k < 1 {
                    return Err(BoundaryError::BadHitchinIndex(k as i64));
                }
                (
                    circle(Left, 0, 4.0, (1, 2), 1),
                    circle(Right, 1, 4.0 / k as f64, (0, 2), k),
                    pi2 / 4.0,
                )
            }
        };
        Ok(GroupDiagram { id, left, right, orbit_volume: v })
    }

    pub fn end(&self, side: Side) -> &EndCondition {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Number of shooting unknowns: free parameters of both ends plus `T`.
    pub fn unknown_count(&self) -> usize {
        self.left.free_params.len() + self.right.free_params.len() + 1
    }
}

/// The seven catalog cases; the Hitchin entry uses `hitchin_k`.
pub fn diagram_catalog(hitchin_k: u32) -> Vec<GroupDiagram> {
    [
        DiagramId::Su2S4,
        DiagramId::So3S4,
        DiagramId::Su2Cp2,
        DiagramId::So3Cp2,
        DiagramId::Su2Cp2Bar,
        DiagramId::So3S2xS2,
        DiagramId::So3Hitchin(hitchin_k),
    ]
    .into_iter()
    .map(|id| GroupDiagram::new(id).expect("catalog entries are valid"))
    .collect()
}

pub fn end_conditions(d: &GroupDiagram, side: Side) -> EndCondition {
    d.end(side).clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    C { dir: usize, m: usize },
    P { m: usize },
    Q { m: usize },
}

impl Slot {
    /// Order in `s` at which the slot first enters `f` (or `f^2` for `P`, `Q`).
    fn f_order(&self, e: u32) -> i32 {
        match *self {
            Slot::C { m, .. } => 2 * m as i32 + 1,
            Slot::P { m } => 2 * m as i32,
            Slot::Q { m } => 2 * m as i32 + e as i32,
        }
    }

    fn name(&self, e: u32) -> String {
        match *self {
            Slot::C { dir, m } => format!("c{}_{}", dir + 1, 2 * m + 1),
            Slot::P { m } => format!("p_{}", 2 * m),
            Slot::Q { m } => format!("d_{}", 2 * m + e as usize),
        }
    }
}

fn exponent_of(kind: &EndKind) -> u32 {
    match kind {
        EndKind::Nut => 0,
        EndKind::Circle { exponent, .. } => *exponent,
    }
}

fn slot_list(kind: &EndKind, order: usize) -> Vec<Slot> {
    let mut out = Vec::new();
    match kind {
        EndKind::Nut => {
            for dir in 0..3 {
                for m in 1..order {
                    out.push(Slot::C { dir, m });
                }
            }
        }
        EndKind::Circle { collapse, .. } => {
            for m in 1..order {
                out.push(Slot::C { dir: *collapse, m });
            }
            for m in 1..order {
                out.push(Slot::P { m });
            }
            for m in 0..order {
                out.push(Slot::Q { m });
            }
        }
    }
    let e = exponent_of(kind);
    out.retain(|s| s.f_order(e) <= order as i32);
    out
}

/// Builds the three length series in the local variable `s` from slot values.
fn build_series(kind: &EndKind, h: f64, slots: &BTreeMap<Slot, f64>, order: usize, len: usize) -> [Laurent; 3] {
    let get = |s: Slot| slots.get(&s).copied().unwrap_or(0.0);
    let top = 1 + len as i32;
    match *kind {
        EndKind::Nut => std::array::from_fn(|dir| {
            let mut co = vec![1.0];
            co.extend((1..order).map(|m| get(Slot::C { dir, m })));
            Laurent::even(&co, 1, top)
        }),
        EndKind::Circle { collapse, slope, pair, exponent } => {
            let mut cc = vec![slope];
            cc.extend((1..order).map(|m| get(Slot::C { dir: collapse, m })));
            let fc = Laurent::even(&cc, 1, top);
            let mut pc = vec![2.0 * h * h];
            pc.extend((1..order).map(|m| get(Slot::P { m })));
            let p = Laurent::even(&pc, 0, len as i32);
            let qc: Vec<f64> = (0..order).map(|m| get(Slot::Q { m })).collect();
            let q = Laurent::even(&qc, exponent as i32, exponent as i32 + len as i32);
            let fi = (&p + &q).scale(0.5).truncate(len as i32).sqrt();
            let fj = (&p - &q).scale(0.5).truncate(len as i32).sqrt();
            let mut out: [Laurent; 3] = std::array::from_fn(|_| Laurent::new(0, vec![]));
            out[collapse] = fc;
            out[pair.0] = fi;
            out[pair.1] = fj;
            out
        }
    }
}

/// Series of `f'' + S f' - f'^2/f - f (2R^2 - 2(R_j - R_k)^2 - λ)`.
fn series_residual(f: &[Laurent; 3], lambda: f64) -> [Laurent; 3] {
    let df: Vec<Laurent> = f.iter().map(|x| x.deriv()).collect();
    let ddf: Vec<Laurent> = df.iter().map(|x| x.deriv()).collect();
    let s = (0..3).map(|m| df[m].div(&f[m])).reduce(|a, b| &a + &b).unwrap();
    let r: Vec<Laurent> = (0..3).map(|i| f[i].div(&(&f[(i + 1) % 3] * &f[(i + 2) % 3]))).collect();
    std::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let rjk = &r[j] - &r[k];
        let pot = (&(&r[i] * &r[i]).scale(2.0) - &(&rjk * &rjk).scale(2.0)).add_scalar(-lambda);
        let a = &ddf[i] + &(&s * &df[i]);
        let b = &(&df[i] * &df[i]).div(&f[i]) + &(&f[i] * &pot);
        &a - &b
    })
}

/// Truncated germ of a solution at one singular orbit, in the local variable
/// `s` (distance to the singular orbit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesGerm {
    pub end: EndCondition,
    pub order: usize,
    pub lambda: f64,
    /// `coeffs[i][n]` is the coefficient of `s^n` in `f_i`, `n = 0..=order`.
    pub coeffs: [Vec<f64>; 3],
    pub free_values: Vec<f64>,
    /// Limit of the non-collapsing lengths (`h`), if the end is a circle.
    pub end_value: Option<f64>,
    /// Largest `s` at which the germ may be evaluated.
    pub radius: f64,
}

#[derive(Debug, Clone)]
struct SolvedGerm {
    series: [Laurent; 3],
    free: Vec<String>,
}

fn numeric_rank(j: &DMatrix<f64>) -> usize {
    if j.ncols() == 0 {
        return 0;
    }
    let sv = j.clone().svd(false, false).singular_values;
    let smax = sv.iter().cloned().fold(0.0, f64::max);
    let tol = 1e-9 * smax.max(1.0);
    sv.iter().filter(|&&x| x > tol).count()
}

fn solve_germ(kind: &EndKind, h: f64, free_vals: &BTreeMap<String, f64>, lambda: f64, order: usize) -> Result<SolvedGerm, BoundaryError> {
    let e = exponent_of(kind);
    let len = order + 8;
    let all = slot_list(kind, order);
    let mut slots: BTreeMap<Slot, f64> = BTreeMap::new();
    let mut free = Vec::new();
    for m in -3..=(order as i32 - 2) {
        let pend: Vec<Slot> = all.iter().copied().filter(|s| s.f_order(e) - 2 == m).collect();
        let eqs = |vals: &[f64]| -> DVector<f64> {
            let mut s = slots.clone();
            for (sl, v) in pend.iter().zip(vals) {
                s.insert(*sl, *v);
            }
            let r = series_residual(&build_series(kind, h, &s, order, len), lambda);
            DVector::from_iterator(3, r.iter().map(|x| x.coeff(m)))
        };
        let zeros = vec![0.0; pend.len()];
        let e0 = eqs(&zeros);
        let mut jac = DMatrix::zeros(3, pend.len());
        for k in 0..pend.len() {
            let mut x = zeros.clone();
            x[k] = 1.0;
            jac.set_column(k, &(eqs(&x) - &e0));
        }
        let mut chosen: Vec<usize> = Vec::new();
        for k in 0..pend.len() {
            let mut cols = chosen.clone();
            cols.push(k);
            if numeric_rank(&jac.select_columns(&cols)) > chosen.len() {
                chosen.push(k);
            }
        }
        let mut x = zeros.clone();
        for k in (0..pend.len()).filter(|k| !chosen.contains(k)) {
            let name = pend[k].name(e);
            x[k] = free_vals.get(&name).copied().unwrap_or(0.0);
            free.push(name);
        }
        if !chosen.is_empty() {
            let mut rhs = -e0.clone();
            for k in 0..pend.len() {
                if !chosen.contains(&k) {
                    rhs -= jac.column(k) * x[k];
                }
            }
            let sub = jac.select_columns(&chosen);
            let sol = sub.svd(true, true).solve(&rhs, 1e-14).expect("svd with u and v");
            for (n, &k) in chosen.iter().enumerate() {
                x[k] = sol[n];
            }
        }
        let chk = eqs(&x);
        let res = chk.amax();
        let scale = 1.0 + e0.amax();
        if !(res <= 1e-9 * scale) {
            return Err(BoundaryError::Inconsistent { order: m, residual: res });
        }
        for (sl, v) in pend.iter().zip(&x) {
            slots.insert(*sl, *v);
        }
    }
    Ok(SolvedGerm { series: build_series(kind, h, &slots, order, len), free })
}

fn discover_free_params(end: &EndCondition) -> Vec<String> {
    let solved = solve_germ(&end.kind, 1.0, &BTreeMap::new(), 3.0, 8).expect("catalog germs are consistent");
    let mut names = Vec::new();
    if matches!(end.kind, EndKind::Circle { .. }) {
        names.push("h".to_string());
    }
    names.extend(solved.free);
    names
}

/// Default validity radius of a germ.
pub const DEFAULT_GERM_RADIUS: f64 = 0.1;
/// Default germ order.
pub const DEFAULT_GERM_ORDER: usize = 8;

/// Builds the germ of order `order` at `end` for the free parameter values
/// `free` (ordered as `end.free_params`).
pub fn series_solve(end: &EndCondition, free: &[f64], lambda: f64, order: usize) -> Result<SeriesGerm, BoundaryError> {
    if order < 4 {
        return Err(BoundaryError::OrderTooLow(order));
    }
    if free.len() != end.free_params.len() {
        return Err(BoundaryError::FreeParamCount { expected: end.free_params.len(), got: free.len() });
    }
    let map: BTreeMap<String, f64> = end.free_params.iter().cloned().zip(free.iter().copied()).collect();
    let (h, end_value) = match end.kind {
        EndKind::Nut => (0.0, None),
        EndKind::Circle { .. } => {
            let h = map["h"];
            if !(h > 0.0) {
                return Err(BoundaryError::NonPositiveEndValue(h));
            }
            (h, Some(h))
        }
    };
    let solved = solve_germ(&end.kind, h, &map, lambda, order)?;
    let declared: Vec<&String> = end.free_params.iter().filter(|n| *n != "h").collect();
    if let Some(extra) = solved.free.iter().find(|n| !declared.contains(n)) {
        return Err(BoundaryError::Resonance { order: -1, slot: extra.clone() });
    }
    let coeffs = std::array::from_fn(|i| (0..=order as i32).map(|n| solved.series[i].coeff(n)).collect());
    Ok(SeriesGerm {
        end: end.clone(),
        order,
        lambda,
        coeffs,
        free_values: free.to_vec(),
        end_value,
        radius: DEFAULT_GERM_RADIUS,
    })
}

impl SeriesGerm {
    /// Value, first and second `s`-derivative of each length.
    pub fn eval_all(&self, s: f64) -> (Triple, Triple, Triple) {
        let mut out = (Triple::ZERO, Triple::ZERO, Triple::ZERO);
        for i in 0..3 {
            let (v, d, dd) = Laurent::new(0, self.coeffs[i].clone()).eval3(s, self.order as i32);
            out.0[i] = v;
            out.1[i] = d;
            out.2[i] = dd;
        }
        out
    }

    /// Residual of the second-order system at local parameter `s`.
    pub fn residual_at(&self, s: f64) -> f64 {
        let (f, df, ddf) = self.eval_all(s);
        let p = EinsteinParams { lambda: self.lambda };
        match frame_rhs(&FrameState::new(s, f, df), &p) {
            Ok(rhs) => (ddf - rhs).max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Largest `s = radius / 2^n` with germ residual at most `tol`. When
    /// rounding keeps the residual above `tol` at every candidate, falls back
    /// to the largest `s` whose induced state error `residual · s^2` is at
    /// most `tol`.
    pub fn choose_offset(&self, tol: f64) -> Result<f64, BoundaryError> {
        let floor = 1e-4;
        let mut cands = Vec::new();
        let mut s = self.radius;
        while s >= floor {
            cands.push((s, self.residual_at(s)));
            s *= 0.5;
        }
        cands
            .iter()
            .find(|(_, r)| *r <= tol)
            .or_else(|| cands.iter().find(|(s, r)| r * s * s <= tol))
            .map(|(s, _)| *s)
            .ok_or(BoundaryError::OffsetNotFound { radius: self.radius, floor, tol })
    }

    /// Limit values `f_i(0)` (zero for collapsing directions).
    pub fn end_lengths(&self) -> Triple {
        Triple::new(self.coeffs[0][0], self.coeffs[1][0], self.coeffs[2][0])
    }

    /// Linear coefficients `f_i'(0)`.
    pub fn end_slopes(&self) -> Triple {
        Triple::new(self.coeffs[0][1], self.coeffs[1][1], self.coeffs[2][1])
    }
}

/// Evaluates the germ at local parameter `s ∈ (0, radius]`.
pub fn germ_eval(g: &SeriesGerm, s: f64) -> Result<FrameState, BoundaryError> {
    if !(s > 0.0 && s <= g.radius) {
        return Err(BoundaryError::OutsideValidity { s, radius: g.radius });
    }
    let (f, df, _) = g.eval_all(s);
    Ok(FrameState::new(s, f, df))
}

/// Constant matrix `Q` of a regular-singular system `t X' = Q X + t B(t) X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicialProblem {
    pub q: [[f64; 2]; 2],
    pub tag: String,
}

impl IndicialProblem {
    pub fn new(q: [[f64; 2]; 2], tag: impl Into<String>) -> Self {
        IndicialProblem { q, tag: tag.into() }
    }

    /// Symmetric matrix `[[d, o], [o, d]]`.
    pub fn symmetric(d: f64, o: f64, tag: impl Into<String>) -> Self {
        Self::new([[d, o], [o, d]], tag)
    }
}

/// The indicial matrices arising at the singular orbits of the catalog.
pub fn indicial_catalog(k: u32) -> Vec<IndicialProblem> {
    let kf = k as f64;
    vec![
        IndicialProblem::symmetric(-0.5, 1.5, "so3_s4 left, (A2, A3)"),
        IndicialProblem::symmetric(-1.5, 1.5, "so3_s4 left, (F2, F3)"),
        IndicialProblem::symmetric(-1.0, 2.0, "so3_s2xs2 left, (A1, A2)"),
        IndicialProblem::symmetric(-kf / 2.0, (kf + 2.0) / 2.0, "so3_hitchin right, (B1, B3)"),
        IndicialProblem::symmetric(-(kf + 2.0) / 2.0, (kf + 2.0) / 2.0, "so3_hitchin right, (E1, E3)"),
    ]
}

/// Eigenvalues of `Q`, smaller first.
pub fn indicial_eigenvalues(p: &IndicialProblem) -> Result<(f64, f64), BoundaryError> {
    let [[a, b], [c, d]] = p.q;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let disc = half * half + b * c;
    if disc < 0.0 {
        return Err(BoundaryError::ComplexEigenvalues);
    }
    let r = disc.sqrt();
    Ok((mean - r, mean + r))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    /// `|X|` stays below the noise floor at every sample.
    pub vanishes: bool,
    /// Fitted leading order from a log-log regression.
    pub fitted_order: Option<f64>,
    pub nearest_eigenvalue: f64,
    pub passed: bool,
}

/// Checks that a two-component quantity sampled at `(t, X(t))` near `t = 0`
/// either vanishes below `noise_floor` or decays like `t^N` with `N` an
/// eigenvalue of `Q` (within `order_tol`).
pub fn germ_decay_check(
    samples: &[(f64, [f64; 2])],
    q: &IndicialProblem,
    noise_floor: f64,
    order_tol: f64,
) -> Result<DecayReport, BoundaryError> {
    if samples.len() < 4 {
        return Err(BoundaryError::InsufficientSamples { need: 4, got: samples.len() });
    }
    let (e1, e2) = indicial_eigenvalues(q)?;
    let norms: Vec<(f64, f64)> = samples.iter().map(|(t, x)| (*t, x[0].abs().max(x[1].abs()))).collect();
    if norms.iter().all(|(_, n)| *n < noise_floor) {
        return Ok(DecayReport { vanishes: true, fitted_order: None, nearest_eigenvalue: e1.max(e2), passed: true });
    }
    let pts: Vec<(f64, f64)> = norms
        .iter()
        .filter(|(t, n)| *t > 0.0 && *n >= noise_floor)
        .map(|(t, n)| (t.ln(), n.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(BoundaryError::InsufficientSamples { need: 4, got: pts.len() });
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let nearest = if (slope - e1).abs() < (slope - e2).abs() { e1 } else { e2 };
    Ok(DecayReport {
        vanishes: false,
        fitted_order: Some(slope),
        nearest_eigenvalue: nearest,
        passed: (slope - nearest).abs() <= order_tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_shapes() {
        let cat = diagram_catalog(2);
        assert_eq!(cat.len(), 7);
        for d in &cat {
            assert_eq!(d.unknown_count(), 5, "{}", d.id);
            assert!(d.orbit_volume > 0.0);
        }
        let so3 = GroupDiagram::new(DiagramId::So3S4).unwrap();
        assert_eq!(so3.left.slopes, Triple::new(4.0, 0.0, 0.0));
        assert_eq!(so3.right.slopes, Triple::new(0.0, 4.0, 0.0));
        let cp2 = GroupDiagram::new(DiagramId::Su2Cp2).unwrap();
        assert_eq!(cp2.left.slopes, Triple::splat(1.0));
        assert_eq!(cp2.right.collapsing, vec![2]);
        assert_eq!(cp2.right.parity, Parity::PairSplit { pair: (0, 1), exponent: 4 });
        let h2 = GroupDiagram::new(DiagramId::So3Hitchin(2)).unwrap();
        assert_eq!(h2.right.slopes[1], 2.0);
        let s2 = GroupDiagram::new(DiagramId::So3S2xS2).unwrap();
        assert_eq!(s2.left.collapsing, vec![2]);
        assert_eq!(s2.left.parity, Parity::PairSplit { pair: (0, 1), exponent: 2 });
        let so3cp2 = end_conditions(&GroupDiagram::new(DiagramId::So3Cp2).unwrap(), Side::Left);
        assert_eq!(so3cp2.slopes[0], 2.0);
        assert!(so3cp2.free_params.contains(&"h".to_string()));
    }

    #[test]
    fn free_parameter_inventory() {
        let su2 = GroupDiagram::new(DiagramId::Su2S4).unwrap();
        assert_eq!(su2.left.free_params, vec!["c2_3", "c3_3"]);
        let so3 = GroupDiagram::new(DiagramId::So3S4).unwrap();
        assert_eq!(so3.left.free_params, vec!["h", "d_1"]);
        let cp2 = GroupDiagram::new(DiagramId::Su2Cp2).unwrap();
        assert_eq!(cp2.right.free_params, vec!["h", "d_4"]);
        let h3 = GroupDiagram::new(DiagramId::So3Hitchin(3)).unwrap();
        assert_eq!(h3.right.free_params, vec!["h", "d_3"]);
    }

    #[test]
    fn diagram_id_parsing() {
        assert_eq!(DiagramId::parse("SU2_S4", None).unwrap(), DiagramId::Su2S4);
        assert_eq!(DiagramId::parse("so3_hitchin", Some(3)).unwrap(), DiagramId::So3Hitchin(3));
        assert!(matches!(DiagramId::parse("so3_hitchin", Some(0)), Err(BoundaryError::BadHitchinIndex(0))));
        assert!(matches!(DiagramId::parse("torus", None), Err(BoundaryError::UnknownDiagram(_))));
    }

    #[test]
    fn round_nut_germ_is_sine() {
        let d = GroupDiagram::new(DiagramId::Su2S4).unwrap();
        let c3 = -1.0 / 6.0;
        let g = series_solve(&d.left, &[c3, c3], 3.0, 8).unwrap();
        for i in 0..3 {
            assert!((g.coeffs[i][1] - 1.0).abs() < 1e-14);
            assert!((g.coeffs[i][3] + 1.0 / 6.0).abs() < 1e-13);
            assert!((g.coeffs[i][5] - 1.0 / 120.0).abs() < 1e-12);
        }
        let st = germ_eval(&g, 0.1).unwrap();
        assert!(st.f.dist_inf(Triple::splat(0.1f64.sin())) < 1e-8);
        assert!(germ_eval(&g, 0.2).is_err());
    }

    #[test]
    fn round_so3_germ() {
        // f = (4 sin t, 4 sin(π/3 - t), 4 sin(π/3 + t)) at λ = 3.
        let d = GroupDiagram::new(DiagramId::So3S4).unwrap();
        let h = 2.0 * 3f64.sqrt();
        let g = series_solve(&d.left, &[h, -16.0 * 3f64.sqrt()], 3.0, 8).unwrap();
        for &s in &[0.02, 0.05, 0.1] {
            let st = germ_eval(&g, s).unwrap();
            let want = Triple::new(4.0 * s.sin(), 4.0 * (PI / 3.0 - s).sin(), 4.0 * (PI / 3.0 + s).sin());
            assert!(st.f.dist_inf(want) < 1e-8, "{s}: {:?}", st.f);
        }
    }

    #[test]
    fn hitchin_slope_is_exact() {
        for k in 1..=5u32 {
            let d = GroupDiagram::new(DiagramId::So3Hitchin(k)).unwrap();
            let g = series_solve(&d.right, &[1.3, 0.2], 3.0, 8).unwrap();
            assert_eq!(g.end_slopes()[1], 4.0 / k as f64);
        }
    }

    #[test]
    fn germ_residual_order() {
        let d = GroupDiagram::new(DiagramId::So3Cp2).unwrap();
        let g = series_solve(&d.left, &[1.2, 0.3], 3.0, 8).unwrap();
        let pts: Vec<(f64, f64)> = [0.02, 0.03, 0.04, 0.06]
            .iter()
            .map(|&s| (f64::ln(s), g.residual_at(s).ln()))
            .collect();
        let slope = (pts[3].1 - pts[0].1) / (pts[3].0 - pts[0].0);
        assert!(slope >= 6.5, "residual slope {slope}");
    }

    #[test]
    fn bad_inputs() {
        let d = GroupDiagram::new(DiagramId::So3S4).unwrap();
        assert!(matches!(series_solve(&d.left, &[-1.0, 0.0], 3.0, 8), Err(BoundaryError::NonPositiveEndValue(_))));
        assert!(matches!(series_solve(&d.left, &[1.0], 3.0, 8), Err(BoundaryError::FreeParamCount { .. })));
        assert!(matches!(series_solve(&d.left, &[1.0, 0.0], 3.0, 3), Err(BoundaryError::OrderTooLow(3))));
    }

    #[test]
    fn indicial_catalog_eigenvalues() {
        let want = [(-2.0, 1.0), (-3.0, 0.0), (-3.0, 1.0), (-4.0, 1.0), (-5.0, 0.0)];
        for (p, w) in indicial_catalog(3).iter().zip(want) {
            assert_eq!(indicial_eigenvalues(p).unwrap(), w, "{}", p.tag);
        }
        let rot = IndicialProblem::new([[0.0, -1.0], [1.0, 0.0]], "rotation");
        assert_eq!(indicial_eigenvalues(&rot), Err(BoundaryError::ComplexEigenvalues));
    }

    #[test]
    fn decay_check_controls() {
        let q = IndicialProblem::symmetric(-0.5, 1.5, "t");
        let ts: Vec<f64> = (1..=8).map(|n| 0.01 * n as f64).collect();
        let zero: Vec<_> = ts.iter().map(|&t| (t, [1e-14, -2e-14])).collect();
        assert!(germ_decay_check(&zero, &q, 1e-10, 0.1).unwrap().passed);
        let lin: Vec<_> = ts.iter().map(|&t| (t, [t, t])).collect();
        let r = germ_decay_check(&lin, &q, 1e-10, 0.1).unwrap();
        assert!(r.passed && r.nearest_eigenvalue == 1.0);
        let quad: Vec<_> = ts.iter().map(|&t| (t, [t * t, -0.5 * t * t])).collect();
        assert!(!germ_decay_check(&quad, &q, 1e-10, 0.1).unwrap().passed);
        assert!(germ_decay_check(&quad[..2], &q, 1e-10, 0.1).is_err());
    }
}
