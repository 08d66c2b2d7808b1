//! Per-diagram certificate suite run by `verify`.

use crate::emit::{read_solution_csv, reingest_deviation, solution_csv, DiagnosticsDoc};
use c1einstein_core::boundary::{DiagramId, EndKind};
use c1einstein_core::diagnostics::{
    cone_monitor, invariant_constants, max_principle_check, ratio_bound_set, ConeSpec, KAHLER_TOL,
};
use c1einstein_core::odes::FrameState;
use c1einstein_core::oracles::{min_distance, OracleKind};
use c1einstein_core::shooting::SolutionReport;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!("[{}] {}: {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

fn bound(name: &str, value: f64, limit: f64) -> Check {
    Check::new(name, value < limit, format!("{value:.3e} < {limit:.0e}"))
}

fn near(name: &str, value: f64, target: f64, tol: f64) -> Check {
    Check::new(name, (value - target).abs() < tol, format!("{value:.10} vs {target} ± {tol:.0e}"))
}

fn oracle_check(sr: &SolutionReport, o: OracleKind, tol: f64) -> Check {
    let samples: Vec<FrameState> = sr.samples.iter().map(|s| s.state).collect();
    let d = min_distance(&samples, sr.t_total, o, sr.lambda);
    bound(&format!("matches {} oracle", o.name()), d, tol)
}

/// Runs every check that applies to the solution's diagram.
pub fn verify_solution(sr: &SolutionReport, doc: &DiagnosticsDoc, tol: f64) -> Vec<Check> {
    let id = sr.diagram.id;
    let mut out = vec![Check::new(
        "match residual",
        sr.residual <= tol,
        format!("{:.3e} <= {tol:.0e}", sr.residual),
    )];
    out.push(bound("einstein drift", doc.drift.max(), 1e-7));

    let ratios = &doc.ratios;
    let worst = ratios.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
    out.push(bound("ratio equation residual at extrema", worst, 1e-7));
    let named = ratio_bound_set(id);
    if !named.is_empty() {
        let reps = max_principle_check(sr, &named, 2000, 1e-3 * sr.t_total);
        let sup = reps.iter().map(|r| r.sup_u).fold(f64::NEG_INFINITY, f64::max);
        out.push(Check::new("ratio bounds f_i/f_j <= 1", sup <= 1e-8, format!("max log ratio {sup:.3e}")));
    }

    if let Some(t) = &doc.topology {
        out.push(near("chi", t.chi, t.chi_expected as f64, 1e-3));
        out.push(near("tau", t.tau, t.tau_expected as f64, 1e-3));
        out.push(bound("quadrature doubling change", t.quadrature_delta, 1e-8));
    }

    if let Ok(c) = invariant_constants(sr) {
        let scaled = invariant_constants(&sr.homothety(1.7)).unwrap_or_default();
        let dev = c
            .entries()
            .iter()
            .zip(scaled.entries())
            .map(|(a, b)| (a.1 - b.1).abs())
            .fold(0.0, f64::max);
        out.push(bound("constants scale invariant", dev, 1e-10));
    }

    let csv = solution_csv(sr);
    let dev = read_solution_csv(&csv).and_then(|rows| reingest_deviation(&rows, sr.lambda));
    out.push(match dev {
        Ok(d) => Check::new("csv round trip", d <= 1e-12, format!("{d:.3e} <= 1e-12")),
        Err(e) => Check::new("csv round trip", false, e.to_string()),
    });

    let gaps = doc.eigen_gaps;
    let kahler = doc.kahler.as_ref();
    let edge = 0.02 * sr.t_total;
    let window = (edge, sr.t_total - edge);
    let constants = doc.constants.unwrap_or_default();
    match id {
        DiagramId::Su2S4 => out.push(oracle_check(sr, OracleKind::RoundSu2, 1e-6)),
        DiagramId::So3S4 | DiagramId::So3Hitchin(1) => {
            if let Some(a) = constants.alpha {
                out.push(Check::new("alpha > 12", a > 12.0, format!("alpha = {a:.10}")));
            }
            let c = cone_monitor(sr, ConeSpec::c_a(), window, 1e-9);
            out.push(Check::new("cone C_A on interior", c.satisfied, format!("margin {:.3e}", c.worst_margin)));
            out.push(bound("a-spread", gaps.a_spread, 1e-6));
            out.push(oracle_check(sr, OracleKind::RoundSo3, 1e-5));
        }
        DiagramId::Su2Cp2 => {
            let eq = doc.equal_pairs.contains(&(1, 2));
            out.push(Check::new("f1 = f2", eq, format!("equal pairs {:?}", doc.equal_pairs)));
            out.push(oracle_check(sr, OracleKind::FubiniStudySu2, 1e-5));
        }
        DiagramId::So3Cp2 => {
            if let Some(b) = constants.beta {
                out.push(near("beta", b, 12.0, 1e-3));
            }
            out.push(oracle_check(sr, OracleKind::FubiniStudySo3, 1e-5));
        }
        DiagramId::Su2Cp2Bar => {
            let eq = doc.equal_pairs.contains(&(2, 3));
            out.push(Check::new("f2 = f3", eq, format!("equal pairs {:?}", doc.equal_pairs)));
            let samples: Vec<FrameState> = sr.samples.iter().map(|s| s.state).collect();
            let d = OracleKind::ALL
                .iter()
                .map(|&o| min_distance(&samples, sr.t_total, o, sr.lambda))
                .fold(f64::INFINITY, f64::min);
            out.push(Check::new("distinct from every oracle", d > 1e-2, format!("min distance {d:.3e} > 1e-2")));
            let s = doc.kahler_best.sup();
            out.push(Check::new(
                "not kahler under any labeling",
                s > KAHLER_TOL + 1e-3,
                format!("best labeling {} sup {s:.3e}", doc.kahler_best.label),
            ));
            let m = gaps.a_spread.min(gaps.b_spread);
            out.push(Check::new("neither self-dual nor anti-self-dual", m > 1e-3, format!("min spread {m:.3e}")));
        }
        DiagramId::So3S2xS2 => {
            if let Some(d) = constants.delta {
                out.push(near("delta", d, 0.0, 1e-4));
            }
            out.push(oracle_check(sr, OracleKind::ProductS2S2, 1e-6));
        }
        DiagramId::So3Hitchin(_) => {}
    }
    if let Some(k) = id.hitchin_k() {
        out.push(bound("b-spread", gaps.b_spread, 1e-6));
        if let (Some(b), Some(th)) = (constants.beta, constants.theta_k) {
            out.push(Check::new("beta > theta_k", b > th, format!("beta = {b:.10}, theta_k = {th:.10}, margin {:.6}", b - th)));
        }
        let g = &sr.branches.right_germ;
        let slope = match g.end.kind {
            EndKind::Circle { slope, .. } => Some(slope),
            EndKind::Nut => None,
        };
        let measured = g.end_slopes().max();
        let want = 4.0 / k as f64;
        out.push(Check::new(
            "right-end slope 4/k",
            slope == Some(want) && (measured - want).abs() < 1e-15,
            format!("slope {measured} vs {want}"),
        ));
        if k == 2 {
            out.push(oracle_check(sr, OracleKind::HitchinTwo, 1e-5));
        }
    }
    if let Some(k) = kahler {
        out.push(Check::new(
            &format!("kahler ({})", k.label),
            k.is_kahler,
            format!("sup {:.3e}, {:.3e} < {KAHLER_TOL:.0e}", k.sup_i, k.sup_j),
        ));
    }
    out
}
