//! The four subcommands and their exit codes.

use crate::checks::verify_solution;
use crate::config::{Command, ConfigError, RunConfig};
use crate::emit::{diagnostics_doc, emit, DiagnosticsDoc};
use c1einstein_core::boundary::DiagramId;
use c1einstein_core::shooting::{
    basins, default_guess_for, default_scan_box_for, grid_from_box, scan, solve, ShootError, ShootingProblem, SolutionReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

fn out_dir(cfg: &RunConfig, id: DiagramId) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| {
        let name = match id.hitchin_k() {
            Some(k) => format!("{}_k{k}", id.name()),
            None => id.name().to_string(),
        };
        PathBuf::from("out").join(name)
    })
}

/// Initial guess: configured or shipped, optionally perturbed by a relative
/// uniform factor in `[-perturb, perturb]` drawn from `seed`.
pub fn initial_guess(cfg: &RunConfig, pr: &ShootingProblem) -> Vec<f64> {
    let mut g = cfg.guess.clone().unwrap_or_else(|| default_guess_for(pr));
    if cfg.perturb > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        for x in g.iter_mut() {
            *x *= 1.0 + cfg.perturb * rng.random_range(-1.0..=1.0);
        }
    }
    g
}

fn problem(cfg: &RunConfig) -> Result<ShootingProblem, ConfigError> {
    let id = cfg.diagram_id()?;
    let diagram = c1einstein_core::boundary::GroupDiagram::new(id).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    ShootingProblem::new(diagram, cfg.shooting).map_err(|e| ConfigError::Invalid(e.to_string()))
}

fn solve_cfg(cfg: &RunConfig, pr: &ShootingProblem, out: &mut dyn Write) -> Result<SolutionReport, i32> {
    let id = pr.diagram.id;
    let guess = initial_guess(cfg, pr);
    if guess.len() != pr.n_unknowns() {
        let _ = writeln!(out, "usage error: guess needs {} entries ({})", pr.n_unknowns(), pr.unknown_names().join(", "));
        return Err(EXIT_USAGE);
    }
    match solve(pr, &guess) {
        Ok(sr) => Ok(sr),
        Err(ShootError::NonConvergence { residual, iterations, .. }) => {
            let _ = writeln!(out, "non-convergence: {id}: residual {residual:.3e} after {iterations} iterations");
            Err(EXIT_NO_CONVERGENCE)
        }
        Err(e) => {
            let _ = writeln!(out, "non-convergence: {id}: {e}");
            Err(EXIT_NO_CONVERGENCE)
        }
    }
}

fn summary(sr: &SolutionReport, doc: &DiagnosticsDoc) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "diagram = {}", sr.diagram.id);
    let _ = writeln!(s, "lambda = {}", sr.lambda);
    let _ = writeln!(s, "T = {:.12}", sr.t_total);
    for (n, v) in sr.unknown_names.iter().zip(&sr.unknowns).filter(|(n, _)| *n != "T") {
        let _ = writeln!(s, "{n} = {v:.12}");
    }
    let _ = writeln!(s, "residual = {:.3e} ({} iterations)", sr.residual, sr.iterations);
    let _ = writeln!(s, "drift = {:.3e}", doc.drift.max());
    if let Some(c) = &doc.constants {
        for (n, v) in c.entries() {
            let _ = writeln!(s, "{n} = {v:.6}");
        }
    }
    if let Some(t) = &doc.topology {
        let _ = writeln!(s, "chi = {:.6}", t.chi);
        let _ = writeln!(s, "tau = {:.6}", t.tau);
    }
    let _ = writeln!(s, "a_spread = {:.3e}", doc.eigen_gaps.a_spread);
    let _ = writeln!(s, "b_spread = {:.3e}", doc.eigen_gaps.b_spread);
    if let Some(k) = &doc.kahler {
        let _ = writeln!(s, "kahler: {}", k.is_kahler);
    }
    s
}

fn cmd_solve(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, ConfigError> {
    let pr = problem(cfg)?;
    let sr = match solve_cfg(cfg, &pr, out) {
        Ok(sr) => sr,
        Err(code) => return Ok(code),
    };
    let doc = diagnostics_doc(&sr);
    let dir = out_dir(cfg, pr.diagram.id);
    if let Err(e) = emit(&sr, &doc, &dir) {
        let _ = writeln!(out, "error: cannot write {}: {e}", dir.display());
        return Ok(EXIT_CHECK_FAILED);
    }
    let _ = write!(out, "{}", summary(&sr, &doc));
    let _ = writeln!(out, "wrote {}", dir.display());
    Ok(EXIT_PASS)
}

fn cmd_scan(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, ConfigError> {
    let pr = problem(cfg)?;
    let id = pr.diagram.id;
    let bx = cfg.scan_box(pr.n_unknowns())?.unwrap_or_else(|| default_scan_box_for(&pr));
    let grid = grid_from_box(&bx);
    let points = scan(&pr, &grid, cfg.jobs);
    let names = pr.unknown_names();
    let mut csv = names.join(",") + ",residual\n";
    for p in &points {
        let vals: Vec<String> = p.u.iter().chain(std::iter::once(&p.residual)).map(|x| format!("{x:.16e}")).collect();
        csv.push_str(&vals.join(","));
        csv.push('\n');
    }
    let sols = basins(&pr, &points, cfg.scan_seeds, 1e-6, cfg.jobs);
    let mut bcsv = names.join(",") + ",residual,iterations\n";
    for s in &sols {
        let vals: Vec<String> = s.unknowns.iter().chain(std::iter::once(&s.residual)).map(|x| format!("{x:.16e}")).collect();
        let _ = writeln!(bcsv, "{},{}", vals.join(","), s.iterations);
    }
    let dir = out_dir(cfg, id);
    let written = std::fs::create_dir_all(&dir)
        .and_then(|_| std::fs::write(dir.join("scan.csv"), csv))
        .and_then(|_| std::fs::write(dir.join("basins.csv"), bcsv));
    if let Err(e) = written {
        let _ = writeln!(out, "error: cannot write {}: {e}", dir.display());
        return Ok(EXIT_CHECK_FAILED);
    }
    let finite = points.iter().filter(|p| p.residual.is_finite()).count();
    let _ = writeln!(out, "scanned {} points ({finite} finite) for {id}", points.len());
    for s in &sols {
        let u: Vec<String> = s.unknowns.iter().map(|x| format!("{x:.10}")).collect();
        let _ = writeln!(out, "solution: [{}] residual {:.3e}", u.join(", "), s.residual);
    }
    let _ = writeln!(out, "wrote {}", dir.display());
    Ok(if sols.is_empty() { EXIT_NO_CONVERGENCE } else { EXIT_PASS })
}

fn cmd_verify(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, ConfigError> {
    let pr = problem(cfg)?;
    let sr = match solve_cfg(cfg, &pr, out) {
        Ok(sr) => sr,
        Err(code) => return Ok(code),
    };
    let doc = diagnostics_doc(&sr);
    let _ = write!(out, "{}", summary(&sr, &doc));
    let checks = verify_solution(&sr, &doc, cfg.shooting.tol);
    for c in &checks {
        let _ = writeln!(out, "{}", c.line());
    }
    if let Some(dir) = &cfg.out {
        if let Err(e) = emit(&sr, &doc, dir) {
            let _ = writeln!(out, "error: cannot write {}: {e}", dir.display());
            return Ok(EXIT_CHECK_FAILED);
        }
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        let _ = writeln!(out, "verify {}: all {} checks passed", pr.diagram.id, checks.len());
        Ok(EXIT_PASS)
    } else {
        let _ = writeln!(out, "verify {}: failed: {}", pr.diagram.id, failed.join("; "));
        Ok(EXIT_CHECK_FAILED)
    }
}

fn cmd_report(cfg: &RunConfig, out: &mut dyn Write) -> Result<i32, ConfigError> {
    let pr = problem(cfg)?;
    let sr = match solve_cfg(cfg, &pr, out) {
        Ok(sr) => sr,
        Err(code) => return Ok(code),
    };
    let doc = diagnostics_doc(&sr);
    let mut rows: Vec<(String, String)> = vec![
        ("diagram".into(), sr.diagram.id.to_string()),
        ("lambda".into(), format!("{}", sr.lambda)),
        ("T".into(), format!("{:.12}", sr.t_total)),
        ("lambda*T^2".into(), format!("{:.12}", sr.lambda * sr.t_total * sr.t_total)),
    ];
    if let Some(c) = &doc.constants {
        rows.extend(c.entries().into_iter().map(|(n, v)| (n.to_string(), format!("{v:.12}"))));
    }
    if let Some(t) = &doc.topology {
        rows.push(("chi".into(), format!("{:.9}", t.chi)));
        rows.push(("tau".into(), format!("{:.9}", t.tau)));
    }
    rows.push(("a_spread".into(), format!("{:.3e}", doc.eigen_gaps.a_spread)));
    rows.push(("b_spread".into(), format!("{:.3e}", doc.eigen_gaps.b_spread)));
    rows.push(("drift".into(), format!("{:.3e}", doc.drift.max())));
    let w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
    let _ = writeln!(out, "{:<w$}  value", "quantity");
    let _ = writeln!(out, "{}  {}", "-".repeat(w), "-".repeat(20));
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<w$}  {v}");
    }
    Ok(EXIT_PASS)
}

/// Executes `cfg`, writing human-readable output to `out`.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> i32 {
    let r = match cfg.command {
        Command::Solve => cmd_solve(cfg, out),
        Command::Scan => cmd_scan(cfg, out),
        Command::Verify => cmd_verify(cfg, out),
        Command::Report => cmd_report(cfg, out),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(out, "usage error: {e}");
            EXIT_USAGE
        }
    }
}
