//! On-disk artifacts: `solution.csv`, `constants.txt`, `diagnostics.json`.

use c1einstein_core::diagnostics::{
    best_kahler_label, characteristic_numbers, eigen_gap_report, invariant_constants, kahler_detector,
    max_principle_check, EigenGapReport, InvariantConstants, KahlerLabel, KahlerReport, RatioReport, TopologyReport,
    ALL_ORDERED_PAIRS, KAHLER_TOL,
};
use c1einstein_core::integrator::DriftReport;
use c1einstein_core::odes::{EinsteinParams, FrameDiagnostics, FrameState};
use c1einstein_core::shooting::{detect_equal_pairs, SolutionReport};
use c1einstein_core::triple::Triple;
use serde::Serialize;
use std::fmt::Write as _;
use std::io;
use std::path::Path;

pub const CSV_COLUMNS: usize = 26;

pub fn csv_header() -> String {
    let mut cols = vec!["t".to_string()];
    for group in ["f", "df", "L", "R", "A", "B", "a", "b"] {
        for i in 1..=3 {
            cols.push(format!("{group}{i}"));
        }
    }
    cols.push("constraint".into());
    cols.join(",")
}

fn row_values(st: &FrameState, d: &FrameDiagnostics) -> [f64; CSV_COLUMNS] {
    let mut v = [0.0; CSV_COLUMNS];
    v[0] = st.t;
    for (g, tr) in [st.f, st.df, d.l, d.r, d.a_coef, d.b_coef, d.a_eig, d.b_eig].iter().enumerate() {
        for i in 0..3 {
            v[1 + 3 * g + i] = tr[i];
        }
    }
    v[CSV_COLUMNS - 1] = d.constraint;
    v
}

pub fn solution_csv(sr: &SolutionReport) -> String {
    let mut s = csv_header();
    s.push('\n');
    for smp in &sr.samples {
        let v = row_values(&smp.state, &smp.diag);
        let line: Vec<String> = v.iter().map(|x| format!("{x:.16e}")).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("header does not match the solution format")]
    Header,
    #[error("row {row}: expected {CSV_COLUMNS} numeric fields")]
    Row { row: usize },
}

pub fn read_solution_csv(text: &str) -> Result<Vec<[f64; CSV_COLUMNS]>, IngestError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != csv_header() {
        return Err(IngestError::Header);
    }
    let mut out = Vec::new();
    for (n, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals: Result<Vec<f64>, _> = rec.iter().map(|x| x.parse::<f64>()).collect();
        let vals = vals.map_err(|_| IngestError::Row { row: n + 1 })?;
        out.push(vals.try_into().map_err(|_| IngestError::Row { row: n + 1 })?);
    }
    Ok(out)
}

/// Recomputes every derived column from `(t, f, f')` and returns the largest
/// absolute deviation from the stored columns.
pub fn reingest_deviation(rows: &[[f64; CSV_COLUMNS]], lambda: f64) -> Result<f64, IngestError> {
    let p = EinsteinParams { lambda };
    let mut worst = 0.0f64;
    for (n, row) in rows.iter().enumerate() {
        let st = FrameState::new(row[0], Triple::new(row[1], row[2], row[3]), Triple::new(row[4], row[5], row[6]));
        let d = FrameDiagnostics::compute(&st, &p).map_err(|_| IngestError::Row { row: n + 1 })?;
        let v = row_values(&st, &d);
        for (a, b) in v.iter().zip(row.iter()) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok(worst)
}

/// Flat `key = value` file; invariant constants appear only when defined.
pub fn constants_txt(sr: &SolutionReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "diagram = {}", sr.diagram.id.name());
    if let Some(k) = sr.diagram.id.hitchin_k() {
        let _ = writeln!(s, "k = {k}");
    }
    let _ = writeln!(s, "lambda = {:.16e}", sr.lambda);
    let _ = writeln!(s, "T = {:.16e}", sr.t_total);
    for (n, v) in sr.unknown_names.iter().zip(&sr.unknowns).filter(|(n, _)| *n != "T") {
        let _ = writeln!(s, "{n} = {v:.16e}");
    }
    if let Ok(c) = invariant_constants(sr) {
        for (n, v) in c.entries() {
            let _ = writeln!(s, "{n} = {v:.16e}");
        }
    }
    if let Ok(t) = characteristic_numbers(sr) {
        let _ = writeln!(s, "chi = {:.16e}", t.chi);
        let _ = writeln!(s, "tau = {:.16e}", t.tau);
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsDoc {
    pub diagram: String,
    pub lambda: f64,
    pub t_total: f64,
    pub unknown_names: Vec<String>,
    pub unknowns: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub jacobian_singular_values: Vec<f64>,
    pub samples: usize,
    pub drift: DriftReport,
    pub constants: Option<InvariantConstants>,
    pub topology: Option<TopologyReport>,
    pub eigen_gaps: EigenGapReport,
    pub kahler: Option<KahlerReport>,
    pub kahler_best: KahlerReport,
    pub ratios: Vec<RatioReport>,
    pub equal_pairs: Vec<(usize, usize)>,
}

pub fn diagnostics_doc(sr: &SolutionReport) -> DiagnosticsDoc {
    DiagnosticsDoc {
        diagram: sr.diagram.id.to_string(),
        lambda: sr.lambda,
        t_total: sr.t_total,
        unknown_names: sr.unknown_names.clone(),
        unknowns: sr.unknowns.clone(),
        residual: sr.residual,
        iterations: sr.iterations,
        jacobian_singular_values: sr.jacobian_singular_values.clone(),
        samples: sr.samples.len(),
        drift: sr.drift(),
        constants: invariant_constants(sr).ok(),
        topology: characteristic_numbers(sr).ok(),
        eigen_gaps: eigen_gap_report(sr),
        kahler: KahlerLabel::for_diagram(sr.diagram.id).map(|l| kahler_detector(sr, l, KAHLER_TOL)),
        kahler_best: best_kahler_label(sr, KAHLER_TOL),
        ratios: max_principle_check(sr, &ALL_ORDERED_PAIRS, 2000, 0.02 * sr.t_total),
        equal_pairs: detect_equal_pairs(sr, 1e-6),
    }
}

/// Writes the three artifacts into `dir`, creating it if needed.
pub fn emit(sr: &SolutionReport, doc: &DiagnosticsDoc, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("solution.csv"), solution_csv(sr))?;
    std::fs::write(dir.join("constants.txt"), constants_txt(sr))?;
    let json = serde_json::to_string_pretty(doc).map_err(io::Error::other)?;
    std::fs::write(dir.join("diagnostics.json"), json + "\n")
}
