//! Flat `key = value` run configuration.

use c1einstein_core::boundary::DiagramId;
use c1einstein_core::integrator::IntegratorConfig;
use c1einstein_core::shooting::ShootingConfig;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given twice")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value `{value}` for `{key}`: {reason}")]
    BadValue { line: usize, key: String, value: String, reason: String },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Scan,
    Verify,
    Report,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub diagram: String,
    pub k: Option<i64>,
    pub shooting: ShootingConfig,
    pub out: Option<PathBuf>,
    pub jobs: usize,
    pub seed: u64,
    /// Relative size of random perturbations applied to the initial guess.
    pub perturb: f64,
    pub guess: Option<Vec<f64>>,
    pub scan_lo: Option<Vec<f64>>,
    pub scan_hi: Option<Vec<f64>>,
    pub scan_n: Option<Vec<usize>>,
    /// Number of best scan points polished into solutions.
    pub scan_seeds: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            diagram: String::new(),
            k: None,
            shooting: ShootingConfig::default(),
            out: None,
            jobs: 1,
            seed: 0,
            perturb: 0.0,
            guess: None,
            scan_lo: None,
            scan_hi: None,
            scan_n: None,
            scan_seeds: 8,
        }
    }

    pub fn diagram_id(&self) -> Result<DiagramId, ConfigError> {
        if self.diagram.is_empty() {
            return Err(ConfigError::Invalid("no diagram given (use --diagram)".into()));
        }
        DiagramId::parse(&self.diagram, self.k).map_err(|e| ConfigError::Invalid(e.to_string()))
    }

    /// Applies one `key = value` assignment; `line` is used in errors.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::BadValue { line, key: key.into(), value: value.into(), reason };
        let real = |v: &str| v.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
        let count = |v: &str| v.trim().parse::<usize>().map_err(|e| bad(e.to_string()));
        let reals = |v: &str| v.split(',').map(real).collect::<Result<Vec<_>, _>>();
        let ic: &mut IntegratorConfig = &mut self.shooting.integrator;
        match key {
            "diagram" => self.diagram = value.to_string(),
            "k" => self.k = Some(value.parse::<i64>().map_err(|e| bad(e.to_string()))?),
            "lambda" => self.shooting.lambda = real(value)?,
            "theta" => self.shooting.theta = real(value)?,
            "germ_order" => self.shooting.germ_order = count(value)?,
            "germ_radius" => self.shooting.germ_radius = real(value)?,
            "germ_tol" => self.shooting.germ_tol = real(value)?,
            "rel_tol" => ic.rel_tol = real(value)?,
            "abs_tol" => ic.abs_tol = real(value)?,
            "max_step" => ic.max_step = real(value)?,
            "start_offset" => ic.start_offset = real(value)?,
            "tol" => self.shooting.tol = real(value)?,
            "max_iter" => self.shooting.max_iter = count(value)?,
            "fd_step" => self.shooting.fd_step = real(value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "jobs" => self.jobs = count(value)?.max(1),
            "seed" => self.seed = value.parse::<u64>().map_err(|e| bad(e.to_string()))?,
            "perturb" => self.perturb = real(value)?,
            "guess" => self.guess = Some(reals(value)?),
            "scan_lo" => self.scan_lo = Some(reals(value)?),
            "scan_hi" => self.scan_hi = Some(reals(value)?),
            "scan_n" => self.scan_n = Some(value.split(',').map(count).collect::<Result<Vec<_>, _>>()?),
            "scan_seeds" => self.scan_seeds = count(value)?,
            _ => return Err(ConfigError::UnknownKey { line, key: key.into() }),
        }
        Ok(())
    }

    /// Reads assignments from `text`. Blank lines and `#` comments are ignored.
    pub fn apply_text(&mut self, text: &str) -> Result<(), ConfigError> {
        let mut seen: Vec<String> = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let Some((k, v)) = body.split_once('=') else {
                return Err(ConfigError::Syntax { line, text: raw.trim().into() });
            };
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(ConfigError::Syntax { line, text: raw.trim().into() });
            }
            if seen.iter().any(|s| s == k) {
                return Err(ConfigError::Duplicate { line, key: k.into() });
            }
            seen.push(k.into());
            self.set(k, v, line)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
        self.apply_text(&text)
    }

    /// Scan box from `scan_lo`, `scan_hi`, `scan_n`, if all three are set.
    pub fn scan_box(&self, n_unknowns: usize) -> Result<Option<Vec<(f64, f64, usize)>>, ConfigError> {
        match (&self.scan_lo, &self.scan_hi, &self.scan_n) {
            (None, None, None) => Ok(None),
            (Some(lo), Some(hi), Some(n)) => {
                if lo.len() != n_unknowns || hi.len() != n_unknowns || n.len() != n_unknowns {
                    return Err(ConfigError::Invalid(format!(
                        "scan_lo, scan_hi and scan_n need {n_unknowns} entries each"
                    )));
                }
                Ok(Some((0..n_unknowns).map(|i| (lo[i], hi[i], n[i])).collect()))
            }
            _ => Err(ConfigError::Invalid("scan_lo, scan_hi and scan_n must be given together".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_assignments_and_comments() {
        let mut c = RunConfig::new(Command::Solve);
        c.apply_text("# run\ndiagram = so3_hitchin\nk = 3\n\nlambda = 6 # gauge\nguess = 1, 2,3\n").unwrap();
        assert_eq!(c.diagram_id().unwrap(), DiagramId::So3Hitchin(3));
        assert_eq!(c.shooting.lambda, 6.0);
        assert_eq!(c.guess, Some(vec![1.0, 2.0, 3.0]));
    }

    #[test]
    fn errors_name_the_line() {
        let mut c = RunConfig::new(Command::Solve);
        let e = c.apply_text("diagram = su2_s4\nthis is not valid\n").unwrap_err();
        assert_eq!(e, ConfigError::Syntax { line: 2, text: "this is not valid".into() });
        assert!(e.to_string().starts_with("line 2"));
        let e = RunConfig::new(Command::Solve).apply_text("\n\ncolour = red\n").unwrap_err();
        assert_eq!(e, ConfigError::UnknownKey { line: 3, key: "colour".into() });
        let e = RunConfig::new(Command::Solve).apply_text("tol = fast\n").unwrap_err();
        assert!(matches!(e, ConfigError::BadValue { line: 1, .. }));
        let e = RunConfig::new(Command::Solve).apply_text("tol = 1\ntol = 2\n").unwrap_err();
        assert!(matches!(e, ConfigError::Duplicate { line: 2, .. }));
    }

    #[test]
    fn scan_box_requires_all_three() {
        let mut c = RunConfig::new(Command::Scan);
        c.apply_text("scan_lo = 0,0\nscan_hi = 1,1\n").unwrap();
        assert!(c.scan_box(2).is_err());
        c.apply_text("scan_n = 2,3\n").unwrap();
        assert_eq!(c.scan_box(2).unwrap().unwrap(), vec![(0.0, 1.0, 2), (0.0, 1.0, 3)]);
    }
}
