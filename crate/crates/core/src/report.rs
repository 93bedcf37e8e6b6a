//! Run reports: per-check records, JSON and CSV emission, exit codes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, Format};
use crate::error::{Error, Result};

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Where the bound of a check comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    /// Closed-form constant or exact identity.
    Analytic,
    /// Baseline measured in the same run (refinement or stability checks).
    MeasuredBaseline,
    /// No bound; the record is informational.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    /// `value ≤ bound + tol`.
    AtMost,
    /// `value ≤ bound · (1 + tol)`.
    AtMostRelative,
    /// `value ≥ bound − tol`.
    AtLeast,
    /// `value ≥ bound + tol`.
    Above,
    /// `value ≤ bound − tol`.
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub value: f64,
    pub bound: Option<f64>,
    pub tol: Option<f64>,
    pub relation: Option<Relation>,
    pub pass: bool,
    /// Failing gating checks fail the run; informational ones never do.
    pub gating: bool,
    pub source: BoundSource,
}

impl CheckRecord {
    pub fn gate(name: impl Into<String>, value: f64, relation: Relation, bound: f64, tol: f64, source: BoundSource) -> Self {
        let pass = match relation {
            Relation::AtMost => value <= bound + tol,
            Relation::AtMostRelative => value <= bound * (1.0 + tol),
            Relation::AtLeast => value >= bound - tol,
            Relation::Above => value >= bound + tol,
            Relation::Below => value <= bound - tol,
        };
        Self {
            name: name.into(),
            value,
            bound: Some(bound),
            tol: Some(tol),
            relation: Some(relation),
            pass,
            gating: true,
            source,
        }
    }

    /// Error-type check `value ≤ tol` against an exact identity.
    pub fn error(name: impl Into<String>, value: f64, tol: f64) -> Self {
        Self::gate(name, value, Relation::AtMost, 0.0, tol, BoundSource::Analytic)
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
            bound: None,
            tol: None,
            relation: None,
            pass: value.is_finite(),
            gating: false,
            source: BoundSource::None,
        }
    }

    /// Informational record compared against a bound without gating the run.
    pub fn informational(mut self) -> Self {
        self.gating = false;
        self
    }
}

/// Machine-readable failure record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}

impl ErrorRecord {
    pub fn from_error(e: &Error) -> Self {
        let kind = match e {
            Error::Domain(_) => "domain",
            Error::Numerical(_) => "numerical",
            Error::SingularMetric(_) => "singular-metric",
            Error::Dimension { .. } => "dimension",
            Error::InvalidInput(_) => "invalid-input",
            Error::Schema(_) => "schema",
            Error::UnknownRegistryEntry(_) => "unknown registry entry",
            Error::Io(_) => "io",
        };
        Self { kind: kind.into(), message: e.to_string(), exit_code: exit_code_for_error(e) }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILURE: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// 2 for configuration problems, 3 for failures inside a computation.
pub fn exit_code_for_error(e: &Error) -> i32 {
    match e {
        Error::Schema(_) | Error::UnknownRegistryEntry(_) | Error::InvalidInput(_) | Error::Io(_) => EXIT_SCHEMA,
        Error::Numerical(_) | Error::SingularMetric(_) | Error::Domain(_) | Error::Dimension { .. } => EXIT_NUMERICAL,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub toolkit_version: String,
    pub config: ExperimentConfig,
    pub checks: Vec<CheckRecord>,
    /// Full experiment output.
    pub details: serde_json::Value,
    pub wall_clock_s: f64,
    pub error: Option<ErrorRecord>,
}

impl RunReport {
    pub fn gating_pass(&self) -> bool {
        self.error.is_none() && self.checks.iter().filter(|c| c.gating).all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| c.gating && !c.pass)
    }

    pub fn exit_code(&self) -> i32 {
        match &self.error {
            Some(e) => e.exit_code,
            None if self.gating_pass() => EXIT_PASS,
            None => EXIT_CHECK_FAILURE,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Numerical(format!("cannot serialize report: {e}")))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(format!("invalid report: {e}")))
    }

    /// `check_name,value,bound,tol,pass,gating`, one row per record in
    /// report order. Independent of timing, so identical runs give identical
    /// bytes.
    pub fn to_csv(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Row<'a> {
            check_name: &'a str,
            value: f64,
            bound: Option<f64>,
            tol: Option<f64>,
            pass: bool,
            gating: bool,
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        for c in &self.checks {
            w.serialize(Row { check_name: &c.name, value: c.value, bound: c.bound, tol: c.tol, pass: c.pass, gating: c.gating })
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        if let Some(e) = &self.error {
            w.serialize(Row { check_name: &format!("error.{}", e.kind), value: e.exit_code as f64, bound: None, tol: None, pass: false, gating: true })
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
    }

    /// Writes `<kind>.json` and/or `<kind>.csv` into `dir`.
    pub fn emit(&self, dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("cannot create {}: {e}", dir.display())))?;
        let mut out = Vec::new();
        for f in formats {
            let (ext, body) = match f {
                Format::Json => ("json", self.to_json()?),
                Format::Csv => ("csv", self.to_csv()?),
            };
            let path = dir.join(format!("{}.{ext}", self.config.kind.name()));
            std::fs::write(&path, body).map_err(|e| Error::Io(format!("cannot write {}: {e}", path.display())))?;
            out.push(path);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;

    #[test]
    fn relations() {
        assert!(CheckRecord::gate("a", 1.05, Relation::AtMostRelative, 1.0, 0.1, BoundSource::Analytic).pass);
        assert!(!CheckRecord::gate("a", 1.2, Relation::AtMostRelative, 1.0, 0.1, BoundSource::Analytic).pass);
        assert!(CheckRecord::gate("a", -1e-9, Relation::AtLeast, 0.0, 1e-8, BoundSource::Analytic).pass);
        assert!(!CheckRecord::gate("a", 1e-9, Relation::Above, 0.0, 1e-8, BoundSource::Analytic).pass);
        assert!(!CheckRecord::gate("a", 1.0, Relation::Below, 1.0, 1e-12, BoundSource::Analytic).pass);
        assert!(!CheckRecord::error("a", f64::NAN, 1.0).pass);
    }

    #[test]
    fn csv_and_exit_codes() {
        let mut r = RunReport {
            toolkit_version: TOOLKIT_VERSION.into(),
            config: ExperimentConfig::new(ExperimentKind::Detraz),
            checks: vec![CheckRecord::info("x", 0.5), CheckRecord::error("y", 1e-9, 1e-6)],
            details: serde_json::Value::Null,
            wall_clock_s: 0.0,
            error: None,
        };
        assert_eq!(r.to_csv().unwrap(), "check_name,value,bound,tol,pass,gating\nx,0.5,,,true,false\ny,1e-9,0.0,1e-6,true,true\n");
        assert_eq!(r.exit_code(), 0);
        r.checks.push(CheckRecord::error("z", 1.0, 1e-6));
        assert_eq!(r.exit_code(), 1);
        r.error = Some(ErrorRecord::from_error(&Error::Numerical("x".into())));
        assert_eq!(r.exit_code(), 3);
    }
}
