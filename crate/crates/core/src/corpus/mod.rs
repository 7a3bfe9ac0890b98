//! Data model and on-disk interchange for defect bundles.
//!
//! A bundle is a directory:
//!
//! ```text
//! manifest.json        {"defect_id", "project", "paths": {...}}
//! statements.jsonl     one StatementRecord per line
//! bug_report.json      BugReport
//! coverage.jsonl       one CoverageRecord per line
//! ground_truth.json    GroundTruth (optional)
//! src/                 source files (optional, named by manifest paths.sources)
//! ```

mod io;
mod kinds;

pub use io::{load_corpus, load_defect_bundle, write_defect_bundle, BundleLoader, Manifest, ManifestPaths};
pub use kinds::{KindCatalog, KindCategory};

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("missing required file {0}")]
    MissingFile(PathBuf),
    #[error("{file}:{line}: {message}")]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },
    #[error("dangling reference to unknown statement `{0}`")]
    DanglingReference(String),
    #[error("duplicate statement id `{0}`")]
    DuplicateStatement(String),
    #[error("invalid record: {0}")]
    Invalid(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub report_id: String,
    pub summary: String,
    #[serde(default)]
    pub description: String,
}

impl BugReport {
    pub fn has_text(&self) -> bool {
        !self.summary.trim().is_empty() || !self.description.trim().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatementRecord {
    pub statement_id: String,
    pub file_path: String,
    pub kind: String,
    pub start_line: u32,
    pub end_line: u32,
    pub raw_text: String,
    /// Index terms. When empty, consumers tokenize `raw_text` themselves.
    #[serde(default)]
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageRecord {
    pub test_id: String,
    pub outcome: Outcome,
    pub covered: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub buggy_statements: BTreeSet<String>,
}

impl GroundTruth {
    pub fn new<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self {
            buggy_statements: ids.into_iter().map(Into::into).collect(),
        }
    }

    pub fn contains(&self, id: &str) -> bool {
        self.buggy_statements.contains(id)
    }
}

/// Everything known about one defect. Immutable once loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct DefectBundle {
    pub defect_id: String,
    pub project: String,
    pub statements: Vec<StatementRecord>,
    pub bug_report: BugReport,
    pub coverage: Vec<CoverageRecord>,
    pub ground_truth: Option<GroundTruth>,
    /// Source text keyed by `file_path`, when the bundle ships sources.
    pub file_texts: Option<BTreeMap<String, String>>,
}

impl DefectBundle {
    /// Checks the cross-record invariants: unique statement ids, well-formed
    /// spans and kinds, and no dangling coverage or ground-truth ids.
    pub fn check(&self, catalog: &KindCatalog) -> Result<(), CorpusError> {
        let mut ids = BTreeSet::new();
        for s in &self.statements {
            if !ids.insert(s.statement_id.as_str()) {
                return Err(CorpusError::DuplicateStatement(s.statement_id.clone()));
            }
            if s.start_line == 0 || s.start_line > s.end_line {
                return Err(CorpusError::Invalid(format!(
                    "statement `{}` has span {}..{}",
                    s.statement_id, s.start_line, s.end_line
                )));
            }
            if !catalog.contains(&s.kind) {
                return Err(CorpusError::Invalid(format!(
                    "statement `{}` has unknown kind `{}`",
                    s.statement_id, s.kind
                )));
            }
        }
        for rec in &self.coverage {
            if let Some(bad) = rec.covered.iter().find(|id| !ids.contains(id.as_str())) {
                return Err(CorpusError::DanglingReference(bad.clone()));
            }
        }
        if let Some(gt) = &self.ground_truth {
            if gt.buggy_statements.is_empty() {
                return Err(CorpusError::Invalid("ground truth is empty".into()));
            }
            if let Some(bad) = gt.buggy_statements.iter().find(|id| !ids.contains(id.as_str())) {
                return Err(CorpusError::DanglingReference(bad.clone()));
            }
        }
        Ok(())
    }

    pub fn failing_tests(&self) -> usize {
        self.coverage.iter().filter(|c| c.outcome == Outcome::Fail).count()
    }

    /// Distinct file paths, from statements and shipped sources, sorted.
    pub fn files(&self) -> Vec<String> {
        let mut files: BTreeSet<&str> = self.statements.iter().map(|s| s.file_path.as_str()).collect();
        if let Some(texts) = &self.file_texts {
            files.extend(texts.keys().map(String::as_str));
        }
        files.into_iter().map(str::to_string).collect()
    }

    pub fn statement_order(&self) -> StatementOrder {
        StatementOrder::new(&self.statements)
    }
}

/// Canonical statement order: ascending `(file_path, start_line, ordinal)`,
/// where the ordinal is the record's position among same-line records.
#[derive(Debug, Clone)]
pub struct StatementOrder {
    position: HashMap<String, usize>,
}

impl StatementOrder {
    pub fn new(statements: &[StatementRecord]) -> Self {
        let mut idx: Vec<usize> = (0..statements.len()).collect();
        idx.sort_by(|&a, &b| {
            let (sa, sb) = (&statements[a], &statements[b]);
            (sa.file_path.as_str(), sa.start_line, a).cmp(&(sb.file_path.as_str(), sb.start_line, b))
        });
        let position = idx
            .into_iter()
            .enumerate()
            .map(|(pos, i)| (statements[i].statement_id.clone(), pos))
            .collect();
        Self { position }
    }

    /// Position in canonical order; unknown ids sort last.
    pub fn position(&self, id: &str) -> usize {
        self.position.get(id).copied().unwrap_or(usize::MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Sbfl,
    Irfl,
    Sbir,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Sbfl => "sbfl",
            Mode::Irfl => "irfl",
            Mode::Sbir => "sbir",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub mode: Mode,
    pub runnable: bool,
    pub reasons: Vec<String>,
}

/// Reports whether a technique can run on `bundle`.
pub fn validate_bundle(bundle: &DefectBundle, mode: Mode) -> ValidationReport {
    let mut reasons = Vec::new();
    if bundle.statements.is_empty() {
        reasons.push("no statements".to_string());
    }
    if matches!(mode, Mode::Sbfl | Mode::Sbir) && bundle.failing_tests() == 0 {
        reasons.push("no failing test".to_string());
    }
    if matches!(mode, Mode::Irfl | Mode::Sbir) && !bundle.bug_report.has_text() {
        reasons.push("empty bug report".to_string());
    }
    ValidationReport {
        mode,
        runnable: reasons.is_empty(),
        reasons,
    }
}
