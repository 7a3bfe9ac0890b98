//! Statement-level localization from bug-report text.
//!
//! Files are ranked against the bug report with structured BM25 over their
//! class, method and variable names and comments. Statements of the top files
//! are ranked against the same report, and a ranker configuration
//! `(f, m, ScoreFn)` turns the two levels into one list. Six configurations
//! are merged into the ensemble list.

mod extract;
mod lexer;

pub use extract::{extract_statements, extract_with, Diagnostic, Extraction, FileSummary};

use crate::corpus::{validate_bundle, DefectBundle, Mode, StatementOrder, StatementRecord};
use crate::ranked::RankedList;
use crate::textkit::{Bm25Scorer, FieldedDocument, Index, TextError, Tokenizer};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

pub const FILE_FIELDS: [&str; 4] = ["class_names", "method_names", "variable_names", "comments"];
pub const STATEMENT_FIELD: &str = "stmt_terms";
pub const QUERY_FIELDS: [&str; 2] = ["summary", "description"];

/// Number of top files considered by default.
pub const DEFAULT_TOP_FILES: usize = 50;

#[derive(Debug, Error, PartialEq)]
pub enum BluesError {
    #[error("bundle not runnable for irfl: {0}")]
    NotRunnable(String),
    #[error("file `{0}` has no statements")]
    NoStatements(String),
    #[error(transparent)]
    Text(#[from] TextError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScoreFn {
    /// Top-m statements of the best file, then of the next file, and so on.
    High,
    /// Statement score multiplied by its file's score, sorted globally.
    Wt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PerFile {
    Top(usize),
    All,
}

impl PerFile {
    fn limit(self) -> usize {
        match self {
            PerFile::Top(m) => m,
            PerFile::All => usize::MAX,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RankerConfig {
    pub files: usize,
    pub per_file: PerFile,
    pub score_fn: ScoreFn,
}

impl RankerConfig {
    pub fn new(files: usize, per_file: PerFile, score_fn: ScoreFn) -> Self {
        assert!(files >= 1, "a ranker configuration needs at least one file");
        Self {
            files,
            per_file,
            score_fn,
        }
    }

    /// Short stable name, e.g. `high-m25` or `wt-mall`.
    pub fn name(&self) -> String {
        let m = match self.per_file {
            PerFile::Top(m) => m.to_string(),
            PerFile::All => "all".into(),
        };
        let f = match self.score_fn {
            ScoreFn::High => "high",
            ScoreFn::Wt => "wt",
        };
        format!("{f}-m{m}")
    }
}

impl fmt::Display for RankerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (f={})", self.name(), self.files)
    }
}

/// The six ensemble configurations in precedence order: `m` in
/// {1, 25, 50, 100, all} with `High`, then `m = all` with `Wt`.
pub fn ensemble_configs(files: usize) -> [RankerConfig; 6] {
    [
        RankerConfig::new(files, PerFile::Top(1), ScoreFn::High),
        RankerConfig::new(files, PerFile::Top(25), ScoreFn::High),
        RankerConfig::new(files, PerFile::Top(50), ScoreFn::High),
        RankerConfig::new(files, PerFile::Top(100), ScoreFn::High),
        RankerConfig::new(files, PerFile::All, ScoreFn::High),
        RankerConfig::new(files, PerFile::All, ScoreFn::Wt),
    ]
}

#[derive(Debug, Clone)]
pub struct BluesOptions {
    pub scorer: Bm25Scorer,
    pub tokenizer: Tokenizer,
    pub top_files: usize,
}

impl Default for BluesOptions {
    fn default() -> Self {
        Self {
            scorer: Bm25Scorer::default(),
            tokenizer: Tokenizer::default(),
            top_files: DEFAULT_TOP_FILES,
        }
    }
}

/// The bug report as a query with `summary` and `description` fields.
pub fn report_query(bundle: &DefectBundle, tokenizer: &Tokenizer) -> FieldedDocument {
    let r = &bundle.bug_report;
    FieldedDocument::new(r.report_id.clone())
        .with_field(QUERY_FIELDS[0], tokenizer.tokenize(&r.summary, true))
        .with_field(QUERY_FIELDS[1], tokenizer.tokenize(&r.description, true))
}

fn statement_terms(s: &StatementRecord, tokenizer: &Tokenizer) -> Vec<String> {
    if s.tokens.is_empty() {
        tokenizer.tokenize(&s.raw_text, true)
    } else {
        s.tokens.clone()
    }
}

/// File-level documents. Shipped source is summarized by the extractor;
/// without source, a file's statement terms stand in for its identifiers and
/// its base name for the class name.
pub fn file_documents(bundle: &DefectBundle, tokenizer: &Tokenizer) -> Vec<FieldedDocument> {
    let mut by_file: BTreeMap<&str, Vec<&StatementRecord>> = BTreeMap::new();
    for s in &bundle.statements {
        by_file.entry(&s.file_path).or_default().push(s);
    }
    bundle
        .files()
        .into_iter()
        .map(|file| {
            let text = bundle.file_texts.as_ref().and_then(|t| t.get(&file));
            let summary = match text {
                Some(src) => extract_with(&file, src, tokenizer).summary,
                None => {
                    let stem = file
                        .rsplit('/')
                        .next()
                        .and_then(|n| n.split('.').next())
                        .unwrap_or("")
                        .to_string();
                    FileSummary {
                        class_names: vec![stem],
                        ..Default::default()
                    }
                }
            };
            let join = |parts: &[String]| tokenizer.tokenize(&parts.join(" "), true);
            let mut variables = join(&summary.variable_names);
            if text.is_none() {
                for s in by_file.get(file.as_str()).into_iter().flatten() {
                    variables.extend(statement_terms(s, tokenizer));
                }
            }
            FieldedDocument::new(file.clone())
                .with_field(FILE_FIELDS[0], join(&summary.class_names))
                .with_field(FILE_FIELDS[1], join(&summary.method_names))
                .with_field(FILE_FIELDS[2], variables)
                .with_field(FILE_FIELDS[3], join(&summary.comments))
        })
        .collect()
}

fn require_irfl(bundle: &DefectBundle) -> Result<(), BluesError> {
    let report = validate_bundle(bundle, Mode::Irfl);
    if report.runnable {
        Ok(())
    } else {
        Err(BluesError::NotRunnable(report.reasons.join("; ")))
    }
}

/// Files ranked by BM25 similarity to the bug report.
pub fn rank_files(bundle: &DefectBundle, opts: &BluesOptions) -> Result<RankedList, BluesError> {
    require_irfl(bundle)?;
    let index = Index::build(&file_documents(bundle, &opts.tokenizer))?;
    Ok(opts.scorer.rank(&index, &report_query(bundle, &opts.tokenizer))?)
}

/// Statements of one file ranked against the bug report. Each file is its
/// own collection, so document frequencies are per file. Ties keep
/// canonical statement order.
pub fn rank_statements_in_file(
    file: &str,
    bundle: &DefectBundle,
    opts: &BluesOptions,
) -> Result<RankedList, BluesError> {
    let order = bundle.statement_order();
    let query = report_query(bundle, &opts.tokenizer);
    rank_file_statements(file, bundle, &query, &order, opts)
}

fn rank_file_statements(
    file: &str,
    bundle: &DefectBundle,
    query: &FieldedDocument,
    order: &StatementOrder,
    opts: &BluesOptions,
) -> Result<RankedList, BluesError> {
    let docs: Vec<FieldedDocument> = bundle
        .statements
        .iter()
        .filter(|s| s.file_path == file)
        .map(|s| {
            FieldedDocument::new(s.statement_id.clone())
                .with_field(STATEMENT_FIELD, statement_terms(s, &opts.tokenizer))
        })
        .collect();
    if docs.is_empty() {
        return Err(BluesError::NoStatements(file.to_string()));
    }
    let index = Index::build(&docs)?;
    let mut scored: Vec<(String, f64)> = opts
        .scorer
        .score_all(&index, query)
        .into_iter()
        .filter(|(_, s)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| order.position(&a.0).cmp(&order.position(&b.0)))
    });
    Ok(RankedList::from_scored(scored).expect("statement ids are unique"))
}

/// Combines a file ranking with per-file statement rankings.
///
/// Files without an entry in `per_file` contribute nothing.
pub fn apply_ranker_config(
    files: &RankedList,
    per_file: &HashMap<String, RankedList>,
    cfg: &RankerConfig,
) -> RankedList {
    let m = cfg.per_file.limit();
    let top = files.entries().iter().take(cfg.files);
    let mut out: Vec<(String, f64)> = Vec::new();
    match cfg.score_fn {
        ScoreFn::High => {
            for f in top {
                if let Some(stmts) = per_file.get(&f.item_id) {
                    out.extend(stmts.entries().iter().take(m).map(|s| (s.item_id.clone(), s.score)));
                }
            }
        }
        ScoreFn::Wt => {
            // (weighted score, file rank, position in file list)
            let mut weighted: Vec<(String, f64, usize, usize)> = Vec::new();
            for f in top {
                if let Some(stmts) = per_file.get(&f.item_id) {
                    for (pos, s) in stmts.entries().iter().take(m).enumerate() {
                        weighted.push((s.item_id.clone(), f.score * s.score, f.rank, pos));
                    }
                }
            }
            weighted.sort_by(|a, b| {
                b.1.partial_cmp(&a.1)
                    .unwrap_or(Ordering::Equal)
                    .then(a.2.cmp(&b.2))
                    .then(a.3.cmp(&b.3))
            });
            out = weighted.into_iter().map(|(id, s, _, _)| (id, s)).collect();
        }
    }
    RankedList::from_scored(out).expect("a statement belongs to exactly one file")
}

/// Merges lists by best rank. Each item's key is its smallest rank across
/// lists; ties go to the earlier list in `lists`, then to canonical order.
/// Emitted scores are `1/key`.
pub fn merge_best_rank(lists: &[RankedList], order: &StatementOrder) -> RankedList {
    let mut best: HashMap<&str, (usize, usize)> = HashMap::new();
    for (li, list) in lists.iter().enumerate() {
        for e in list.entries() {
            best.entry(&e.item_id)
                .and_modify(|cur| {
                    if (e.rank, li) < *cur {
                        *cur = (e.rank, li);
                    }
                })
                .or_insert((e.rank, li));
        }
    }
    let mut items: Vec<(&str, usize, usize)> = best.into_iter().map(|(id, (r, l))| (id, r, l)).collect();
    items.sort_by(|a, b| (a.1, a.2, order.position(a.0), a.0).cmp(&(b.1, b.2, order.position(b.0), b.0)));
    RankedList::from_scored(items.into_iter().map(|(id, key, _)| (id, 1.0 / key as f64)))
        .expect("merged ids are unique")
}

/// Everything one Blues run produces.
#[derive(Debug, Clone)]
pub struct BluesRun {
    pub files: RankedList,
    pub per_file: HashMap<String, RankedList>,
    pub configs: Vec<(RankerConfig, RankedList)>,
    pub ensemble: RankedList,
}

/// Ranks files and statements once, then applies all six configurations.
pub fn run_blues(bundle: &DefectBundle, opts: &BluesOptions) -> Result<BluesRun, BluesError> {
    let files = rank_files(bundle, opts)?;
    let order = bundle.statement_order();
    let query = report_query(bundle, &opts.tokenizer);
    let mut per_file = HashMap::new();
    for f in files.entries().iter().take(opts.top_files) {
        match rank_file_statements(&f.item_id, bundle, &query, &order, opts) {
            Ok(list) => {
                per_file.insert(f.item_id.clone(), list);
            }
            Err(BluesError::NoStatements(_)) => {}
            Err(e) => return Err(e),
        }
    }
    let configs: Vec<(RankerConfig, RankedList)> = ensemble_configs(opts.top_files)
        .into_iter()
        .map(|cfg| {
            let list = apply_ranker_config(&files, &per_file, &cfg);
            (cfg, list)
        })
        .collect();
    let lists: Vec<RankedList> = configs.iter().map(|(_, l)| l.clone()).collect();
    let ensemble = merge_best_rank(&lists, &order);
    Ok(BluesRun {
        files,
        per_file,
        configs,
        ensemble,
    })
}

/// The merged six-configuration ranking with default options.
pub fn blues_ensemble(bundle: &DefectBundle) -> Result<RankedList, BluesError> {
    Ok(run_blues(bundle, &BluesOptions::default())?.ensemble)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::tests::{bundle, stmt};

    fn list(items: &[(&str, f64)]) -> RankedList {
        RankedList::from_scored(items.iter().map(|(i, s)| (*i, *s))).unwrap()
    }

    fn ids(l: &RankedList) -> Vec<&str> {
        l.items().collect()
    }

    fn two_file_input() -> (RankedList, HashMap<String, RankedList>) {
        let files = list(&[("A", 0.9), ("B", 0.5)]);
        let per_file = HashMap::from([
            ("A".to_string(), list(&[("a1", 0.2), ("a2", 0.1)])),
            ("B".to_string(), list(&[("b1", 0.8), ("b2", 0.05)])),
        ]);
        (files, per_file)
    }

    #[test]
    fn high_takes_m_per_file_in_file_order() {
        let (files, per_file) = two_file_input();
        let cfg = RankerConfig::new(2, PerFile::Top(1), ScoreFn::High);
        assert_eq!(ids(&apply_ranker_config(&files, &per_file, &cfg)), ["a1", "b1"]);
        let cfg = RankerConfig::new(1, PerFile::All, ScoreFn::High);
        assert_eq!(ids(&apply_ranker_config(&files, &per_file, &cfg)), ["a1", "a2"]);
    }

    #[test]
    fn wt_multiplies_and_sorts() {
        let (files, per_file) = two_file_input();
        let cfg = RankerConfig::new(2, PerFile::Top(1), ScoreFn::Wt);
        let out = apply_ranker_config(&files, &per_file, &cfg);
        assert_eq!(ids(&out), ["b1", "a1"]);
        assert!((out.get(0).unwrap().score - 0.40).abs() < 1e-12);
        assert!((out.get(1).unwrap().score - 0.18).abs() < 1e-12);
    }

    #[test]
    fn wt_ties_prefer_better_file() {
        let files = list(&[("A", 1.0), ("B", 0.5)]);
        let per_file = HashMap::from([
            ("A".to_string(), list(&[("a1", 0.5)])),
            ("B".to_string(), list(&[("b1", 1.0)])),
        ]);
        let cfg = RankerConfig::new(2, PerFile::All, ScoreFn::Wt);
        assert_eq!(ids(&apply_ranker_config(&files, &per_file, &cfg)), ["a1", "b1"]);
    }

    #[test]
    fn merge_example() {
        let order = StatementOrder::new(&[]);
        let l1 = RankedList::from_order(["a", "b"]).unwrap();
        let l2 = RankedList::from_order(["b", "c"]).unwrap();
        let merged = merge_best_rank(&[l1.clone(), l2], &order);
        assert_eq!(ids(&merged), ["a", "b", "c"]);
        assert_eq!(merged.get(2).unwrap().score, 0.5);

        let same = merge_best_rank(&[l1.clone(), l1.clone(), l1.clone()], &order);
        assert_eq!(ids(&same), ids(&l1));
    }

    #[test]
    fn ensemble_configs_match_published_set() {
        let names: Vec<String> = ensemble_configs(50).iter().map(RankerConfig::name).collect();
        assert_eq!(
            names,
            ["high-m1", "high-m25", "high-m50", "high-m100", "high-mall", "wt-mall"]
        );
        assert!(ensemble_configs(50).iter().all(|c| c.files == 50));
    }

    fn ir_bundle() -> DefectBundle {
        let mut b = bundle();
        let mut s1 = stmt("P:1", "Parser.java", 1);
        s1.raw_text = "int depth = parseExpression(tokens);".into();
        let mut s2 = stmt("P:2", "Parser.java", 2);
        s2.raw_text = "log(count);".into();
        let mut s3 = stmt("R:1", "Render.java", 1);
        s3.raw_text = "draw(canvas, color);".into();
        b.statements = vec![s1, s2, s3];
        b.coverage.clear();
        b.ground_truth = None;
        b.bug_report.summary = "Parser crashes in parseExpression".into();
        b.bug_report.description = "The parser throws when tokens are empty".into();
        b
    }

    #[test]
    fn files_and_statements_rank_by_report() {
        let b = ir_bundle();
        let opts = BluesOptions::default();
        let files = rank_files(&b, &opts).unwrap();
        assert_eq!(ids(&files), ["Parser.java"]);
        let stmts = rank_statements_in_file("Parser.java", &b, &opts).unwrap();
        assert_eq!(ids(&stmts), ["P:1"]);
        assert_eq!(
            rank_statements_in_file("Nope.java", &b, &opts),
            Err(BluesError::NoStatements("Nope.java".into()))
        );
    }

    #[test]
    fn unrelated_report_gives_empty_lists() {
        let mut b = ir_bundle();
        b.bug_report.summary = "zebra".into();
        b.bug_report.description.clear();
        let run = run_blues(&b, &BluesOptions::default()).unwrap();
        assert!(run.files.is_empty());
        assert!(run.ensemble.is_empty());
    }

    #[test]
    fn empty_report_not_runnable() {
        let mut b = ir_bundle();
        b.bug_report.summary = "  ".into();
        b.bug_report.description.clear();
        assert!(matches!(blues_ensemble(&b), Err(BluesError::NotRunnable(_))));
    }

    #[test]
    fn ensemble_is_union_of_configs() {
        let b = ir_bundle();
        let run = run_blues(&b, &BluesOptions::default()).unwrap();
        let mut from_configs: Vec<&str> = run.configs.iter().flat_map(|(_, l)| l.items()).collect();
        from_configs.sort();
        from_configs.dedup();
        let mut ens: Vec<&str> = run.ensemble.items().collect();
        ens.sort();
        assert_eq!(ens, from_configs);
    }
}
