//! Fault-localization metrics and corpus reports.
//!
//! A defect counts as localized at `k` when one of its ground-truth
//! statements appears within the top `k` of a ranking (E_inspect@k). EXAM is
//! the rank of the first ground-truth statement divided by the list length,
//! with 1.0 for misses and empty lists. Tied statements are not re-ranked.

use crate::blues::{apply_ranker_config, ensemble_configs, run_blues, BluesError, BluesOptions, RankerConfig};
use crate::corpus::{validate_bundle, DefectBundle, GroundTruth, Mode};
use crate::rafl::{sbir_aggregate, AggregationConfig};
use crate::ranked::RankedList;
use crate::sbfl::{rank_sbfl, SbflError};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::{self, Write as _};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("defect `{0}` has no ground truth")]
    NoGroundTruth(String),
    #[error("{technique} failed on `{defect}`: {message}")]
    Technique {
        technique: String,
        defect: String,
        message: String,
    },
}

/// A list-size cutoff: the top `n` entries or the whole list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Cutoff {
    Top(usize),
    All,
}

impl Cutoff {
    /// The cutoffs reported by default: 1, 25, 50, 100 and all.
    pub const STANDARD: [Cutoff; 5] = [
        Cutoff::Top(1),
        Cutoff::Top(25),
        Cutoff::Top(50),
        Cutoff::Top(100),
        Cutoff::All,
    ];

    pub fn admits(self, rank: usize) -> bool {
        match self {
            Cutoff::Top(k) => rank <= k,
            Cutoff::All => true,
        }
    }

    fn limit(self) -> usize {
        match self {
            Cutoff::Top(k) => k,
            Cutoff::All => usize::MAX,
        }
    }
}

impl fmt::Display for Cutoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cutoff::Top(k) => write!(f, "{k}"),
            Cutoff::All => f.write_str("all"),
        }
    }
}

impl FromStr for Cutoff {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("all") {
            return Ok(Cutoff::All);
        }
        match s.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(Cutoff::Top(k)),
            _ => Err(format!("invalid cutoff `{s}` (expected a positive integer or `all`)")),
        }
    }
}

impl From<Cutoff> for String {
    fn from(c: Cutoff) -> String {
        c.to_string()
    }
}

impl TryFrom<String> for Cutoff {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

/// Rank of the first ground-truth statement, or `None` if none is ranked.
pub fn first_buggy_rank(ranked: &RankedList, gt: &GroundTruth) -> Option<usize> {
    ranked
        .entries()
        .iter()
        .find(|e| gt.contains(&e.item_id))
        .map(|e| e.rank)
}

/// EXAM of the whole list.
pub fn exam_score(ranked: &RankedList, gt: &GroundTruth) -> f64 {
    exam_at(ranked, gt, Cutoff::All)
}

/// EXAM of the list cut to `cutoff`.
pub fn exam_at(ranked: &RankedList, gt: &GroundTruth, cutoff: Cutoff) -> f64 {
    let len = ranked.len().min(cutoff.limit());
    match first_buggy_rank(ranked, gt) {
        Some(r) if r <= len => r as f64 / len as f64,
        _ => 1.0,
    }
}

/// One technique's ranking of one defect.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalizationResult {
    pub defect_id: String,
    pub technique: String,
    pub ranked: RankedList,
    pub ground_truth: GroundTruth,
    pub first_buggy_rank: Option<usize>,
}

impl LocalizationResult {
    pub fn new(
        defect_id: impl Into<String>,
        technique: impl Into<String>,
        ranked: RankedList,
        gt: GroundTruth,
    ) -> Self {
        let first_buggy_rank = first_buggy_rank(&ranked, &gt);
        Self {
            defect_id: defect_id.into(),
            technique: technique.into(),
            ranked,
            ground_truth: gt,
            first_buggy_rank,
        }
    }

    pub fn exam_at(&self, cutoff: Cutoff) -> f64 {
        exam_at(&self.ranked, &self.ground_truth, cutoff)
    }
}

/// Number of results localized within `cutoff`.
pub fn e_inspect_at_k(results: &[LocalizationResult], cutoff: Cutoff) -> usize {
    count_localized(results.iter().map(|r| r.first_buggy_rank), cutoff)
}

fn count_localized(ranks: impl IntoIterator<Item = Option<usize>>, cutoff: Cutoff) -> usize {
    ranks.into_iter().flatten().filter(|&r| cutoff.admits(r)).count()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CutoffRow {
    pub k: Cutoff,
    pub e_inspect: usize,
    /// Mean EXAM over the evaluated defects with lists cut to `k`.
    pub mean_exam: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRow {
    pub defect_id: String,
    pub first_buggy_rank: Option<usize>,
    pub list_len: usize,
    pub exam: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TechniqueReport {
    pub technique: String,
    pub defects: usize,
    pub skipped: usize,
    pub mean_exam: f64,
    pub cutoffs: Vec<CutoffRow>,
    pub per_defect: Vec<DefectRow>,
}

impl TechniqueReport {
    pub fn e_inspect(&self, k: Cutoff) -> Option<usize> {
        self.cutoffs.iter().find(|c| c.k == k).map(|c| c.e_inspect)
    }
}

fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Summarizes one technique's results.
pub fn technique_report(name: &str, results: &[LocalizationResult], skipped: usize, ks: &[Cutoff]) -> TechniqueReport {
    let mut results: Vec<&LocalizationResult> = results.iter().collect();
    results.sort_by(|a, b| a.defect_id.cmp(&b.defect_id));
    TechniqueReport {
        technique: name.to_string(),
        defects: results.len(),
        skipped,
        mean_exam: mean(results.iter().map(|r| r.exam_at(Cutoff::All))),
        cutoffs: ks
            .iter()
            .map(|&k| CutoffRow {
                k,
                e_inspect: count_localized(results.iter().map(|r| r.first_buggy_rank), k),
                mean_exam: mean(results.iter().map(|r| r.exam_at(k))),
            })
            .collect(),
        per_defect: results
            .iter()
            .map(|r| DefectRow {
                defect_id: r.defect_id.clone(),
                first_buggy_rank: r.first_buggy_rank,
                list_len: r.ranked.len(),
                exam: r.exam_at(Cutoff::All),
            })
            .collect(),
    }
}

/// Union of several techniques: a defect is localized at `k` if any
/// constituent localizes it, so its rank is the smallest constituent rank
/// and its EXAM the smallest constituent EXAM. `constituents[i]` holds the
/// results of technique `i`; defects missing from some constituent are
/// judged on the others.
pub fn union_report(
    name: &str,
    constituents: &[Vec<LocalizationResult>],
    skipped: usize,
    ks: &[Cutoff],
) -> TechniqueReport {
    use std::collections::BTreeMap;
    let mut by_defect: BTreeMap<&str, Vec<&LocalizationResult>> = BTreeMap::new();
    for results in constituents {
        for r in results {
            by_defect.entry(&r.defect_id).or_default().push(r);
        }
    }
    let best_rank = |rs: &[&LocalizationResult]| rs.iter().filter_map(|r| r.first_buggy_rank).min();
    let best_exam = |rs: &[&LocalizationResult], k: Cutoff| rs.iter().map(|r| r.exam_at(k)).fold(1.0, f64::min);
    TechniqueReport {
        technique: name.to_string(),
        defects: by_defect.len(),
        skipped,
        mean_exam: mean(by_defect.values().map(|rs| best_exam(rs, Cutoff::All))),
        cutoffs: ks
            .iter()
            .map(|&k| CutoffRow {
                k,
                e_inspect: count_localized(by_defect.values().map(|rs| best_rank(rs)), k),
                mean_exam: mean(by_defect.values().map(|rs| best_exam(rs, k))),
            })
            .collect(),
        per_defect: by_defect
            .iter()
            .map(|(id, rs)| DefectRow {
                defect_id: id.to_string(),
                first_buggy_rank: best_rank(rs),
                list_len: rs.iter().map(|r| r.ranked.len()).max().unwrap_or(0),
                exam: best_exam(rs, Cutoff::All),
            })
            .collect(),
    }
}

/// A localization technique the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Technique {
    Sbfl,
    Blues(RankerConfig),
    BluesEnsemble,
    Sbir,
}

pub const UNION_NAME: &str = "blues-union";

impl Technique {
    /// SBFL, the six Blues configurations, the ensemble and SBIR.
    pub fn standard(top_files: usize) -> Vec<Technique> {
        let mut all = vec![Technique::Sbfl];
        all.extend(ensemble_configs(top_files).into_iter().map(Technique::Blues));
        all.push(Technique::BluesEnsemble);
        all.push(Technique::Sbir);
        all
    }

    pub fn name(&self) -> String {
        match self {
            Technique::Sbfl => "sbfl".into(),
            Technique::Blues(cfg) => format!("blues:{}", cfg.name()),
            Technique::BluesEnsemble => "blues-ensemble".into(),
            Technique::Sbir => "sbir".into(),
        }
    }

    fn mode(&self) -> Mode {
        match self {
            Technique::Sbfl => Mode::Sbfl,
            Technique::Blues(_) | Technique::BluesEnsemble => Mode::Irfl,
            Technique::Sbir => Mode::Sbir,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EvalOptions {
    pub blues: BluesOptions,
    pub aggregation: AggregationConfig,
    pub cutoffs: Vec<Cutoff>,
    pub union_mode: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            blues: BluesOptions::default(),
            aggregation: AggregationConfig::default(),
            cutoffs: Cutoff::STANDARD.to_vec(),
            union_mode: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub format_version: u32,
    pub defects: usize,
    pub techniques: Vec<TechniqueReport>,
}

impl CorpusReport {
    pub fn technique(&self, name: &str) -> Option<&TechniqueReport> {
        self.techniques.iter().find(|t| t.technique == name)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Aligned plain-text table: one row per technique, E_inspect then mean
    /// EXAM (as a percentage) for each cutoff.
    pub fn to_table(&self) -> String {
        let ks: Vec<Cutoff> = self
            .techniques
            .first()
            .map(|t| t.cutoffs.iter().map(|c| c.k).collect())
            .unwrap_or_default();
        let mut header = vec!["technique".to_string(), "defects".into()];
        header.extend(ks.iter().map(|k| format!("@{k}")));
        header.extend(ks.iter().map(|k| format!("EXAM@{k}")));
        let mut rows = vec![header];
        for t in &self.techniques {
            let mut row = vec![t.technique.clone(), t.defects.to_string()];
            row.extend(t.cutoffs.iter().map(|c| c.e_inspect.to_string()));
            row.extend(t.cutoffs.iter().map(|c| format!("{:.1}%", c.mean_exam * 100.0)));
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|i| rows.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for row in &rows {
            let cells: Vec<String> = row
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    if i == 0 {
                        format!("{c:<w$}", w = widths[i])
                    } else {
                        format!("{c:>w$}", w = widths[i])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join("  ").trim_end());
        }
        out
    }
}

enum Outcome {
    Ranked(RankedList),
    Skipped,
}

struct DefectLists {
    per_technique: Vec<Outcome>,
    configs: Option<Vec<RankedList>>,
}

fn technique_failure(t: &str, defect: &str, e: impl fmt::Display) -> EvalError {
    EvalError::Technique {
        technique: t.to_string(),
        defect: defect.to_string(),
        message: e.to_string(),
    }
}

fn run_defect(bundle: &DefectBundle, techniques: &[Technique], opts: &EvalOptions) -> Result<DefectLists, EvalError> {
    let id = &bundle.defect_id;
    let runnable = |m: Mode| validate_bundle(bundle, m).runnable;
    let needs_sbfl = techniques
        .iter()
        .any(|t| matches!(t, Technique::Sbfl | Technique::Sbir));
    let needs_blues = opts.union_mode || techniques.iter().any(|t| !matches!(t, Technique::Sbfl));

    let sbfl = if needs_sbfl && runnable(Mode::Sbfl) {
        match rank_sbfl(bundle) {
            Ok(l) => Some(l),
            Err(SbflError::NotRunnable(_)) => None,
            Err(e) => return Err(technique_failure("sbfl", id, e)),
        }
    } else {
        None
    };
    let blues = if needs_blues && runnable(Mode::Irfl) {
        match run_blues(bundle, &opts.blues) {
            Ok(run) => Some(run),
            Err(BluesError::NotRunnable(_)) => None,
            Err(e) => return Err(technique_failure("blues", id, e)),
        }
    } else {
        None
    };

    let mut per_technique = Vec::with_capacity(techniques.len());
    for t in techniques {
        if !runnable(t.mode()) {
            per_technique.push(Outcome::Skipped);
            continue;
        }
        let list = match t {
            Technique::Sbfl => sbfl.clone(),
            Technique::BluesEnsemble => blues.as_ref().map(|r| r.ensemble.clone()),
            Technique::Blues(cfg) => blues.as_ref().map(|r| {
                r.configs
                    .iter()
                    .find(|(c, _)| c == cfg)
                    .map(|(_, l)| l.clone())
                    .unwrap_or_else(|| apply_ranker_config(&r.files, &r.per_file, cfg))
            }),
            Technique::Sbir => match (&sbfl, &blues) {
                (Some(s), Some(b)) => Some(
                    sbir_aggregate(s, &b.ensemble, &opts.aggregation)
                        .map_err(|e| technique_failure("sbir", id, e))?
                        .0,
                ),
                _ => None,
            },
        };
        per_technique.push(list.map_or(Outcome::Skipped, Outcome::Ranked));
    }
    let configs = if opts.union_mode {
        blues.map(|r| r.configs.into_iter().map(|(_, l)| l).collect())
    } else {
        None
    };
    Ok(DefectLists { per_technique, configs })
}

/// Runs every technique on every bundle and summarizes the results.
/// Bundles a technique cannot run on are skipped and counted per technique.
/// With `union_mode`, a `blues-union` row scores each defect by the best of
/// the six Blues configurations.
pub fn evaluate_corpus(
    bundles: &[DefectBundle],
    techniques: &[Technique],
    opts: &EvalOptions,
) -> Result<CorpusReport, EvalError> {
    for b in bundles {
        if b.ground_truth.as_ref().is_none_or(|g| g.buggy_statements.is_empty()) {
            return Err(EvalError::NoGroundTruth(b.defect_id.clone()));
        }
    }
    let mut ordered: Vec<&DefectBundle> = bundles.iter().collect();
    ordered.sort_by(|a, b| a.defect_id.cmp(&b.defect_id));
    let lists: Vec<DefectLists> = ordered
        .par_iter()
        .map(|b| run_defect(b, techniques, opts))
        .collect::<Result<_, _>>()?;

    let mut reports = Vec::new();
    for (ti, t) in techniques.iter().enumerate() {
        let mut results = Vec::new();
        let mut skipped = 0;
        for (b, l) in ordered.iter().zip(&lists) {
            match &l.per_technique[ti] {
                Outcome::Ranked(r) => results.push(LocalizationResult::new(
                    &b.defect_id,
                    t.name(),
                    r.clone(),
                    b.ground_truth.clone().expect("checked above"),
                )),
                Outcome::Skipped => skipped += 1,
            }
        }
        reports.push(technique_report(&t.name(), &results, skipped, &opts.cutoffs));
    }
    if opts.union_mode {
        let mut constituents: Vec<Vec<LocalizationResult>> = vec![Vec::new(); 6];
        let mut skipped = 0;
        for (b, l) in ordered.iter().zip(&lists) {
            match &l.configs {
                Some(cfgs) => {
                    for (i, list) in cfgs.iter().enumerate() {
                        constituents[i].push(LocalizationResult::new(
                            &b.defect_id,
                            UNION_NAME,
                            list.clone(),
                            b.ground_truth.clone().expect("checked above"),
                        ));
                    }
                }
                None => skipped += 1,
            }
        }
        reports.push(union_report(UNION_NAME, &constituents, skipped, &opts.cutoffs));
    }
    Ok(CorpusReport {
        format_version: crate::FORMAT_VERSION,
        defects: bundles.len(),
        techniques: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gt(ids: &[&str]) -> GroundTruth {
        GroundTruth::new(ids.iter().copied())
    }

    fn ranked(ids: &[&str]) -> RankedList {
        RankedList::from_order(ids.iter().copied()).unwrap()
    }

    #[test]
    fn first_rank_examples() {
        let l = ranked(&["s5", "s2", "s9"]);
        assert_eq!(first_buggy_rank(&l, &gt(&["s2"])), Some(2));
        assert_eq!(first_buggy_rank(&l, &gt(&["x"])), None);
        assert_eq!(first_buggy_rank(&l, &gt(&["s5", "s9"])), Some(1));
    }

    fn results(ranks: &[Option<usize>]) -> Vec<LocalizationResult> {
        ranks
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let items: Vec<String> = (1..=5).map(|j| format!("d{i}s{j}")).collect();
                let bug = match r {
                    Some(r) => items[r - 1].clone(),
                    None => "absent".into(),
                };
                LocalizationResult::new(
                    format!("d{i}"),
                    "t",
                    RankedList::from_order(&items).unwrap(),
                    GroundTruth::new([bug]),
                )
            })
            .collect()
    }

    #[test]
    fn e_inspect_examples() {
        let rs = results(&[Some(1), Some(3), None]);
        assert_eq!(e_inspect_at_k(&rs, Cutoff::Top(1)), 1);
        assert_eq!(e_inspect_at_k(&rs, Cutoff::Top(3)), 2);
        assert_eq!(e_inspect_at_k(&rs, Cutoff::All), 2);
    }

    #[test]
    fn exam_examples() {
        assert!((exam_score(&ranked(&["a", "b", "c"]), &gt(&["b"])) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(exam_score(&ranked(&["a"]), &gt(&["a"])), 1.0);
        assert_eq!(exam_score(&ranked(&["a"]), &gt(&["z"])), 1.0);
        assert_eq!(exam_score(&RankedList::new(), &gt(&["z"])), 1.0);
        let l = ranked(&["a", "b", "c", "d"]);
        assert_eq!(exam_at(&l, &gt(&["b"]), Cutoff::Top(2)), 1.0);
        assert_eq!(exam_at(&l, &gt(&["c"]), Cutoff::Top(2)), 1.0);
        assert_eq!(exam_at(&l, &gt(&["a"]), Cutoff::Top(2)), 0.5);
    }

    #[test]
    fn report_for_single_hit() {
        let r = LocalizationResult::new("d1", "t", ranked(&["a", "b", "c", "d"]), gt(&["a"]));
        let rep = technique_report("t", &[r], 0, &Cutoff::STANDARD);
        assert_eq!(rep.e_inspect(Cutoff::Top(1)), Some(1));
        assert_eq!(rep.mean_exam, 0.25);
    }

    #[test]
    fn union_of_hit_and_miss() {
        let hit = LocalizationResult::new("d1", "t", ranked(&["a", "b"]), gt(&["a"]));
        let miss = LocalizationResult::new("d1", "t", ranked(&["b", "c"]), gt(&["a"]));
        let rep = union_report("u", &[vec![hit], vec![miss]], 0, &Cutoff::STANDARD);
        assert_eq!(rep.e_inspect(Cutoff::Top(1)), Some(1));
        assert_eq!(rep.mean_exam, 0.5);
    }

    #[test]
    fn empty_corpus_is_all_zero() {
        let rep = evaluate_corpus(&[], &Technique::standard(50), &EvalOptions::default()).unwrap();
        assert_eq!(rep.defects, 0);
        for t in &rep.techniques {
            assert_eq!(t.defects, 0);
            assert!(t.cutoffs.iter().all(|c| c.e_inspect == 0 && c.mean_exam == 0.0));
        }
    }

    #[test]
    fn cutoff_parsing() {
        assert_eq!("25".parse::<Cutoff>(), Ok(Cutoff::Top(25)));
        assert_eq!("ALL".parse::<Cutoff>(), Ok(Cutoff::All));
        assert!("0".parse::<Cutoff>().is_err());
        assert_eq!(serde_json::to_string(&Cutoff::Top(5)).unwrap(), "\"5\"");
    }

    #[test]
    fn table_is_aligned() {
        let r = LocalizationResult::new("d1", "sbfl", ranked(&["a", "b", "c", "d"]), gt(&["b"]));
        let report = CorpusReport {
            format_version: 1,
            defects: 1,
            techniques: vec![technique_report("sbfl", &[r], 0, &[Cutoff::Top(1), Cutoff::All])],
        };
        let table = report.to_table();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[0].starts_with("technique"));
        assert!(lines[1].contains("50.0%"));
    }
}
