//! Spectrum-based fault localization with the Ochiai formula.

use crate::corpus::{validate_bundle, CoverageRecord, DefectBundle, Mode, Outcome, StatementRecord};
use crate::ranked::RankedList;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SbflError {
    #[error("no tests in coverage")]
    NoTests,
    #[error("bundle not runnable for sbfl: {0}")]
    NotRunnable(String),
}

/// Failing/passing tests that do (`e_*`) and do not (`n_*`) execute a statement.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counters {
    pub e_f: u32,
    pub n_f: u32,
    pub e_p: u32,
    pub n_p: u32,
}

impl Counters {
    pub fn new(e_f: u32, n_f: u32, e_p: u32, n_p: u32) -> Self {
        Self { e_f, n_f, e_p, n_p }
    }
}

/// Per-statement counters, in statement-list order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectrumCounters {
    pub counters: Vec<(String, Counters)>,
    pub total_failing: u32,
    pub total_passing: u32,
}

impl SpectrumCounters {
    pub fn get(&self, id: &str) -> Option<Counters> {
        self.counters.iter().find(|(s, _)| s == id).map(|(_, c)| *c)
    }
}

/// Derives spectrum counters. Coverage ids that name no statement are ignored.
pub fn compute_counters(
    coverage: &[CoverageRecord],
    statements: &[StatementRecord],
) -> Result<SpectrumCounters, SbflError> {
    if coverage.is_empty() {
        return Err(SbflError::NoTests);
    }
    let mut hits: HashMap<&str, (u32, u32)> = HashMap::new();
    let (mut failing, mut passing) = (0u32, 0u32);
    for rec in coverage {
        let fail = rec.outcome == Outcome::Fail;
        if fail {
            failing += 1;
        } else {
            passing += 1;
        }
        for id in &rec.covered {
            let h = hits.entry(id.as_str()).or_default();
            if fail {
                h.0 += 1;
            } else {
                h.1 += 1;
            }
        }
    }
    let counters = statements
        .iter()
        .map(|s| {
            let (e_f, e_p) = hits.get(s.statement_id.as_str()).copied().unwrap_or((0, 0));
            (
                s.statement_id.clone(),
                Counters::new(e_f, failing - e_f, e_p, passing - e_p),
            )
        })
        .collect();
    Ok(SpectrumCounters {
        counters,
        total_failing: failing,
        total_passing: passing,
    })
}

/// `e_f / sqrt((e_f + n_f)(e_f + e_p))`, or 0 when no failing test covers the statement.
pub fn ochiai_score(c: Counters) -> f64 {
    if c.e_f == 0 {
        return 0.0;
    }
    let e_f = c.e_f as f64;
    e_f / ((e_f + c.n_f as f64) * (e_f + c.e_p as f64)).sqrt()
}

/// Statements with a positive Ochiai score, best first. Equal scores keep
/// canonical statement order (file, line, ordinal).
pub fn rank_sbfl(bundle: &DefectBundle) -> Result<RankedList, SbflError> {
    let report = validate_bundle(bundle, Mode::Sbfl);
    if !report.runnable {
        return Err(SbflError::NotRunnable(report.reasons.join("; ")));
    }
    let spectrum = compute_counters(&bundle.coverage, &bundle.statements)?;
    let order = bundle.statement_order();
    let mut scored: Vec<(String, f64)> = spectrum
        .counters
        .into_iter()
        .map(|(id, c)| (id, ochiai_score(c)))
        .filter(|(_, s)| *s > 0.0)
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| order.position(&a.0).cmp(&order.position(&b.0)))
    });
    Ok(RankedList::from_scored(scored).expect("statement ids are unique"))
}
