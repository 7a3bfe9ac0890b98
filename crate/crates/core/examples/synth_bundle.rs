//! Builds defect bundles from hand-written fixture descriptions.
//!
//! Each argument is a directory holding `src/` (Java sources),
//! `bug_report.json` and `fixture.toml`:
//!
//! ```toml
//! defect_id = "calc-1"
//! project = "calc"
//! buggy = ["Calculator.java:14"]
//!
//! [[tests]]
//! id = "CalculatorTest.testDivide"
//! outcome = "fail"
//! covers = ["Calculator.java:10-20", "Util.java"]
//! ```
//!
//! A test covers every statement starting inside one of its line ranges (a
//! bare file name covers the whole file). Ground truth is every statement
//! starting on a buggy line. The program writes `manifest.json`,
//! `statements.jsonl`, `coverage.jsonl` and `ground_truth.json`.
//!
//! Usage: `cargo run -p flrank --example synth_bundle -- <dir>...`

use flrank::blues::extract_statements;
use flrank::corpus::{load_defect_bundle, CoverageRecord, GroundTruth, Outcome, StatementRecord};
use serde::Deserialize;
use std::collections::BTreeSet;
use std::error::Error;
use std::fs;
use std::path::Path;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Fixture {
    defect_id: String,
    project: String,
    buggy: Vec<String>,
    tests: Vec<TestSpec>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TestSpec {
    id: String,
    outcome: Outcome,
    covers: Vec<String>,
}

struct Span {
    file: String,
    lines: Option<(u32, u32)>,
}

fn parse_span(s: &str) -> Result<Span, Box<dyn Error>> {
    let Some((file, range)) = s.split_once(':') else {
        return Ok(Span {
            file: s.to_string(),
            lines: None,
        });
    };
    let (a, b) = range.split_once('-').unwrap_or((range, range));
    Ok(Span {
        file: file.to_string(),
        lines: Some((a.parse()?, b.parse()?)),
    })
}

impl Span {
    fn contains(&self, s: &StatementRecord) -> bool {
        s.file_path == self.file && self.lines.is_none_or(|(a, b)| (a..=b).contains(&s.start_line))
    }
}

fn java_files(root: &Path, rel: &str, out: &mut Vec<String>) -> Result<(), Box<dyn Error>> {
    let mut entries: Vec<_> = fs::read_dir(root.join(rel))?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for e in entries {
        let name = e.file_name().to_string_lossy().into_owned();
        let child = if rel.is_empty() {
            name.clone()
        } else {
            format!("{rel}/{name}")
        };
        if e.file_type()?.is_dir() {
            java_files(root, &child, out)?;
        } else if name.ends_with(".java") {
            out.push(child);
        }
    }
    Ok(())
}

fn jsonl<T: serde::Serialize>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| serde_json::to_string(i).expect("serializable") + "\n")
        .collect()
}

fn build(dir: &Path) -> Result<(), Box<dyn Error>> {
    let fixture: Fixture = toml::from_str(&fs::read_to_string(dir.join("fixture.toml"))?)?;
    let src = dir.join("src");
    let mut files = Vec::new();
    java_files(&src, "", &mut files)?;

    let mut statements = Vec::new();
    for f in &files {
        let ex = extract_statements(f, &fs::read_to_string(src.join(f))?);
        if let Some(d) = ex.diagnostics.first() {
            return Err(format!("{}:{}: {}", d.file_path, d.line, d.message).into());
        }
        statements.extend(ex.statements);
    }

    let mut coverage = Vec::new();
    for t in &fixture.tests {
        let spans = t.covers.iter().map(|c| parse_span(c)).collect::<Result<Vec<_>, _>>()?;
        for sp in &spans {
            if !files.contains(&sp.file) {
                return Err(format!("{}: test {} covers unknown file {}", fixture.defect_id, t.id, sp.file).into());
            }
        }
        let covered: BTreeSet<String> = statements
            .iter()
            .filter(|s| spans.iter().any(|sp| sp.contains(s)))
            .map(|s| s.statement_id.clone())
            .collect();
        coverage.push(CoverageRecord {
            test_id: t.id.clone(),
            outcome: t.outcome,
            covered,
        });
    }

    let mut buggy = Vec::new();
    for b in &fixture.buggy {
        let span = parse_span(b)?;
        let hits: Vec<&StatementRecord> = statements.iter().filter(|s| span.contains(s)).collect();
        if hits.is_empty() {
            return Err(format!("{}: buggy location {b} has no statement", fixture.defect_id).into());
        }
        buggy.extend(hits.iter().map(|s| s.statement_id.clone()));
    }

    let manifest = serde_json::json!({
        "defect_id": fixture.defect_id,
        "project": fixture.project,
        "paths": { "sources": "src" },
    });
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)? + "\n",
    )?;
    fs::write(dir.join("statements.jsonl"), jsonl(&statements))?;
    fs::write(dir.join("coverage.jsonl"), jsonl(&coverage))?;
    fs::write(
        dir.join("ground_truth.json"),
        serde_json::to_string_pretty(&GroundTruth::new(buggy))? + "\n",
    )?;

    // Round-trip through the loader so a broken fixture fails here.
    let bundle = load_defect_bundle(dir)?;
    println!(
        "{}: {} statements, {} tests, {} buggy",
        bundle.defect_id,
        bundle.statements.len(),
        bundle.coverage.len(),
        bundle.ground_truth.map_or(0, |g| g.buggy_statements.len())
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    let dirs: Vec<String> = std::env::args().skip(1).collect();
    if dirs.is_empty() {
        return Err("usage: synth_bundle <fixture-dir>...".into());
    }
    for d in dirs {
        build(Path::new(&d)).map_err(|e| format!("{d}: {e}"))?;
    }
    Ok(())
}
