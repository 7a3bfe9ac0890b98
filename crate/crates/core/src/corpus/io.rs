use super::{BugReport, CorpusError, CoverageRecord, DefectBundle, GroundTruth, KindCatalog, StatementRecord};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use walkdir::WalkDir;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub defect_id: String,
    #[serde(default)]
    pub project: String,
    #[serde(default)]
    pub paths: ManifestPaths,
}

/// File names inside the bundle directory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ManifestPaths {
    pub statements: String,
    pub bug_report: String,
    pub coverage: String,
    pub ground_truth: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sources: Option<String>,
}

impl Default for ManifestPaths {
    fn default() -> Self {
        Self {
            statements: "statements.jsonl".into(),
            bug_report: "bug_report.json".into(),
            coverage: "coverage.jsonl".into(),
            ground_truth: "ground_truth.json".into(),
            sources: None,
        }
    }
}

/// Loads bundles against a kind catalog.
#[derive(Debug, Clone, Default)]
pub struct BundleLoader {
    catalog: KindCatalog,
}

impl BundleLoader {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_catalog(catalog: KindCatalog) -> Self {
        Self { catalog }
    }

    pub fn catalog(&self) -> &KindCatalog {
        &self.catalog
    }

    pub fn load(&self, dir: &Path) -> Result<DefectBundle, CorpusError> {
        let manifest: Manifest = read_json(&require(dir, "manifest.json")?)?;
        let paths = &manifest.paths;

        let statements: Vec<StatementRecord> = read_jsonl(&require(dir, &paths.statements)?)?;
        let bug_report: BugReport = read_json(&require(dir, &paths.bug_report)?)?;
        let coverage: Vec<CoverageRecord> = read_jsonl(&require(dir, &paths.coverage)?)?;

        let gt_path = dir.join(&paths.ground_truth);
        let ground_truth: Option<GroundTruth> = if gt_path.is_file() {
            Some(read_json(&gt_path)?)
        } else {
            None
        };

        let file_texts = match &paths.sources {
            Some(src) => Some(read_sources(&require(dir, src)?)?),
            None => None,
        };

        let bundle = DefectBundle {
            defect_id: manifest.defect_id,
            project: manifest.project,
            statements,
            bug_report,
            coverage,
            ground_truth,
            file_texts,
        };
        bundle.check(&self.catalog)?;
        Ok(bundle)
    }

    /// Loads every immediate subdirectory of `root` that holds a
    /// `manifest.json`, sorted by defect id.
    pub fn load_corpus(&self, root: &Path) -> Result<Vec<DefectBundle>, CorpusError> {
        let entries = fs::read_dir(root).map_err(|source| CorpusError::Io {
            path: root.to_path_buf(),
            source,
        })?;
        let mut dirs: Vec<PathBuf> = entries
            .filter_map(Result::ok)
            .map(|e| e.path())
            .filter(|p| p.join("manifest.json").is_file())
            .collect();
        dirs.sort();
        let mut bundles = dirs.iter().map(|d| self.load(d)).collect::<Result<Vec<_>, _>>()?;
        bundles.sort_by(|a, b| a.defect_id.cmp(&b.defect_id));
        Ok(bundles)
    }
}

/// Loads and validates a bundle directory with the default kind catalog.
pub fn load_defect_bundle(dir: &Path) -> Result<DefectBundle, CorpusError> {
    BundleLoader::new().load(dir)
}

/// Loads a corpus directory with the default kind catalog.
pub fn load_corpus(root: &Path) -> Result<Vec<DefectBundle>, CorpusError> {
    BundleLoader::new().load_corpus(root)
}

/// Writes `bundle` in the directory layout [`load_defect_bundle`] reads.
pub fn write_defect_bundle(bundle: &DefectBundle, dir: &Path) -> Result<(), CorpusError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| CorpusError::Io { path, source }
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let mut paths = ManifestPaths::default();
    if bundle.file_texts.is_some() {
        paths.sources = Some("src".into());
    }
    let manifest = Manifest {
        defect_id: bundle.defect_id.clone(),
        project: bundle.project.clone(),
        paths: paths.clone(),
    };

    let write = |name: &str, text: String| -> Result<(), CorpusError> {
        let p = dir.join(name);
        fs::write(&p, text).map_err(io_err(&p))
    };
    write("manifest.json", pretty(&manifest))?;
    write(&paths.statements, jsonl(&bundle.statements))?;
    write(&paths.bug_report, pretty(&bundle.bug_report))?;
    write(&paths.coverage, jsonl(&bundle.coverage))?;
    if let Some(gt) = &bundle.ground_truth {
        write(&paths.ground_truth, pretty(gt))?;
    }
    if let (Some(texts), Some(src)) = (&bundle.file_texts, &paths.sources) {
        for (rel, text) in texts {
            let p = dir.join(src).join(rel);
            if let Some(parent) = p.parent() {
                fs::create_dir_all(parent).map_err(io_err(parent))?;
            }
            fs::write(&p, text).map_err(io_err(&p))?;
        }
    }
    Ok(())
}

fn pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("bundle records serialize");
    s.push('\n');
    s
}

fn jsonl<T: Serialize>(records: &[T]) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("bundle records serialize"));
        out.push('\n');
    }
    out
}

fn require(dir: &Path, name: &str) -> Result<PathBuf, CorpusError> {
    let p = dir.join(name);
    if p.exists() {
        Ok(p)
    } else {
        Err(CorpusError::MissingFile(p))
    }
}

fn read_text(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CorpusError> {
    serde_json::from_str(&read_text(path)?).map_err(|e| CorpusError::Parse {
        file: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CorpusError> {
    let text = read_text(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(line).map_err(|e| CorpusError::Parse {
            file: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    Ok(out)
}

fn read_sources(root: &Path) -> Result<BTreeMap<String, String>, CorpusError> {
    let mut texts = BTreeMap::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| CorpusError::Io {
            path: root.to_path_buf(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry
            .path()
            .strip_prefix(root)
            .expect("walkdir yields paths under its root")
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        texts.insert(rel, read_text(entry.path())?);
    }
    Ok(texts)
}
