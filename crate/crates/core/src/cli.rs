//! The `flrank` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 bundle not runnable
//! for the requested technique.

use crate::blues::{extract_statements, run_blues, BluesError, BluesOptions};
use crate::corpus::{load_corpus, load_defect_bundle, CorpusError, StatementRecord};
use crate::evalkit::{evaluate_corpus, Cutoff, EvalError, EvalOptions, Technique};
use crate::rafl::{ce_aggregate, sbir_localize_with, AggregationConfig, Distance, RaflError, SbirOptions};
use crate::ranked::{RankedList, RankedListError};
use crate::sbfl::{rank_sbfl, SbflError};
use crate::textkit::{Bm25Params, Bm25Scorer, TextError, Tokenizer};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use walkdir::WalkDir;

/// Tool version followed by the on-disk format version.
pub const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (format 1)");

#[derive(Debug, Parser)]
#[command(name = "flrank", version = VERSION, about = "Statement-level fault localization")]
struct Cli {
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Log filter, e.g. `warn`, `info`, `flrank=debug`.
    #[arg(long, global = true, value_name = "FILTER", default_value = "warn")]
    log_level: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract statement records from Java sources.
    Extract {
        /// Source root; file paths are recorded relative to it.
        #[arg(long, value_name = "DIR")]
        src: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Rank a bundle's statements by Ochiai suspiciousness.
    Sbfl {
        #[arg(long, value_name = "DIR")]
        bundle: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Rank a bundle's statements against its bug report.
    Blues {
        #[arg(long, value_name = "DIR")]
        bundle: PathBuf,
        /// Where the ensemble list goes.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Directory for one list per ranker configuration.
        #[arg(long, value_name = "DIR")]
        configs_dir: Option<PathBuf>,
        #[command(flatten)]
        text: TextArgs,
    },
    /// Aggregate ranked-list files into one list.
    Rafl {
        /// Ranked-list JSON files (at least two).
        #[arg(required = true, num_args = 2.., value_name = "LIST")]
        lists: Vec<PathBuf>,
        /// One weight per list, comma separated (default: all 1).
        #[arg(long, value_delimiter = ',', value_name = "W,...")]
        weights: Option<Vec<f64>>,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Where to write the optimizer run log.
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
        #[command(flatten)]
        ce: CeArgs,
    },
    /// Fuse the SBFL and bug-report rankings of a bundle.
    Sbir {
        #[arg(long, value_name = "DIR")]
        bundle: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        #[arg(long, value_name = "FILE")]
        log: Option<PathBuf>,
        #[command(flatten)]
        ce: CeArgs,
        #[command(flatten)]
        text: TextArgs,
    },
    /// Evaluate every technique on a corpus directory of bundles.
    Eval {
        #[arg(long, value_name = "DIR")]
        corpus: PathBuf,
        /// Report JSON destination; the table then goes to stdout.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also write the text table here.
        #[arg(long, value_name = "FILE")]
        table: Option<PathBuf>,
        /// List-size cutoffs, comma separated (default 1,25,50,100,all).
        #[arg(long, value_delimiter = ',', value_name = "K,...")]
        k: Option<Vec<Cutoff>>,
        /// Add a row scoring each defect by its best Blues configuration.
        #[arg(long)]
        union: bool,
        #[command(flatten)]
        tuning: CeTuning,
        #[command(flatten)]
        text: TextArgs,
    },
}

#[derive(Debug, Args)]
struct TextArgs {
    #[arg(long)]
    k1: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Stopword list file (whitespace separated, `#` comments).
    #[arg(long, value_name = "FILE")]
    stopwords: Option<PathBuf>,
    /// Number of top files whose statements are ranked.
    #[arg(long, value_name = "N")]
    top_files: Option<usize>,
}

#[derive(Debug, Args)]
struct CeArgs {
    /// Length of the aggregate list.
    #[arg(long)]
    k: Option<usize>,
    #[command(flatten)]
    tuning: CeTuning,
}

#[derive(Debug, Args)]
struct CeTuning {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    distance: Option<Distance>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    conv_in: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    /// Samples per iteration (default 10 n k).
    #[arg(long)]
    samples: Option<usize>,
}

/// Settings file layout.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    aggregation: AggregationConfig,
    bm25: Option<Bm25Params>,
    blues: BluesSection,
    eval: EvalSection,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct BluesSection {
    top_files: Option<usize>,
    stopwords: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct EvalSection {
    cutoffs: Option<Vec<Cutoff>>,
    union: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
    NotRunnable(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::NotRunnable(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Data(m) | Failure::NotRunnable(m) => m,
        }
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<RankedListError> for Failure {
    fn from(e: RankedListError) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<TextError> for Failure {
    fn from(e: TextError) -> Self {
        match e {
            TextError::InvalidParams { .. } => Failure::Usage(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<SbflError> for Failure {
    fn from(e: SbflError) -> Self {
        match e {
            SbflError::NotRunnable(_) => Failure::NotRunnable(e.to_string()),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<BluesError> for Failure {
    fn from(e: BluesError) -> Self {
        match e {
            BluesError::NotRunnable(_) => Failure::NotRunnable(e.to_string()),
            BluesError::Text(t) => t.into(),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<RaflError> for Failure {
    fn from(e: RaflError) -> Self {
        match e {
            RaflError::NotRunnable(_) => Failure::NotRunnable(e.to_string()),
            RaflError::Sbfl(s) => s.into(),
            RaflError::Blues(b) => b.into(),
            RaflError::InvalidConfig(_) | RaflError::ArityMismatch { .. } | RaflError::InvalidWeights => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        Failure::Data(e.to_string())
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run_command`] with explicit output streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    1
                }
            };
        }
    };
    let _ = env_logger::Builder::new().parse_filters(&cli.log_level).try_init();
    match execute(cli, out) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "flrank: {}", f.message());
            f.code()
        }
    }
}

fn load_config(path: Option<&Path>) -> Result<FileConfig, Failure> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    toml::from_str(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn blues_options(file: &FileConfig, args: &TextArgs) -> Result<BluesOptions, Failure> {
    let mut params = file.bm25.unwrap_or_default();
    params.k1 = args.k1.unwrap_or(params.k1);
    params.b = args.b.unwrap_or(params.b);
    let params = Bm25Params::new(params.k1, params.b)?;
    let tokenizer = match args.stopwords.as_ref().or(file.blues.stopwords.as_ref()) {
        Some(p) => Tokenizer::with_stopword_list(&fs::read_to_string(p).map_err(|e| io_failure(p, e))?),
        None => Tokenizer::default(),
    };
    let top_files = args
        .top_files
        .or(file.blues.top_files)
        .unwrap_or(crate::blues::DEFAULT_TOP_FILES);
    if top_files == 0 {
        return Err(Failure::Usage("--top-files must be at least 1".into()));
    }
    Ok(BluesOptions {
        scorer: Bm25Scorer::new(params),
        tokenizer,
        top_files,
    })
}

fn aggregation(file: &FileConfig, k: Option<usize>, t: &CeTuning) -> Result<AggregationConfig, Failure> {
    let mut cfg = file.aggregation.clone();
    cfg.k = k.unwrap_or(cfg.k);
    cfg.seed = t.seed.unwrap_or(cfg.seed);
    cfg.distance = t.distance.unwrap_or(cfg.distance);
    cfg.max_iter = t.max_iter.unwrap_or(cfg.max_iter);
    cfg.conv_in = t.conv_in.unwrap_or(cfg.conv_in);
    cfg.rho = t.rho.or(cfg.rho);
    cfg.samples = t.samples.or(cfg.samples);
    cfg.validate()?;
    Ok(cfg)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            }
            fs::write(p, text).map_err(|e| io_failure(p, e))
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Data(format!("stdout: {e}"))),
    }
}

/// Writes `list` as ranked-list JSON to `path`, or to `out` without a path.
fn emit_ranked_list(list: &RankedList, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    emit(&list.to_json(), path, out)
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Failure> {
    let file = load_config(cli.config.as_deref())?;
    match cli.command {
        Command::Extract { src, out: dest } => {
            let records = extract_tree(&src)?;
            let mut text = String::new();
            for r in &records {
                text.push_str(&serde_json::to_string(r).expect("record serializes"));
                text.push('\n');
            }
            emit(&text, dest.as_deref(), out)
        }
        Command::Sbfl { bundle, out: dest } => {
            let b = load_defect_bundle(&bundle)?;
            emit_ranked_list(&rank_sbfl(&b)?, dest.as_deref(), out)
        }
        Command::Blues {
            bundle,
            out: dest,
            configs_dir,
            text,
        } => {
            let opts = blues_options(&file, &text)?;
            let b = load_defect_bundle(&bundle)?;
            let run = run_blues(&b, &opts)?;
            if let Some(dir) = configs_dir {
                for (cfg, list) in &run.configs {
                    let p = dir.join(format!("{}.json", cfg.name()));
                    emit_ranked_list(list, Some(&p), out)?;
                }
            }
            emit_ranked_list(&run.ensemble, dest.as_deref(), out)
        }
        Command::Rafl {
            lists,
            weights,
            out: dest,
            log,
            ce,
        } => {
            let cfg = aggregation(&file, ce.k, &ce.tuning)?;
            let inputs = lists
                .iter()
                .map(|p| RankedList::read_json(p).map(|l| l.items().map(str::to_string).collect::<Vec<_>>()))
                .collect::<Result<Vec<_>, _>>()?;
            let weights = weights.unwrap_or_else(|| vec![1.0; inputs.len()]);
            let outcome = ce_aggregate(&inputs, &weights, &cfg)?;
            if let Some(p) = log {
                emit(&json(&outcome.log), Some(&p), out)?;
            }
            let list = RankedList::from_order(&outcome.items).expect("aggregate items are distinct");
            emit_ranked_list(&list, dest.as_deref(), out)
        }
        Command::Sbir {
            bundle,
            out: dest,
            log,
            ce,
            text,
        } => {
            let opts = SbirOptions {
                blues: blues_options(&file, &text)?,
                aggregation: aggregation(&file, ce.k, &ce.tuning)?,
            };
            let b = load_defect_bundle(&bundle)?;
            let run = sbir_localize_with(&b, &opts)?;
            if let Some(p) = log {
                emit(&json(&run.outcome.log), Some(&p), out)?;
            }
            emit_ranked_list(&run.ranked, dest.as_deref(), out)
        }
        Command::Eval {
            corpus,
            out: dest,
            table,
            k,
            union,
            tuning,
            text,
        } => {
            let blues = blues_options(&file, &text)?;
            let techniques = Technique::standard(blues.top_files);
            let opts = EvalOptions {
                blues,
                aggregation: aggregation(&file, None, &tuning)?,
                cutoffs: k
                    .or_else(|| file.eval.cutoffs.clone())
                    .unwrap_or_else(|| Cutoff::STANDARD.to_vec()),
                union_mode: union || file.eval.union,
            };
            let bundles = load_corpus(&corpus)?;
            let report = evaluate_corpus(&bundles, &techniques, &opts)?;
            let rendered = report.to_table();
            if let Some(p) = table {
                emit(&rendered, Some(&p), out)?;
            }
            emit(&report.to_json(), dest.as_deref(), out)?;
            if dest.is_some() {
                emit(&rendered, None, out)?;
            }
            Ok(())
        }
    }
}

/// Extracts every `.java` file below `root`, in path order.
fn extract_tree(root: &Path) -> Result<Vec<StatementRecord>, Failure> {
    if !root.is_dir() {
        return Err(Failure::Data(format!("{}: not a directory", root.display())));
    }
    let mut files: Vec<PathBuf> = WalkDir::new(root)
        .into_iter()
        .filter_map(Result::ok)
        .filter(|e| e.file_type().is_file() && e.path().extension().is_some_and(|x| x == "java"))
        .map(|e| e.into_path())
        .collect();
    files.sort();
    let mut records = Vec::new();
    for path in files {
        let rel = path.strip_prefix(root).unwrap_or(&path);
        let name = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        let src = fs::read_to_string(&path).map_err(|e| io_failure(&path, e))?;
        let ex = extract_statements(&name, &src);
        for d in &ex.diagnostics {
            log::warn!("{}:{}: {}", d.file_path, d.line, d.message);
        }
        records.extend(ex.statements);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("flrank").chain(args.iter().copied());
        let code = run_with(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn version_names_format() {
        let (code, out, _) = run(&["--version"]);
        assert_eq!(code, 0);
        assert!(out.contains(&format!("format {}", crate::FORMAT_VERSION)), "{out}");
    }

    #[test]
    fn unknown_flag_is_usage_error() {
        let (code, _, err) = run(&["sbfl", "--bundle", "x", "--frobnicate"]);
        assert_eq!(code, 1);
        assert!(err.contains("Usage"), "{err}");
    }

    #[test]
    fn missing_bundle_is_data_error() {
        let (code, _, err) = run(&["sbfl", "--bundle", "/nonexistent/bundle"]);
        assert_eq!(code, 2);
        assert!(err.starts_with("flrank: "));
    }

    #[test]
    fn rafl_needs_two_lists() {
        assert_eq!(run(&["rafl", "one.json"]).0, 1);
    }

    #[test]
    fn bad_rho_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.json");
        RankedList::from_order(["x", "y"]).unwrap().write_json(&a).unwrap();
        let a = a.to_str().unwrap();
        assert_eq!(run(&["rafl", a, a, "--rho", "2"]).0, 1);
        let (code, out, _) = run(&["rafl", a, a, "--k", "1"]);
        assert_eq!(code, 0);
        assert_eq!(RankedList::from_json(&out).unwrap().items().collect::<Vec<_>>(), ["x"]);
    }

    #[test]
    fn config_file_sections() {
        let cfg: FileConfig = toml::from_str(
            "[aggregation]\nseed = 7\n[bm25]\nk1 = 2.0\nb = 0.5\n[blues]\ntop_files = 3\n[eval]\ncutoffs = [\"1\", \"all\"]\nunion = true\n",
        )
        .unwrap();
        assert_eq!(cfg.aggregation.seed, 7);
        assert_eq!(cfg.blues.top_files, Some(3));
        assert_eq!(cfg.eval.cutoffs, Some(vec![Cutoff::Top(1), Cutoff::All]));
        assert!(toml::from_str::<FileConfig>("[nope]\n").is_err());
    }
}
