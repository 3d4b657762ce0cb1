//! The `unfun` command: corpus ingestion, the game server, analysis reports
//! and pair export/import. Reports and exports always go to files; stdout
//! carries one summary line per command.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use unfun_core::analysis::{write_reports, AnalysisOptions, OppositionTaxonomy, PairAnnotation, ReportKind};
use unfun_core::records::Origin;
use unfun_server::Config;
use unfun_store::{FieldMap, ImportReport, Store};

#[derive(Debug, Parser)]
#[command(name = "unfun", version, about = "Satirical headline game: ingest, serve, analyze, export")]
pub struct Cli {
    /// SQLite database. Defaults to the config file's `server.database`.
    #[arg(long, global = true, value_name = "PATH")]
    pub db: Option<PathBuf>,

    /// Service configuration (TOML), shared with `serve`.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a JSONL corpus of serious or satirical headlines.
    Ingest(IngestArgs),
    /// Run the game server until interrupted.
    Serve,
    /// Compute analysis reports into a directory.
    Analyze(AnalyzeArgs),
    /// Write every (original, modified) pair as JSONL.
    Export {
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Load pairs from a pair export.
    ImportPairs {
        #[arg(long, value_name = "FILE")]
        path: PathBuf,
        #[arg(long = "map", value_name = "SRC=DST", value_parser = parse_mapping)]
        map: Vec<(String, String)>,
    },
    /// Attach semantic annotations (JSONL, one per pair) to stored pairs.
    Annotate {
        #[arg(long, value_name = "FILE")]
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OriginArg {
    Satirical,
    Serious,
}

impl From<OriginArg> for Origin {
    fn from(o: OriginArg) -> Self {
        match o {
            OriginArg::Satirical => Origin::Satirical,
            OriginArg::Serious => Origin::Serious,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[arg(long, value_name = "FILE")]
    pub path: PathBuf,
    #[arg(long, value_enum)]
    pub origin: OriginArg,
    /// Rename a source field, e.g. `--map headline=text`. Repeatable.
    #[arg(long = "map", value_name = "SRC=DST", value_parser = parse_mapping)]
    pub map: Vec<(String, String)>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Reports to compute, comma separated or repeated; `all` for every one.
    #[arg(long, value_delimiter = ',', required = true, value_parser = parse_report)]
    pub report: Vec<ReportSelection>,
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    /// Annotations to use instead of the stored ones.
    #[arg(long, value_name = "FILE")]
    pub annotations: Option<PathBuf>,
    #[arg(long, default_value_t = unfun_core::analysis::DEFAULT_SEED)]
    pub seed: u64,
    /// Bootstrap resamples for confidence intervals.
    #[arg(long, default_value_t = unfun_core::analysis::DEFAULT_RESAMPLES)]
    pub resamples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportSelection {
    All,
    One(ReportKind),
}

fn parse_report(s: &str) -> Result<ReportSelection, String> {
    if s == "all" {
        return Ok(ReportSelection::All);
    }
    s.parse().map(ReportSelection::One).map_err(|_| {
        let names: Vec<&str> = ReportKind::ALL.iter().map(|k| k.as_str()).collect();
        format!("unknown report `{s}`; expected all or one of {}", names.join(", "))
    })
}

fn parse_mapping(s: &str) -> Result<(String, String), String> {
    match s.split_once('=') {
        Some((from, to)) if !from.is_empty() && !to.is_empty() => Ok((from.to_string(), to.to_string())),
        _ => Err(format!("expected SRC=DST, got `{s}`")),
    }
}

fn field_map(pairs: &[(String, String)]) -> FieldMap {
    FieldMap(pairs.iter().cloned().collect::<BTreeMap<_, _>>())
}

pub fn selected_kinds(selection: &[ReportSelection]) -> Vec<ReportKind> {
    if selection.contains(&ReportSelection::All) {
        return ReportKind::ALL.to_vec();
    }
    let mut kinds: Vec<ReportKind> = selection
        .iter()
        .filter_map(|s| match s {
            ReportSelection::One(k) => Some(*k),
            ReportSelection::All => None,
        })
        .collect();
    kinds.sort();
    kinds.dedup();
    kinds
}

/// What a finished command reports back.
#[derive(Debug, Default)]
pub struct Outcome {
    /// The stdout summary line.
    pub summary: String,
    /// Problems that did not stop the command, printed to stderr. Any of
    /// them makes the exit code nonzero.
    pub problems: Vec<String>,
}

impl Outcome {
    fn ok(summary: impl Into<String>) -> Self {
        Outcome {
            summary: summary.into(),
            problems: Vec::new(),
        }
    }

    fn from_import(report: &ImportReport) -> Self {
        let mut summary = format!("inserted: {}", report.inserted);
        if report.duplicates > 0 {
            summary.push_str(&format!(" (duplicates: {})", report.duplicates));
        }
        Outcome {
            summary,
            problems: report
                .errors
                .iter()
                .map(|e| format!("line {}: {}", e.line, e.message))
                .collect(),
        }
    }
}

impl Cli {
    fn config(&self) -> anyhow::Result<Config> {
        match &self.config {
            Some(path) => Ok(Config::load(path)?),
            None => {
                let mut config = Config::default();
                config.apply_env(|k| std::env::var(k).ok())?;
                config.validate()?;
                Ok(config)
            }
        }
    }

    fn database(&self, config: &Config) -> PathBuf {
        self.db.clone().unwrap_or_else(|| config.server.database.clone())
    }

    fn open_store(&self) -> anyhow::Result<Store> {
        let path = self.database(&self.config()?);
        Store::open(&path).with_context(|| format!("cannot open database {}", path.display()))
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::Ingest(args) => ingest(cli, args),
        Command::Serve => serve(cli),
        Command::Analyze(args) => analyze(cli, args),
        Command::Export { out } => {
            let store = cli.open_store()?;
            let n = store
                .export_pairs_to_path(out)
                .with_context(|| format!("cannot write {}", out.display()))?;
            Ok(Outcome::ok(format!("exported: {n} pairs to {}", out.display())))
        }
        Command::ImportPairs { path, map } => {
            ensure_file(path)?;
            let report = cli.open_store()?.import_pairs(path, &field_map(map))?;
            Ok(Outcome::from_import(&report))
        }
        Command::Annotate { path } => {
            ensure_file(path)?;
            let report = cli
                .open_store()?
                .import_annotations(path, &OppositionTaxonomy::default())?;
            Ok(Outcome::from_import(&report))
        }
    }
}

fn ensure_file(path: &Path) -> anyhow::Result<()> {
    if !path.is_file() {
        bail!("no such file: {}", path.display());
    }
    Ok(())
}

fn ingest(cli: &Cli, args: &IngestArgs) -> anyhow::Result<Outcome> {
    ensure_file(&args.path)?;
    let store = cli.open_store()?;
    let report = store
        .import_corpus(&args.path, args.origin.into(), &field_map(&args.map))
        .with_context(|| format!("cannot ingest {}", args.path.display()))?;
    Ok(Outcome::from_import(&report))
}

fn serve(cli: &Cli) -> anyhow::Result<Outcome> {
    let mut config = cli.config()?;
    config.server.database = cli.database(&config);
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(unfun_server::serve(config, unfun_server::shutdown_signal()))?;
    Ok(Outcome::ok("server stopped"))
}

fn read_annotations(path: &Path, taxonomy: &OppositionTaxonomy) -> anyhow::Result<Vec<PairAnnotation>> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let annotation: PairAnnotation =
            serde_json::from_str(line).with_context(|| format!("{}:{}", path.display(), i + 1))?;
        taxonomy
            .validate(&annotation)
            .with_context(|| format!("{}:{}", path.display(), i + 1))?;
        out.push(annotation);
    }
    Ok(out)
}

fn analyze(cli: &Cli, args: &AnalyzeArgs) -> anyhow::Result<Outcome> {
    let kinds = selected_kinds(&args.report);
    let store = cli.open_store()?;
    let counts = store.counts()?;
    if counts.headlines() == 0 {
        bail!("the store is empty; ingest corpora and collect pairs first");
    }
    let taxonomy = OppositionTaxonomy::default();
    let annotations = match &args.annotations {
        Some(path) => Some(read_annotations(path, &taxonomy)?),
        None => None,
    };
    let input = store.analysis_input(annotations, taxonomy)?;
    let opts = AnalysisOptions {
        seed: args.seed,
        resamples: args.resamples,
    };
    let written = write_reports(&input, &kinds, &opts, &args.out)?;
    let names: Vec<&str> = kinds.iter().map(|k| k.as_str()).collect();
    Ok(Outcome::ok(format!(
        "wrote {} files to {} ({}; {} pairs, {} successful)",
        written.len(),
        args.out.display(),
        names.join(", "),
        input.pairs.len(),
        input.successful_pairs().len()
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn report_selection() {
        let cli = Cli::try_parse_from(["unfun", "analyze", "--report", "lift,edit-dist", "--report", "lift", "--out", "o"])
            .unwrap();
        let Command::Analyze(args) = cli.command else { panic!() };
        assert_eq!(selected_kinds(&args.report), [ReportKind::EditDist, ReportKind::Lift]);
        assert_eq!(selected_kinds(&[ReportSelection::All]), ReportKind::ALL.to_vec());
        assert!(Cli::try_parse_from(["unfun", "analyze", "--report", "jokes", "--out", "o"]).is_err());
        assert!(Cli::try_parse_from(["unfun", "analyze", "--out", "o"]).is_err());
    }

    #[test]
    fn mappings_and_globals() {
        let cli = Cli::try_parse_from([
            "unfun", "ingest", "--path", "x.jsonl", "--origin", "serious", "--map", "headline=text", "--db", "a.db",
        ])
        .unwrap();
        assert_eq!(cli.db.as_deref(), Some(Path::new("a.db")));
        let Command::Ingest(args) = cli.command else { panic!() };
        assert_eq!(args.origin, OriginArg::Serious);
        assert_eq!(field_map(&args.map).0["headline"], "text");
        assert!(parse_mapping("headline").is_err());
        assert!(parse_mapping("=text").is_err());
    }

    #[test]
    fn db_flag_overrides_config() {
        let cli = Cli::try_parse_from(["unfun", "--db", "x.db", "serve"]).unwrap();
        let config = Config::default();
        assert_eq!(cli.database(&config), PathBuf::from("x.db"));
        let cli = Cli::try_parse_from(["unfun", "serve"]).unwrap();
        assert_eq!(cli.database(&config), config.server.database);
    }
}
