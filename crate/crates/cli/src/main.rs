//! `wlaudit`: fetch TU datasets, audit their 1-WL expressiveness, count
//! motifs, and compare pairs of graphs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use wlaudit_core::audit::{self, AuditOptions, AuditReport, Identifiability, LabelSelection};
use wlaudit_core::fetch::{self, FetchConfig};
use wlaudit_core::iso::{self, IsoOptions, WlTestResult, DEFAULT_ISO_BUDGET};
use wlaudit_core::motif::{self, MotifKey, MotifOptions, MotifSummary, DEFAULT_MOTIF_BUDGET, MOTIF_COLUMNS};
use wlaudit_core::wl::{self, ColorTable};
use wlaudit_core::{edgelist, tu, Dataset, Error};

#[derive(Parser, Debug)]
#[command(name = "wlaudit", version, about = "1-WL expressiveness audits for graph-classification datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Identifiable fractions, majority-vote upper bounds and unique fractions for k = 0..=K.
    Audit(AuditArgs),
    /// Identifiability and upper bound of induced graphlet counts up to four nodes.
    Motifs(MotifArgs),
    /// WL test and exact isomorphism check for two edge-list files.
    Pair(PairArgs),
}

#[derive(Args, Debug)]
struct DatasetArgs {
    /// Dataset name, e.g. MUTAG. Repeat for several datasets.
    #[arg(long = "dataset", short = 'd', required = true)]
    datasets: Vec<String>,
    /// Read `<DIR>/<NAME>/NAME_*.txt` instead of fetching.
    #[arg(long)]
    data_dir: Option<PathBuf>,
    /// Archive cache directory [env: WLAUDIT_CACHE_DIR].
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Archive base URL [env: WLAUDIT_BASE_URL].
    #[arg(long)]
    base_url: Option<String>,
    /// Download timeout in seconds.
    #[arg(long, default_value_t = 120)]
    timeout: u64,
    /// Output format on stdout.
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Also write per-dataset CSV and JSON files into this directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Process datasets concurrently.
    #[arg(long)]
    parallel: bool,
    /// Search-node budget for one exact isomorphism check.
    #[arg(long, default_value_t = DEFAULT_ISO_BUDGET, value_parser = parse_count)]
    iso_budget: u64,
    /// How identifiable fractions are counted.
    #[arg(long, value_enum, default_value_t = IdentifiabilityArg::UniqueGraphs)]
    identifiability: IdentifiabilityArg,
}

#[derive(Args, Debug)]
struct AuditArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Report rows for k = 0..=K.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Which node-label modes to report.
    #[arg(long, value_enum, default_value_t = LabelModeArg::Auto)]
    label_mode: LabelModeArg,
    /// Shorthand for `--label-mode without`.
    #[arg(long, conflicts_with = "label_mode")]
    no_node_labels: bool,
    /// Decide uniqueness without node labels even in labeled mode.
    #[arg(long)]
    unlabeled_uniqueness: bool,
}

#[derive(Args, Debug)]
struct MotifArgs {
    #[command(flatten)]
    data: DatasetArgs,
    /// Largest graphlet size to count (2, 3 or 4).
    #[arg(long, default_value_t = 4)]
    motif_size: usize,
    /// Enumerated-subgraph budget per graph; accepts `1e6`.
    #[arg(long, default_value_t = DEFAULT_MOTIF_BUDGET, value_parser = parse_count)]
    budget: u64,
    /// Part of the motif vector that identifies a graph.
    #[arg(long, value_enum, default_value_t = MotifKeyArg::Size4)]
    motif_key: MotifKeyArg,
}

#[derive(Args, Debug)]
struct PairArgs {
    graph_a: PathBuf,
    graph_b: PathBuf,
    /// Maximum number of WL iterations.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Ignore `label` lines.
    #[arg(long)]
    no_node_labels: bool,
    #[arg(long, default_value_t = DEFAULT_ISO_BUDGET, value_parser = parse_count)]
    iso_budget: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum LabelModeArg {
    Auto,
    With,
    Without,
    Both,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum IdentifiabilityArg {
    UniqueGraphs,
    IsoClasses,
    RawGraphs,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MotifKeyArg {
    Size4,
    Full,
}

impl From<IdentifiabilityArg> for Identifiability {
    fn from(a: IdentifiabilityArg) -> Self {
        match a {
            IdentifiabilityArg::UniqueGraphs => Identifiability::UniqueGraphs,
            IdentifiabilityArg::IsoClasses => Identifiability::IsoClasses,
            IdentifiabilityArg::RawGraphs => Identifiability::RawGraphs,
        }
    }
}

/// Integer or float notation (`1000000`, `1e6`).
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 && v <= u64::MAX as f64 => Ok(v as u64),
        _ => Err(format!("expected a non-negative count, got {s:?}")),
    }
}

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stage {
    Usage = 1,
    Fetch = 2,
    Parse = 3,
    Compute = 4,
    Budget = 5,
}

struct Failure {
    stage: Stage,
    message: String,
}

impl Failure {
    fn new(stage: Stage, context: &str, err: Error) -> Self {
        let stage = match err {
            Error::Timeout { .. } | Error::CountingInfeasible { .. } => Stage::Budget,
            _ => stage,
        };
        Failure {
            stage,
            message: format!("{context}: {err}"),
        }
    }
}

fn fetch_config(args: &DatasetArgs) -> FetchConfig {
    let mut cfg = FetchConfig::from_env();
    if let Some(dir) = &args.cache_dir {
        cfg.cache_dir = dir.clone();
    }
    if let Some(url) = &args.base_url {
        cfg.base_url = url.clone();
    }
    cfg.timeout = Duration::from_secs(args.timeout);
    cfg
}

fn load(name: &str, args: &DatasetArgs) -> Result<Dataset, Failure> {
    let dir = match &args.data_dir {
        Some(root) => root.join(name),
        None => fetch::fetch_dataset(&fetch_config(args), name).map_err(|e| Failure::new(Stage::Fetch, name, e))?,
    };
    tu::parse_tu_dataset(&dir, name).map_err(|e| Failure::new(Stage::Parse, name, e))
}

/// Runs `job` on every dataset, in input order, stopping at the first failure.
fn for_each_dataset<T: Send>(
    args: &DatasetArgs,
    job: impl Fn(&str) -> Result<T, Failure> + Sync,
) -> Result<Vec<T>, Failure> {
    if args.parallel {
        args.datasets.par_iter().map(|n| job(n)).collect()
    } else {
        args.datasets.iter().map(|n| job(n)).collect()
    }
}

fn write_file(path: &Path, body: &str) -> Result<(), Failure> {
    fs::write(path, body).map_err(|e| Failure {
        stage: Stage::Compute,
        message: format!("writing {}: {e}", path.display()),
    })
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure {
        stage: Stage::Compute,
        message: format!("creating {}: {e}", dir.display()),
    })
}

fn cmd_audit(args: &AuditArgs) -> Result<String, Failure> {
    let labels = if args.no_node_labels {
        LabelSelection::Without
    } else {
        match args.label_mode {
            LabelModeArg::Auto | LabelModeArg::Both => LabelSelection::Auto,
            LabelModeArg::With => LabelSelection::With,
            LabelModeArg::Without => LabelSelection::Without,
        }
    };
    let opts = AuditOptions {
        k_max: args.k,
        labels,
        identifiability: args.data.identifiability.into(),
        unlabeled_uniqueness: args.unlabeled_uniqueness,
        iso_budget: args.data.iso_budget,
    };
    let reports: Vec<AuditReport> = for_each_dataset(&args.data, |name| {
        let d = load(name, &args.data)?;
        audit::run_audit(&d, &opts).map_err(|e| Failure::new(Stage::Compute, name, e))
    })?;

    if let Some(out) = &args.data.out {
        ensure_dir(out)?;
        for r in &reports {
            write_file(&out.join(format!("{}.audit.csv", r.dataset)), &r.to_csv())?;
            write_file(&out.join(format!("{}.audit.json", r.dataset)), &r.to_json())?;
        }
    }
    for r in &reports {
        eprintln!(
            "{}: isomorphism {:.2?}, refinement {:.2?}, total {:.2?}",
            r.dataset, r.timing.isomorphism, r.timing.refinement, r.timing.total
        );
    }
    Ok(match args.data.format {
        Format::Table => reports.iter().map(AuditReport::to_table).collect(),
        Format::Csv => {
            let mut s = format!("{}\n", audit::CSV_HEADER);
            for r in &reports {
                s.push_str(&r.csv_rows());
            }
            s
        }
        Format::Json => serde_json::to_string_pretty(&reports).unwrap() + "\n",
    })
}

#[derive(serde::Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
enum MotifOutcome {
    Ok(MotifSummary),
    Skipped { dataset: String, reason: String },
}

fn cmd_motifs(args: &MotifArgs) -> Result<String, Failure> {
    let opts = MotifOptions {
        max_size: args.motif_size,
        budget: args.budget,
        key: match args.motif_key {
            MotifKeyArg::Size4 => MotifKey::Size4,
            MotifKeyArg::Full => MotifKey::Full,
        },
        identifiability: args.data.identifiability.into(),
        iso_budget: args.data.iso_budget,
    };
    if opts.key == MotifKey::Size4 && opts.max_size < 4 {
        return Err(Failure {
            stage: Stage::Usage,
            message: "--motif-key size4 needs --motif-size 4".into(),
        });
    }
    let outcomes: Vec<(MotifOutcome, Option<String>)> = for_each_dataset(&args.data, |name| {
        let d = load(name, &args.data)?;
        let vectors = match motif::motif_vectors(&d, opts.max_size, opts.budget) {
            Ok(v) => v,
            Err(e @ Error::CountingInfeasible { .. }) => {
                return Ok((
                    MotifOutcome::Skipped {
                        dataset: name.to_string(),
                        reason: format!("CountingInfeasible: {e}"),
                    },
                    None,
                ))
            }
            Err(e) => return Err(Failure::new(Stage::Compute, name, e)),
        };
        let summary = motif::motif_identifiability(&d, &opts).map_err(|e| Failure::new(Stage::Compute, name, e))?;
        Ok((MotifOutcome::Ok(summary), Some(vectors_csv(&d, &vectors))))
    })?;

    if let Some(out) = &args.data.out {
        ensure_dir(out)?;
        for (outcome, vectors) in &outcomes {
            let name = match outcome {
                MotifOutcome::Ok(s) => &s.dataset,
                MotifOutcome::Skipped { dataset, .. } => dataset,
            };
            write_file(
                &out.join(format!("{name}.motifs.json")),
                &(serde_json::to_string_pretty(outcome).unwrap() + "\n"),
            )?;
            if let Some(v) = vectors {
                write_file(&out.join(format!("{name}.motif_vectors.csv")), v)?;
            }
        }
    }

    let mut s = String::new();
    match args.data.format {
        Format::Table => {
            for (o, _) in &outcomes {
                match o {
                    MotifOutcome::Ok(m) => writeln!(
                        s,
                        "{}: identifiable {} ({} of {}), upper bound {} ({} of {})",
                        m.dataset,
                        m.identifiable_pct,
                        m.identifiable.hits,
                        m.identifiable.total,
                        m.upper_bound_pct,
                        m.upper_bound.hits,
                        m.upper_bound.total
                    ),
                    MotifOutcome::Skipped { dataset, reason } => writeln!(s, "{dataset}: skipped: {reason}"),
                }
                .unwrap();
            }
        }
        Format::Csv => {
            s.push_str("dataset,status,identifiable_pct,upper_bound_pct\n");
            for (o, _) in &outcomes {
                match o {
                    MotifOutcome::Ok(m) => writeln!(s, "{},ok,{},{}", m.dataset, m.identifiable_pct, m.upper_bound_pct),
                    MotifOutcome::Skipped { dataset, .. } => writeln!(s, "{dataset},skipped,,"),
                }
                .unwrap();
            }
        }
        Format::Json => {
            let all: Vec<&MotifOutcome> = outcomes.iter().map(|(o, _)| o).collect();
            s = serde_json::to_string_pretty(&all).unwrap() + "\n";
        }
    }
    Ok(s)
}

/// Per-graph motif columns; absent size classes are empty cells.
fn vectors_csv(d: &Dataset, vectors: &[motif::MotifVector]) -> String {
    let mut s = format!("graph,class,{}\n", MOTIF_COLUMNS.join(","));
    for (i, v) in vectors.iter().enumerate() {
        let cells: Vec<String> = v
            .columns()
            .iter()
            .map(|c| c.map(|x| x.to_string()).unwrap_or_default())
            .collect();
        writeln!(s, "{i},{},{}", d.class_labels[i], cells.join(",")).unwrap();
    }
    s
}

fn cmd_pair(args: &PairArgs) -> Result<String, Failure> {
    let read = |p: &Path| edgelist::read_edge_list(p).map_err(|e| Failure::new(Stage::Parse, &p.display().to_string(), e));
    let a = read(&args.graph_a)?;
    let b = read(&args.graph_b)?;
    let use_labels = !args.no_node_labels && a.has_labels() && b.has_labels();
    let compute = |e| Failure::new(Stage::Compute, "pair", e);
    let verdict = iso::wl_test(&a, &b, use_labels, args.k).map_err(compute)?;
    let exact = iso::exact_isomorphic(
        &a,
        &b,
        IsoOptions {
            use_labels,
            budget: args.iso_budget,
        },
    )
    .map_err(compute)?;

    let (wl_text, through) = match verdict {
        WlTestResult::Distinguished { iteration } => (format!("distinguished at k={iteration}"), iteration),
        WlTestResult::Indistinguishable { iteration, .. } => ("indistinguishable".to_string(), iteration),
    };
    let mut s = format!(
        "WL: {wl_text}; exact: {}\n",
        if exact { "isomorphic" } else { "non-isomorphic" }
    );
    match verdict {
        WlTestResult::Indistinguishable { iteration, stable: true } => {
            writeln!(s, "joint coloring stable at k={iteration}").unwrap()
        }
        WlTestResult::Indistinguishable { iteration, stable: false } => {
            writeln!(s, "stopped at k={iteration} before the joint coloring stabilized").unwrap()
        }
        WlTestResult::Distinguished { .. } => {}
    }
    writeln!(s, "labels: {}", if use_labels { "used" } else { "ignored" }).unwrap();
    let mut table = ColorTable::new();
    let sa = wl::signature(&a, through, use_labels, &mut table).map_err(compute)?;
    let sb = wl::signature(&b, through, use_labels, &mut table).map_err(compute)?;
    for (k, (x, y)) in sa.iter().zip(&sb).enumerate() {
        writeln!(s, "k={k} A: {x}").unwrap();
        writeln!(s, "k={k} B: {y}").unwrap();
    }
    Ok(s)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Stage::Usage as u8 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Audit(a) => cmd_audit(a),
        Command::Motifs(m) => cmd_motifs(m),
        Command::Pair(p) => cmd_pair(p),
    };
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.stage as u8)
        }
    }
}
