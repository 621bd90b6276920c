//! Command-line interface.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use lexprobe_core::baselines::{bias_gate, Verdict, DEFAULT_THRESHOLD};
use lexprobe_core::eval::{self, InoculationRun, Mixing, PredictionRecord};
use lexprobe_core::probe::{BuildConfig, Contexts, ProbeQuestion, ProbeType, SemanticCluster, Split, StrategySpec};
use lexprobe_core::wndb::IsaSource;

use crate::config::RunConfig;
use crate::error::{exit, Error, Result};
use crate::formats::{json_bytes, jsonl_bytes, dump_graph, load_graph, read_jsonl, write_atomic};
use crate::ingest::{read_embeddings, read_lexicon, read_wordnet};
use crate::pipeline::{build_parallel, Manifest};

#[derive(Debug, Parser)]
#[command(name = "lexprobe", version, about = "Compile lexical probe datasets and score QA model predictions")]
pub struct Cli {
    /// Random seed (mandatory for `build`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML or JSON run configuration; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (or file for `check-bias` and `mixing-plan`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (output does not depend on this).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a knowledge source and write a graph dump plus ingest report.
    Ingest {
        #[command(subcommand)]
        source: IngestSource,
    },
    /// Compile a probe dataset from a graph dump.
    Build(BuildArgs),
    /// Run partial-input and similarity baselines over a probe file.
    CheckBias(BiasArgs),
    /// Score predictions: instance/cluster accuracy, breakdowns, learning curves.
    Evaluate(EvalArgs),
    /// Interleave probe and original-task examples for add-some inoculation.
    MixingPlan(MixArgs),
}

#[derive(Debug, Subcommand)]
pub enum IngestSource {
    /// A WNDB directory holding data.* (and optionally index.*) files.
    Wordnet {
        dir: PathBuf,
        #[arg(long, value_enum, default_value_t = IsaArg::Both)]
        isa: IsaArg,
    },
    /// A JSONL lexicon of {"word","pos","definition","example"?} records.
    Lexicon { file: PathBuf },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum IsaArg {
    Both,
    Hypernyms,
    Hyponyms,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub probe: ProbeType,
    /// Comma-separated, e.g. `random,sister:1,updown:2`.
    #[arg(long, value_delimiter = ',')]
    pub strategies: Option<Vec<StrategySpec>>,
    #[arg(long, value_delimiter = ',')]
    pub templates: Option<Vec<u8>>,
    #[arg(long)]
    pub hop_limit: Option<u32>,
    #[arg(long)]
    pub sister_depth: Option<u32>,
    #[arg(long)]
    pub max_per_concept: Option<usize>,
    #[arg(long, value_parser = parse_contexts)]
    pub contexts: Option<Contexts>,
    #[arg(long)]
    pub min_lemmas: Option<usize>,
    #[arg(long)]
    pub min_senses: Option<usize>,
    #[arg(long)]
    pub require_example: bool,
    #[arg(long)]
    pub require_lemma_in_context: bool,
    /// Admit definitions of entries without examples as word-sense distractors.
    #[arg(long)]
    pub no_distractor_filter: bool,
    #[arg(long)]
    pub no_random_fallback: bool,
    #[arg(long)]
    pub inoculation_max: Option<usize>,
    #[arg(long)]
    pub dev_max: Option<usize>,
}

fn parse_contexts(s: &str) -> std::result::Result<Contexts, String> {
    match s {
        "first" => Ok(Contexts::First),
        "all" => Ok(Contexts::All),
        _ => Err(format!("expected first or all, got {s:?}")),
    }
}

#[derive(Debug, Args)]
pub struct BiasArgs {
    #[arg(long)]
    pub probes: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub probes: PathBuf,
    #[arg(long)]
    pub clusters: PathBuf,
    #[arg(long)]
    pub predictions: PathBuf,
    /// Restrict scoring to one split.
    #[arg(long)]
    pub split: Option<SplitArg>,
    /// Inoculation run records for learning-curve and cost reports.
    #[arg(long)]
    pub runs: Option<PathBuf>,
    /// Original-task score before inoculation (default: best k=0 run).
    #[arg(long)]
    pub orig_before: Option<f64>,
    /// Expected k values; missing ones are reported as gaps.
    #[arg(long, value_delimiter = ',')]
    pub ks: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SplitArg {
    Inoculation,
    Dev,
    Test,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Split {
        match s {
            SplitArg::Inoculation => Split::Inoculation,
            SplitArg::Dev => Split::Dev,
            SplitArg::Test => Split::Test,
        }
    }
}

#[derive(Debug, Args)]
pub struct MixArgs {
    #[arg(long)]
    pub probes: PathBuf,
    /// Original-task pool in probe JSONL format.
    #[arg(long)]
    pub science: PathBuf,
    #[arg(long, value_enum)]
    pub mode: MixArg,
    #[arg(long)]
    pub k: usize,
    /// Split of the probe file to draw from.
    #[arg(long, value_enum, default_value_t = SplitArg::Inoculation)]
    pub split: SplitArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MixArg {
    None,
    X1,
    X2,
}

impl From<MixArg> for Mixing {
    fn from(m: MixArg) -> Mixing {
        match m {
            MixArg::None => Mixing::None,
            MixArg::X1 => Mixing::X1,
            MixArg::X2 => Mixing::X2,
        }
    }
}

/// Parses arguments, runs, and returns the process exit code. Errors are
/// reported on stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::PARSE } else { exit::OK };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if let Error::Eval(ev) = &e {
                let offenders = ev.offenders();
                if !offenders.is_empty() {
                    eprintln!("first offending ids:");
                    for id in offenders.iter().take(10) {
                        eprintln!("  {id}");
                    }
                }
            }
            e.exit_code()
        }
    }
}

pub fn run(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let seed = cli.seed.or(file.seed);
    let out = cli.out.clone().or_else(|| file.out.clone());
    if let Some(n) = cli.threads.or(file.threads) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Ingest { source } => ingest(source, out.as_deref()),
        Command::Build(args) => {
            let seed = seed.ok_or_else(|| Error::Config("build needs --seed (or seed in the config file)".into()))?;
            build(args, &file, seed, out.as_deref())
        }
        Command::CheckBias(args) => check_bias(args, &file, seed.unwrap_or(0), out.as_deref()),
        Command::Evaluate(args) => evaluate(args, out.as_deref()),
        Command::MixingPlan(args) => mixing_plan(args, seed.unwrap_or(0), out.as_deref()),
    }
}

fn out_dir(out: Option<&Path>) -> PathBuf {
    out.map_or_else(|| PathBuf::from("."), Path::to_path_buf)
}

fn print_json<T: Serialize>(value: &T) {
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(&json_bytes(value));
}

fn ingest(source: IngestSource, out: Option<&Path>) -> Result<i32> {
    let dir = out_dir(out);
    let (graph, report) = match source {
        IngestSource::Wordnet { dir: wn, isa } => {
            let isa = match isa {
                IsaArg::Both => IsaSource::Both,
                IsaArg::Hypernyms => IsaSource::Hypernyms,
                IsaArg::Hyponyms => IsaSource::Hyponyms,
            };
            let (g, r) = read_wordnet(&wn, isa)?;
            (g, serde_json::to_value(r).expect("serializable"))
        }
        IngestSource::Lexicon { file } => {
            let (_, g, r) = read_lexicon(&file)?;
            (g, serde_json::to_value(r).expect("serializable"))
        }
    };
    write_atomic(&dir.join("graph.jsonl"), &dump_graph(&graph))?;
    write_atomic(&dir.join("ingest_report.json"), &json_bytes(&report))?;
    print_json(&report);
    Ok(exit::OK)
}

fn build_config(args: &BuildArgs, file: &RunConfig, seed: u64) -> Result<BuildConfig> {
    let mut cfg = file.build_config(args.probe, seed)?;
    macro_rules! set {
        ($field:ident) => {
            if let Some(v) = args.$field.clone() {
                cfg.$field = v.into();
            }
        };
    }
    set!(strategies);
    set!(templates);
    set!(hop_limit);
    set!(sister_depth);
    set!(contexts);
    set!(min_lemmas);
    set!(min_senses);
    set!(inoculation_max);
    if args.max_per_concept.is_some() {
        cfg.max_per_concept = args.max_per_concept;
    }
    if args.dev_max.is_some() {
        cfg.dev_max = args.dev_max;
    }
    cfg.require_example |= args.require_example;
    cfg.require_lemma_in_context |= args.require_lemma_in_context;
    if args.no_distractor_filter {
        cfg.filter_distractors = false;
    }
    if args.no_random_fallback {
        cfg.random_fallback = false;
    }
    Ok(cfg)
}

fn build(args: BuildArgs, file: &RunConfig, seed: u64, out: Option<&Path>) -> Result<i32> {
    let cfg = build_config(&args, file, seed)?;
    let graph = load_graph(&args.graph)?;
    let built = build_parallel(&graph, args.probe, cfg.clone())?;
    let dir = out_dir(out);
    let manifest = Manifest::new(args.probe, args.graph.display().to_string(), cfg, built.report);
    write_atomic(&dir.join("probes.jsonl"), &jsonl_bytes(&built.dataset.questions))?;
    write_atomic(&dir.join("clusters.jsonl"), &jsonl_bytes(&built.dataset.clusters))?;
    write_atomic(&dir.join("manifest.json"), &json_bytes(&manifest))?;
    print_json(&manifest.counts);
    Ok(exit::OK)
}

fn check_bias(args: BiasArgs, file: &RunConfig, seed: u64, out: Option<&Path>) -> Result<i32> {
    let probes: Vec<ProbeQuestion> = read_jsonl(&args.probes)?;
    let table = read_embeddings(&args.embeddings)?;
    let threshold = args.threshold.or(file.bias.threshold).unwrap_or(DEFAULT_THRESHOLD);
    let report = bias_gate(&probes, &table, threshold, &file.choice_only(seed))
        .map_err(|e| Error::Config(format!("bias gate: {e}")))?;
    if let Some(path) = out {
        write_atomic(path, &json_bytes(&report))?;
    }
    print_json(&report);
    Ok(match report.verdict {
        Verdict::Pass => exit::OK,
        Verdict::Fail => exit::BIAS_FAIL,
    })
}

#[derive(Debug, Serialize)]
struct EvalOutput {
    #[serde(flatten)]
    report: eval::EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    learning_curve: Option<eval::LearningCurve>,
}

fn evaluate(args: EvalArgs, out: Option<&Path>) -> Result<i32> {
    let mut probes: Vec<ProbeQuestion> = read_jsonl(&args.probes)?;
    let mut clusters: Vec<SemanticCluster> = read_jsonl(&args.clusters)?;
    if let Some(split) = args.split.map(Split::from) {
        probes.retain(|q| q.meta.split == Some(split));
        let kept: BTreeSet<&str> = probes.iter().map(|q| q.id.as_str()).collect();
        for c in &mut clusters {
            c.members.retain(|m| kept.contains(m.as_str()));
        }
        clusters.retain(|c| !c.members.is_empty());
    }
    let preds: Vec<PredictionRecord> = read_jsonl(&args.predictions)?;
    let report = eval::evaluate(&probes, &clusters, &preds)?;
    let curve = match &args.runs {
        Some(path) => {
            let runs: Vec<InoculationRun> = read_jsonl(path)?;
            Some(eval::learning_curve(&runs, args.ks.as_deref().unwrap_or(&[]), args.orig_before))
        }
        None => None,
    };
    let dir = out_dir(out);
    write_atomic(&dir.join("breakdown.csv"), report.breakdown.to_csv().as_bytes())?;
    if let Some(c) = &curve {
        write_atomic(&dir.join("learning_curve.csv"), c.to_csv().as_bytes())?;
    }
    let output = EvalOutput { report, learning_curve: curve };
    write_atomic(&dir.join("eval_report.json"), &json_bytes(&output))?;
    let r = &output.report;
    println!("questions\tclusters\tinstance_acc\tcluster_acc\tdelta");
    println!(
        "{}\t{}\t{:.2}\t{:.2}\t{:.2}",
        r.questions,
        r.clusters,
        100.0 * r.instance_acc,
        100.0 * r.cluster_acc,
        100.0 * r.delta
    );
    Ok(exit::OK)
}

fn mixing_plan(args: MixArgs, seed: u64, out: Option<&Path>) -> Result<i32> {
    let split = Split::from(args.split);
    let probes: Vec<ProbeQuestion> = read_jsonl(&args.probes)?;
    let probe_ids: Vec<String> =
        probes.into_iter().filter(|q| q.meta.split == Some(split)).map(|q| q.id).collect();
    let science: Vec<ProbeQuestion> = read_jsonl(&args.science)?;
    let science_ids: Vec<String> = science.into_iter().map(|q| q.id).collect();
    let plan = eval::mixing_plan(&probe_ids, &science_ids, args.mode.into(), args.k, seed)?;
    let bytes = jsonl_bytes(&plan);
    match out {
        Some(path) => write_atomic(path, &bytes)?,
        None => {
            let _ = std::io::stdout().lock().write_all(&bytes);
        }
    }
    Ok(exit::OK)
}
